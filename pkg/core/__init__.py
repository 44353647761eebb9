"""Circuit training and evolutionary architecture search."""

from .trainer import (
    Adam,
    EmptyPartitionError,
    EpochRecord,
    FitnessReport,
    InitPolicy,
    NonFiniteLossError,
    TrainConfig,
    TrainedModel,
    TrainingData,
    TrainingError,
    evaluate,
    fitness,
    history_to_csv,
    initial_angles,
    loss,
    model_from_text,
    model_to_text,
    predict,
    save_model,
    train,
)
from .seeding import STREAMS, seed_sequence, stream_rng
from .evolution import (
    EvolutionError,
    EvolutionResult,
    GenerationLog,
    Individual,
    MqneConfig,
    RunOutcome,
    run_mqne,
)
from .genetic import CutOutOfRangeError, GeneticConfig, crossover, mutation, run_genetic

__all__ = [
    'Adam',
    'EmptyPartitionError',
    'EpochRecord',
    'FitnessReport',
    'InitPolicy',
    'NonFiniteLossError',
    'TrainConfig',
    'TrainedModel',
    'TrainingData',
    'TrainingError',
    'evaluate',
    'fitness',
    'history_to_csv',
    'initial_angles',
    'loss',
    'model_from_text',
    'model_to_text',
    'predict',
    'save_model',
    'train',
    'STREAMS',
    'seed_sequence',
    'stream_rng',
    'EvolutionError',
    'EvolutionResult',
    'GenerationLog',
    'Individual',
    'MqneConfig',
    'RunOutcome',
    'run_mqne',
    'CutOutOfRangeError',
    'GeneticConfig',
    'crossover',
    'mutation',
    'run_genetic',
]
