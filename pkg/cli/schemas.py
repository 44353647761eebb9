"""Pydantic schema for run configuration files."""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from utils.config import ConfigError


SCHEMA_VERSION = 1


class Task(str, Enum):
    """Benchmark task."""
    MNIST = "mnist"
    CANCER = "cancer"
    SPT = "spt"


class Baseline(str, Enum):
    """Search algorithm."""
    MQNE = "mqne"
    GENETIC = "genetic"


class Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class SplitSection(Section):
    """Partition sizes."""
    train: int = Field(ge=0)
    validation: int = Field(ge=0)
    test: int = Field(default=0, ge=0)

    def counts(self) -> Dict[str, int]:
        return {'train': self.train, 'validation': self.validation, 'test': self.test}


class DatasetSection(Section):
    """Where samples come from; ``cache`` takes precedence over the source fields."""
    cache: Optional[str] = None
    image_file: Optional[str] = None
    label_file: Optional[str] = None
    digits: List[int] = Field(default_factory=lambda: [1, 9])
    image_size: int = 16
    limit: Optional[int] = None
    csv_file: Optional[str] = None
    spins: int = 8
    samples: int = 2000
    split: Optional[SplitSection] = None


class LibrarySection(Section):
    mode: str = "full"
    cutoff: Optional[int] = None
    include_empty_block: bool = True
    max_blocks: int = 250_000


class GraphSection(Section):
    exclude_empty: bool = True
    start: str = "fixed"
    start_index: Optional[int] = None
    max_nodes: int = 20_000

    @field_validator('start')
    @classmethod
    def _check_start(cls, value: str) -> str:
        if value not in ('fixed', 'uniform'):
            raise ValueError(f"start must be 'fixed' or 'uniform', got '{value}'")
        return value


class SearchSection(Section):
    """MQNE hyperparameters (n, t, l, l', f_c, g_c)."""
    offspring: int = Field(default=5, ge=2)
    survivors: int = Field(default=1, ge=1)
    initial_length: int = Field(default=5, ge=1)
    segment_length: int = Field(default=2, ge=1)
    fitness_threshold: float = Field(default=0.96, ge=0.0, le=1.0)
    max_generations: int = Field(default=10, ge=1)
    population_schedule: List[int] = Field(default_factory=list)
    survivor_schedule: List[int] = Field(default_factory=list)


class GeneticSection(Section):
    """Genetic baseline hyperparameters; threshold and budget default to the search section."""
    population: int = Field(default=9, ge=2)
    survivors: int = Field(default=3, ge=1)
    mutation_probability: float = Field(default=0.1, ge=0.0, le=1.0)
    circuit_length: int = Field(default=5, ge=1)
    fitness_threshold: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    max_generations: Optional[int] = Field(default=None, ge=1)


class TrainingSection(Section):
    learning_rate: float = Field(default=0.0015, gt=0)
    batch_size: int = Field(default=30, ge=1)
    epochs: int = Field(default=100, ge=0)
    max_steps: Optional[int] = Field(default=None, ge=0)
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    init_policy: str = "fixed"
    seed: Optional[int] = None

    @field_validator('init_policy')
    @classmethod
    def _check_policy(cls, value: str) -> str:
        if value not in ('random', 'fixed', 'inherit'):
            raise ValueError(f"init_policy must be random, fixed or inherit, got '{value}'")
        return value


class RunConfig(Section):
    """A complete run: task, data, search space, search and training settings."""
    version: int = SCHEMA_VERSION
    task: Task
    seed: int
    baseline: Baseline = Baseline.MQNE
    output_dir: str = "output/run"
    workers: int = Field(default=1, ge=1)
    dataset: DatasetSection = Field(default_factory=DatasetSection)
    library: LibrarySection = Field(default_factory=LibrarySection)
    graph: GraphSection = Field(default_factory=GraphSection)
    search: SearchSection = Field(default_factory=SearchSection)
    genetic: GeneticSection = Field(default_factory=GeneticSection)
    training: TrainingSection = Field(default_factory=TrainingSection)

    @field_validator('version')
    @classmethod
    def _check_version(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f"Unsupported config version {value} (expected {SCHEMA_VERSION})")
        return value

    @model_validator(mode='after')
    def _check_inputs(self) -> "RunConfig":
        data = self.dataset
        if data.cache is not None:
            required = [data.cache]
        elif self.task == Task.MNIST:
            if not (data.image_file and data.label_file):
                raise ValueError("mnist runs need dataset.image_file and dataset.label_file (or dataset.cache)")
            required = [data.image_file, data.label_file]
        elif self.task == Task.CANCER:
            if not data.csv_file:
                raise ValueError("cancer runs need dataset.csv_file (or dataset.cache)")
            required = [data.csv_file]
        else:
            required = []
        missing = [path for path in required if not Path(path).exists()]
        if missing:
            raise ValueError(f"Input files not found: {', '.join(missing)}")
        return self


def parse_run_config(raw: Dict[str, Any]) -> RunConfig:
    """
    Validate a raw configuration dictionary.

    Raises:
        ConfigError: With the pydantic validation message
    """
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration:\n{e}") from e
