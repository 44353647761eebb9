"""Tests for the MQNE search loop."""

import unittest

import numpy as np

from core.evolution import (
    Candidate,
    EvolutionError,
    Individual,
    MqneConfig,
    RunOutcome,
    evaluate_candidate,
    offspring_candidates,
    run_mqne,
    select_survivors,
)
from core.trainer import InitPolicy, TrainConfig, TrainedModel, TrainingData
from dataset import Dataset
from graph import Path, StartPolicy, build_graph, validate_path
from library import LibrarySpec, enumerate_library
from simulator import compile_blocks


def paired_dataset() -> Dataset:
    """
    Ten feature vectors, each present twice with opposite labels.

    No classifier scores above 0.5 on the validation partition, so a run with
    a higher threshold always uses its full generation budget.
    """
    rng = np.random.default_rng(7)
    base = rng.uniform(0.1, 1.0, size=(10, 4))
    features = np.vstack([base, base])
    first = np.array([[1, 0] if i % 2 == 0 else [0, 1] for i in range(10)])
    labels = np.vstack([first, first[:, ::-1]])
    return Dataset(
        name="paired",
        features=features,
        labels=labels,
        data_qubits=2,
        partitions={
            'train': np.array([0, 1, 2, 3, 4, 5, 10, 11, 12, 13, 14, 15]),
            'validation': np.array([6, 7, 8, 9, 16, 17, 18, 19]),
        },
    )


def make_individual(index: int, fitness: float) -> Individual:
    return Individual(
        generation=1, index=index, parent=None, blocks=(1, 2),
        param_count=4, rot_count=1, crx_count=1, fitness=fitness,
    )


def small_config(**overrides) -> MqneConfig:
    values = dict(
        offspring=3,
        survivors=1,
        initial_length=2,
        segment_length=1,
        fitness_threshold=0.9,
        max_generations=3,
        train=TrainConfig(learning_rate=0.05, batch_size=4, epochs=2),
        seed=11,
    )
    values.update(overrides)
    return MqneConfig(**values)


class TestMqneConfig(unittest.TestCase):
    """Test cases for search hyperparameter validation."""

    def test_survivors_must_be_fewer_than_offspring(self):
        with self.assertRaises(EvolutionError):
            MqneConfig(offspring=3, survivors=3)
        with self.assertRaises(EvolutionError):
            MqneConfig(offspring=3, survivors=0)

    def test_schedule_is_validated(self):
        with self.assertRaises(EvolutionError):
            MqneConfig(offspring=5, survivors=1, population_schedule=(5, 1), max_generations=3)

    def test_invalid_threshold_and_lengths(self):
        with self.assertRaises(EvolutionError):
            MqneConfig(fitness_threshold=1.5)
        with self.assertRaises(EvolutionError):
            MqneConfig(segment_length=0)
        with self.assertRaises(EvolutionError):
            MqneConfig(max_generations=0)

    def test_schedules(self):
        config = MqneConfig(offspring=5, survivors=1, population_schedule=(8, 4), survivor_schedule=(2,))
        self.assertEqual([config.offspring_at(g) for g in (1, 2, 3)], [8, 4, 5])
        self.assertEqual([config.survivors_at(g) for g in (1, 2)], [2, 1])
        self.assertEqual(config.expected_length(3), 5 + 2 * 2)


class TestSelection(unittest.TestCase):
    """Test cases for survivor selection."""

    def test_fittest_first_and_ties_to_lower_index(self):
        individuals = [make_individual(i, f) for i, f in enumerate([0.5, 0.7, 0.7, 0.2, 0.7])]
        survivors = select_survivors(individuals, 2)
        self.assertEqual([ind.index for ind in survivors], [1, 2])

    def test_individual_record(self):
        record = make_individual(0, 0.5).to_dict()
        self.assertEqual(record['path'], "1 -> 2")
        self.assertEqual(record['length'], 2)
        self.assertNotIn('blocks', record)


class TestRunMqne(unittest.TestCase):
    """Test cases for the generation loop on a three-qubit library."""

    @classmethod
    def setUpClass(cls):
        cls.library = enumerate_library(LibrarySpec(3))
        cls.graph = build_graph(cls.library)
        cls.dataset = paired_dataset()
        cls.data = TrainingData.from_dataset(cls.dataset, 3)

    def test_single_generation_budget(self):
        result = run_mqne(self.graph, self.library, self.data, small_config(max_generations=1))
        self.assertEqual(len(result.logs), 1)
        self.assertEqual(result.logs[0].population, 3)
        self.assertEqual(result.outcome, RunOutcome.BUDGET_EXHAUSTED)

    def test_zero_threshold_stops_after_first_generation(self):
        result = run_mqne(self.graph, self.library, self.dataset, small_config(fitness_threshold=0.0))
        self.assertEqual(result.outcome, RunOutcome.THRESHOLD_REACHED)
        self.assertEqual(len(result.logs), 1)
        self.assertEqual(result.evaluated, 3)

    def test_paths_grow_and_obey_rules(self):
        seen = []
        config = small_config(max_generations=3)
        result = run_mqne(self.graph, self.library, self.data, config, on_generation=seen.append)

        self.assertEqual(result.outcome, RunOutcome.BUDGET_EXHAUSTED)
        self.assertEqual([log.generation for log in seen], [1, 2, 3])
        for log in result.logs:
            self.assertEqual(log.population, 3)
            for individual in log.individuals:
                self.assertEqual(individual.length, config.expected_length(log.generation))
                validate_path(self.graph, Path(individual.blocks))
                self.assertLessEqual(individual.fitness, 0.5)

    def test_fixed_start_policy(self):
        result = run_mqne(self.graph, self.library, self.data, small_config(max_generations=1))
        start = self.library.all_rotations_index()
        for individual in result.logs[0].individuals:
            self.assertEqual(individual.blocks[0], start)

    def test_offspring_extend_a_survivor(self):
        result = run_mqne(self.graph, self.library, self.data, small_config(max_generations=2))
        first, second = result.logs
        survivor = select_survivors(first.individuals, 1)[0]
        for individual in second.individuals:
            self.assertEqual(individual.parent, survivor.index)
            self.assertEqual(individual.blocks[:2], survivor.blocks)

    def test_best_so_far_never_decreases(self):
        result = run_mqne(self.graph, self.library, self.data, small_config(max_generations=3))
        history = [log.best_so_far for log in result.logs]
        self.assertEqual(history, sorted(history))
        self.assertEqual(result.best_individual.fitness, history[-1])

    def test_worker_count_does_not_change_results(self):
        serial = run_mqne(self.graph, self.library, self.data, small_config(workers=1))
        parallel = run_mqne(self.graph, self.library, self.data, small_config(workers=3))
        for a, b in zip(serial.logs, parallel.logs):
            self.assertEqual(
                [(ind.blocks, ind.fitness, ind.final_train_loss) for ind in a.individuals],
                [(ind.blocks, ind.fitness, ind.final_train_loss) for ind in b.individuals],
            )
        np.testing.assert_array_equal(serial.best_model.theta, parallel.best_model.theta)

    def test_same_seed_same_run(self):
        a = run_mqne(self.graph, self.library, self.data, small_config(seed=3, max_generations=2))
        b = run_mqne(self.graph, self.library, self.data, small_config(seed=3, max_generations=2))
        self.assertEqual(a.best_path, b.best_path)
        self.assertEqual(
            [ind.blocks for log in a.logs for ind in log.individuals],
            [ind.blocks for log in b.logs for ind in log.individuals],
        )

    def test_population_schedule(self):
        config = small_config(population_schedule=(4, 2), survivor_schedule=(2,), max_generations=2)
        result = run_mqne(self.graph, self.library, self.data, config)
        self.assertEqual([log.population for log in result.logs], [4, 4])

    def test_inherited_angles(self):
        config = small_config(train=TrainConfig(epochs=1, batch_size=4, init_policy=InitPolicy.INHERIT))
        survivor = Individual(
            generation=1, index=0, parent=None, blocks=(self.library.all_rotations_index(),),
            param_count=9, rot_count=3, crx_count=0, fitness=0.5,
        )
        circuit = compile_blocks(survivor.blocks, self.library)
        model = TrainedModel(circuit=circuit, theta=np.linspace(0.1, 0.9, 9))
        candidates = offspring_candidates(self.graph, config, 2, [survivor], {0: model})

        self.assertEqual(len(candidates), 3)
        for candidate in candidates:
            self.assertEqual(candidate.parent, 0)
            self.assertEqual(len(candidate.blocks), 2)
            self.assertIs(candidate.parent_theta, model.theta)

    def test_failed_individual_scores_zero(self):
        config = TrainConfig(epochs=1, batch_size=4, init_policy=InitPolicy.INHERIT)
        candidate = Candidate(index=0, blocks=(self.library.all_rotations_index(),), parent_theta=np.zeros(50))
        individual, model = evaluate_candidate(candidate, 1, self.library, self.data, config, 0)
        self.assertTrue(individual.failed)
        self.assertEqual(individual.fitness, 0.0)
        self.assertIsNone(model)
        self.assertTrue(individual.error)

    def test_graph_from_other_library(self):
        other = build_graph(enumerate_library(LibrarySpec(4)))
        with self.assertRaises(EvolutionError):
            run_mqne(other, self.library, self.data, small_config())

    def test_empty_validation_partition(self):
        dataset = self.dataset.with_partitions({'train': np.arange(20)})
        with self.assertRaises(EvolutionError):
            run_mqne(self.graph, self.library, dataset, small_config())

    def test_uniform_start_policy(self):
        config = small_config(max_generations=1, start_policy=StartPolicy.uniform(), offspring=4)
        result = run_mqne(self.graph, self.library, self.data, config)
        self.assertEqual(result.logs[0].population, 4)


if __name__ == '__main__':
    unittest.main()
