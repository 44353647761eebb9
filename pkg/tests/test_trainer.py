"""Tests for loss, prediction, Adam training and fitness scoring."""

import math
import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from core.trainer import (
    HISTORY_COLUMNS,
    Adam,
    EmptyPartitionError,
    InitPolicy,
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
    predict_batch,
    save_model,
    train,
    training_loss,
)
from dataset import Dataset, Partition
from library import Gate, GateBlock, LibrarySpec, enumerate_library
from simulator import CircuitDimensionError, compile_blocks, forward_batch, readout_batch


def basis_dataset() -> Dataset:
    """|0> is class (1, 0) and |1> is class (0, 1); two copies for train and validation."""
    features = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    labels = np.array([[1, 0], [0, 1], [1, 0], [0, 1]])
    return Dataset(
        name="basis",
        features=features,
        labels=labels,
        data_qubits=1,
        partitions={'train': np.array([0, 1]), 'validation': np.array([2, 3])},
    )


class TestLossAndPrediction(unittest.TestCase):
    """Test cases for the per-sample loss and the decision rule."""

    def test_loss_values(self):
        self.assertAlmostEqual(loss(1.0, 0.0, (1, 0)), 0.0, places=9)
        self.assertAlmostEqual(loss(0.5, 0.5, (1, 0)), math.log(2), places=9)
        self.assertAlmostEqual(loss(0.5, 0.5, (0, 1)), math.log(2), places=9)
        self.assertAlmostEqual(loss(0.75, 0.25, (1, 0)), 0.2877, places=4)

    def test_loss_is_finite_at_zero_probability(self):
        self.assertTrue(math.isfinite(loss(1.0, 0.0, (0, 1))))

    def test_predict(self):
        self.assertEqual(predict(0.5, 0.5), 1)
        self.assertEqual(predict(0.6, 0.4), 1)
        self.assertEqual(predict(0.2, 0.8), 2)


class TestAdam(unittest.TestCase):
    """Test cases for the optimizer update."""

    def test_zero_gradient_keeps_theta(self):
        optimizer = Adam(3, TrainConfig(learning_rate=0.1))
        theta = np.array([0.1, 0.2, 0.3])
        np.testing.assert_array_equal(optimizer.step(theta, np.zeros(3)), theta)

    def test_first_step_has_learning_rate_magnitude(self):
        optimizer = Adam(2, TrainConfig(learning_rate=0.01))
        theta = optimizer.step(np.zeros(2), np.array([2.0, -0.5]))
        np.testing.assert_allclose(theta, [-0.01, 0.01], rtol=1e-6)
        self.assertEqual(optimizer.t, 1)


class TestTrainConfig(unittest.TestCase):
    """Test cases for training configuration validation."""

    def test_invalid_values(self):
        for kwargs in ({'learning_rate': 0}, {'batch_size': 0}, {'epochs': -1},
                       {'max_steps': -2}, {'beta1': 1.0}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(TrainingError):
                    TrainConfig(**kwargs)

    def test_dict_round_trip(self):
        config = TrainConfig(learning_rate=0.05, init_policy='inherit', seed=4)
        self.assertEqual(config.init_policy, InitPolicy.INHERIT)
        self.assertEqual(TrainConfig.from_dict(config.to_dict()), config)


class TestTraining(unittest.TestCase):
    """Test cases for training and fitness on a single-qubit classification task."""

    @classmethod
    def setUpClass(cls):
        cls.library = enumerate_library(LibrarySpec(2))
        cls.crx = cls.library.index_of(GateBlock.of(2, [Gate.crx(1, 2)]))
        cls.rot = cls.library.all_rotations_index()
        cls.dataset = basis_dataset()
        cls.data = TrainingData.from_dataset(cls.dataset, 2)

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_overfits_two_samples(self):
        circuit = compile_blocks([self.crx], self.library)
        config = TrainConfig(learning_rate=0.1, batch_size=1, epochs=200)
        theta0 = np.full(circuit.param_count, 0.5)
        states, labels = self.data.partition(Partition.TRAIN)
        initial_loss, _ = evaluate(circuit, theta0, states, labels)

        model = train(circuit, self.data, config, theta0=theta0)
        self.assertEqual(len(model.history), 200)
        self.assertLess(model.final_train_loss, 0.05)
        self.assertLess(model.final_train_loss, initial_loss)
        self.assertEqual(fitness(model, self.data).fitness, 1.0)
        self.assertAlmostEqual(training_loss(model, self.data), model.final_train_loss, places=12)

    def test_zero_angle_blocks_keep_predictions(self):
        circuit = compile_blocks([self.rot, self.crx], self.library)
        config = TrainConfig(learning_rate=0.05, batch_size=2, epochs=10)
        model = train(circuit, self.data, config, rng=np.random.default_rng(0))

        grown = compile_blocks([self.rot, self.crx, self.rot, self.crx], self.library)
        theta = np.concatenate([model.theta, np.zeros(grown.param_count - circuit.param_count)])
        states, _ = self.data.partition(Partition.VALIDATION)
        before = predict_batch(readout_batch(forward_batch(circuit, model.theta, states)))
        after = predict_batch(readout_batch(forward_batch(grown, theta, states)))
        np.testing.assert_array_equal(before, after)
        self.assertEqual(
            fitness(model, self.data).fitness,
            fitness(TrainedModel(circuit=grown, theta=theta), self.data).fitness,
        )

    def test_zero_angles_score_half(self):
        circuit = compile_blocks([self.crx], self.library)
        report = fitness(TrainedModel(circuit=circuit, theta=np.zeros(1)), self.dataset)
        self.assertEqual(report.fitness, 0.5)
        self.assertEqual((report.correct, report.total), (1, 2))
        self.assertEqual(report.partition, 'validation')

    def test_zero_epochs_returns_initial_angles(self):
        circuit = compile_blocks([self.rot, self.crx], self.library)
        theta0 = np.linspace(0.0, 1.0, circuit.param_count)
        model = train(circuit, self.data, TrainConfig(epochs=0), theta0=theta0)
        np.testing.assert_array_equal(model.theta, theta0)
        self.assertEqual(model.history, [])
        self.assertEqual(model.steps, 0)

    def test_training_is_deterministic(self):
        circuit = compile_blocks([self.rot, self.crx], self.library)
        config = TrainConfig(learning_rate=0.05, batch_size=1, epochs=5, seed=9)
        a = train(circuit, self.data, config, rng=np.random.default_rng(1))
        b = train(circuit, self.data, config, rng=np.random.default_rng(1))
        np.testing.assert_array_equal(a.theta, b.theta)
        self.assertEqual(a.history, b.history)

    def test_max_steps_caps_updates(self):
        circuit = compile_blocks([self.crx], self.library)
        config = TrainConfig(learning_rate=0.1, batch_size=1, epochs=5, max_steps=3)
        model = train(circuit, self.data, config, theta0=np.array([0.5]))
        self.assertEqual(model.steps, 3)
        self.assertEqual(len(model.history), 5)
        self.assertEqual(model.history[3].train_loss, model.history[4].train_loss)

    def test_empty_training_partition(self):
        dataset = basis_dataset().with_partitions({'validation': np.array([2, 3])})
        circuit = compile_blocks([self.crx], self.library)
        with self.assertRaises(EmptyPartitionError):
            train(circuit, dataset, TrainConfig(epochs=1))

    def test_empty_fitness_partition(self):
        circuit = compile_blocks([self.crx], self.library)
        model = TrainedModel(circuit=circuit, theta=np.zeros(1))
        with self.assertRaises(EmptyPartitionError):
            fitness(model, self.data, Partition.TEST)

    def test_dimension_mismatch(self):
        circuit = compile_blocks([self.crx], self.library)
        with self.assertRaises(CircuitDimensionError):
            train(circuit, self.data, TrainConfig(epochs=1), theta0=np.zeros(3))

        library3 = enumerate_library(LibrarySpec(3))
        wide = compile_blocks([library3.all_rotations_index()], library3)
        with self.assertRaises(CircuitDimensionError):
            train(wide, self.dataset, TrainConfig(epochs=1))

    def test_history_csv(self):
        circuit = compile_blocks([self.crx], self.library)
        model = train(circuit, self.data, TrainConfig(epochs=3, batch_size=2), theta0=np.array([1.0]))
        path = history_to_csv(model.history, Path(self.test_dir) / 'history.csv')
        frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), HISTORY_COLUMNS)
        self.assertEqual(frame['epoch'].tolist(), [1, 2, 3])

    def test_model_text(self):
        circuit = compile_blocks([self.rot, self.crx], self.library)
        theta = np.random.default_rng(3).random(circuit.param_count)
        model = TrainedModel(circuit=circuit, theta=theta)
        nodes, parsed = model_from_text(model_to_text(model))
        self.assertEqual(nodes, (self.rot, self.crx))
        np.testing.assert_array_equal(parsed, theta)

        path = save_model(model, Path(self.test_dir) / 'best_model.txt')
        self.assertTrue(path.read_text().startswith("# mqne-model v1 qubits=2"))

    def test_model_text_errors(self):
        with self.assertRaises(TrainingError):
            model_from_text("not a model")
        with self.assertRaises(TrainingError):
            model_from_text("# mqne-model v1 qubits=2\npath: 1 -> x\ntheta: 0.1\n")


class TestInitialAngles(unittest.TestCase):
    """Test cases for the initialization policies."""

    @classmethod
    def setUpClass(cls):
        cls.library = enumerate_library(LibrarySpec(3))
        rot = cls.library.all_rotations_index()
        crx = cls.library.index_of(GateBlock.of(3, [Gate.crx(1, 2)]))
        cls.parent = compile_blocks([rot], cls.library)
        cls.child = compile_blocks([rot, crx, rot], cls.library)

    def test_fixed_policy_shares_prefix(self):
        config = TrainConfig(init_policy=InitPolicy.FIXED, seed=5)
        parent = initial_angles(self.parent, config)
        child = initial_angles(self.child, config)
        np.testing.assert_array_equal(child[:parent.size], parent)
        self.assertTrue(((child >= 0) & (child < 2 * np.pi)).all())

    def test_random_policy_uses_stream(self):
        config = TrainConfig(init_policy=InitPolicy.RANDOM)
        a = initial_angles(self.child, config, np.random.default_rng(1))
        b = initial_angles(self.child, config, np.random.default_rng(2))
        self.assertFalse(np.array_equal(a, b))

    def test_inherit_policy(self):
        config = TrainConfig(init_policy=InitPolicy.INHERIT)
        parent_theta = np.arange(self.parent.param_count, dtype=float)
        theta = initial_angles(self.child, config, parent_theta=parent_theta)
        np.testing.assert_array_equal(theta[:parent_theta.size], parent_theta)
        np.testing.assert_array_equal(theta[parent_theta.size:], 0.0)

    def test_inherit_rejects_longer_parent(self):
        config = TrainConfig(init_policy=InitPolicy.INHERIT)
        with self.assertRaises(CircuitDimensionError):
            initial_angles(self.parent, config, parent_theta=np.zeros(self.child.param_count))


if __name__ == '__main__':
    unittest.main()
