"""Tests for connection rules, the block graph and path sampling."""

import tempfile
import unittest
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path as FilePath

import numpy as np

from graph import (
    DeadEndError,
    DimensionMismatchError,
    GraphError,
    GraphLimitError,
    InvalidPathError,
    Path,
    StartPolicy,
    allowed_successor,
    build_graph,
    extend_path,
    find_dead_ends,
    graph_to_text,
    load_path,
    path_from_text,
    path_to_text,
    random_path,
    save_path,
    validate_path,
)
from library import Gate, GateBlock, LibraryMode, LibrarySpec, enumerate_library


def brute_force_successor(x: GateBlock, y: GateBlock) -> bool:
    """Support and novelty rules evaluated gate by gate, qubit by qubit."""
    used = set()
    for gate in x.gates:
        used.update(gate.qubits)
    for gate in y.gates:
        if not any(q in used for q in gate.qubits):
            return False
        for other in x.gates:
            if other.kind == gate.kind and other.qubits == gate.qubits:
                return False
    return True


class TestConnectionRules(unittest.TestCase):
    """Test cases for allowed_successor."""

    def test_identical_blocks(self):
        block = GateBlock.of(3, [Gate.crx(1, 2), Gate.rot(3)])
        self.assertFalse(allowed_successor(block, block))

    def test_parallel_rotation_rejected(self):
        x = GateBlock.of(4, [Gate.rot(1), Gate.rot(2)])
        self.assertFalse(allowed_successor(x, GateBlock.of(4, [Gate.rot(3)])))
        self.assertFalse(allowed_successor(x, GateBlock.of(4, [Gate.crx(1, 2), Gate.rot(3)])))
        self.assertTrue(allowed_successor(x, GateBlock.of(4, [Gate.crx(1, 2)])))

    def test_full_overlap(self):
        x = GateBlock.of(2, [Gate.crx(1, 2)])
        self.assertTrue(allowed_successor(x, GateBlock.all_rotations(2)))

    def test_reversed_crx_is_a_different_gate(self):
        x = GateBlock.of(2, [Gate.crx(1, 2)])
        self.assertTrue(allowed_successor(x, GateBlock.of(2, [Gate.crx(2, 1)])))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            allowed_successor(GateBlock.all_rotations(2), GateBlock.all_rotations(3))


class TestBuildGraph(unittest.TestCase):
    """Test cases for adjacency construction."""

    def assert_matches_brute_force(self, library, exclude_empty):
        graph = build_graph(library, exclude_empty=exclude_empty)
        adjacency = graph.adjacency()
        empty = library.empty_index()
        for x, y in product(range(len(library)), repeat=2):
            expected = x != y and brute_force_successor(library[x], library[y])
            if exclude_empty and empty in (x, y):
                expected = False
            self.assertEqual(bool(adjacency[x, y]), expected, f"{library[x]} -> {library[y]}")
        return graph

    def test_matches_brute_force_small_k(self):
        for k in (2, 3, 4):
            library = enumerate_library(LibrarySpec(k))
            for exclude_empty in (True, False):
                with self.subTest(k=k, exclude_empty=exclude_empty):
                    self.assert_matches_brute_force(library, exclude_empty)

    def test_matches_brute_force_other_modes(self):
        for spec in (
            LibrarySpec(4, LibraryMode.NONADJACENT),
            LibrarySpec(4, LibraryMode.CUTOFF, cutoff=1),
        ):
            with self.subTest(spec=spec.describe()):
                self.assert_matches_brute_force(enumerate_library(spec), True)

    def test_k2_examples(self):
        library = enumerate_library(LibrarySpec(2))
        graph = build_graph(library)
        self.assertEqual(graph.node_count, 5)
        both = library.index_of(GateBlock.all_rotations(2))
        crx = library.index_of(GateBlock.of(2, [Gate.crx(1, 2)]))
        r1 = library.index_of(GateBlock.of(2, [Gate.rot(1)]))
        r2 = library.index_of(GateBlock.of(2, [Gate.rot(2)]))
        self.assertTrue(graph.has_edge(both, crx))
        self.assertFalse(graph.has_edge(r1, r2))

    def test_no_self_loops(self):
        graph = build_graph(enumerate_library(LibrarySpec(5)))
        self.assertFalse(np.diag(graph.adjacency()).any())

    def test_full_graph_has_no_dead_ends(self):
        for k in (2, 3, 5, 7):
            with self.subTest(k=k):
                graph = build_graph(enumerate_library(LibrarySpec(k)))
                self.assertIsNone(find_dead_ends(graph))

    def test_k9_node_count(self):
        library = enumerate_library(LibrarySpec(9))
        self.assertEqual(len(library), 6688)
        graph = build_graph(library)
        self.assertEqual(graph.node_count, 6687)

    def test_workers_and_chunks_do_not_change_graph(self):
        library = enumerate_library(LibrarySpec(6))
        reference = build_graph(library)
        threaded = build_graph(library, workers=4, chunk_rows=17)
        self.assertEqual(reference.digest(), threaded.digest())
        self.assertEqual(reference.edge_count, threaded.edge_count)

    def test_successors_from_concurrent_threads(self):
        graph = build_graph(enumerate_library(LibrarySpec(5)))
        nodes = [int(x) for x in graph.nodes] * 4
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(graph.successors, nodes))
        dense = graph.adjacency()
        for x, successors in zip(nodes, results):
            np.testing.assert_array_equal(successors, np.flatnonzero(dense[x]))
            self.assertIs(graph.successors(x), successors)

    def test_node_limit(self):
        with self.assertRaises(GraphLimitError):
            build_graph(enumerate_library(LibrarySpec(5)), max_nodes=50)

    def test_single_qubit_rejected(self):
        with self.assertRaises(GraphError):
            build_graph(enumerate_library(LibrarySpec(1)))

    def test_adjacency_text(self):
        library = enumerate_library(LibrarySpec(2))
        graph = build_graph(library)
        lines = graph_to_text(graph).splitlines()
        self.assertTrue(lines[0].startswith("# nodes=5"))
        self.assertIn(graph.digest(), lines[0])
        self.assertEqual(len(lines), 6)
        for line in lines[1:]:
            node, successors = line.split(":")
            expected = [int(y) for y in graph.successors(int(node))]
            self.assertEqual([int(y) for y in successors.split()], expected)
            self.assertEqual(graph.out_degree(int(node)), len(expected))


class TestPaths(unittest.TestCase):
    """Test cases for random walks and path validation."""

    @classmethod
    def setUpClass(cls):
        cls.library = enumerate_library(LibrarySpec(7))
        cls.graph = build_graph(cls.library)

    def test_single_node_path(self):
        path = random_path(self.graph, 1, StartPolicy.fixed(12), np.random.default_rng(0))
        self.assertEqual(path.nodes, (12,))

    def test_default_start_is_all_rotations(self):
        path = random_path(self.graph, 3, StartPolicy(), np.random.default_rng(1))
        self.assertEqual(path.nodes[0], self.library.all_rotations_index())
        self.assertEqual(len(path), 3)

    def test_sampled_paths_obey_rules(self):
        rng = np.random.default_rng(2024)
        policy = StartPolicy.uniform()
        for _ in range(10_000):
            path = extend_path(self.graph, random_path(self.graph, 4, policy, rng), 2, rng)
            self.assertEqual(len(path), 6)
            for x, y in zip(path.nodes, path.nodes[1:]):
                self.assertTrue(brute_force_successor(self.library[x], self.library[y]))
                self.assertNotEqual(x, y)

    def test_extend_by_zero(self):
        path = Path((3, 5))
        self.assertEqual(extend_path(self.graph, path, 0, np.random.default_rng(0)), path)

    def test_extension_depends_only_on_last_node(self):
        start = random_path(self.graph, 3, StartPolicy.uniform(), np.random.default_rng(5))
        other = random_path(self.graph, 1, StartPolicy.fixed(start.last), np.random.default_rng(9))
        a = extend_path(self.graph, start, 4, np.random.default_rng(77))
        b = extend_path(self.graph, other, 4, np.random.default_rng(77))
        self.assertEqual(a.nodes[3:], b.nodes[1:])

    def test_transitions_are_uniform(self):
        graph = build_graph(enumerate_library(LibrarySpec(3)))
        start = graph.library.all_rotations_index()
        successors = graph.successors(start)
        rng = np.random.default_rng(11)
        draws = 30_000
        counts = {int(s): 0 for s in successors}
        for _ in range(draws):
            counts[extend_path(graph, Path((start,)), 1, rng).last] += 1
        p = 1 / successors.size
        sigma = np.sqrt(draws * p * (1 - p))
        for node, count in counts.items():
            self.assertLess(abs(count - draws * p), 5 * sigma, f"successor {node}")

    def test_validate_path(self):
        path = random_path(self.graph, 5, StartPolicy(), np.random.default_rng(3))
        validate_path(self.graph, path)

        x = self.library.index_of(GateBlock.of(7, [Gate.rot(1), Gate.rot(2)]))
        y = self.library.index_of(GateBlock.of(7, [Gate.rot(3)]))
        with self.assertRaises(InvalidPathError) as ctx:
            validate_path(self.graph, Path((x, y)))
        self.assertIn(f"{x} -> {y}", str(ctx.exception))

    def test_validate_rejects_excluded_node(self):
        empty = self.library.empty_index()
        with self.assertRaises(InvalidPathError):
            validate_path(self.graph, Path((empty,)))

    def test_fixed_start_must_be_a_node(self):
        with self.assertRaises(GraphError):
            random_path(self.graph, 2, StartPolicy.fixed(self.library.empty_index()), np.random.default_rng(0))

    def test_path_parsing(self):
        self.assertEqual(Path.parse("4257 -> 6687 -> 12").nodes, (4257, 6687, 12))
        self.assertEqual(str(Path((1, 2))), "1 -> 2")
        self.assertEqual(path_from_text(path_to_text(Path((5, 3)))).nodes, (5, 3))
        with self.assertRaises(InvalidPathError):
            Path.parse("1 -> x")
        with self.assertRaises(InvalidPathError):
            Path(())

    def test_path_file(self):
        test_dir = tempfile.mkdtemp()
        try:
            target = save_path(Path((7, 8, 9)), FilePath(test_dir) / 'best_path.txt')
            self.assertEqual(load_path(target).nodes, (7, 8, 9))
        finally:
            import shutil
            shutil.rmtree(test_dir, ignore_errors=True)


class TestDeadEnds(unittest.TestCase):
    """Test cases for restricted libraries whose graphs contain dead ends."""

    def test_cutoff_zero_graph(self):
        graph = build_graph(enumerate_library(LibrarySpec(3, LibraryMode.CUTOFF, cutoff=0)))
        self.assertEqual(graph.node_count, 1)
        dead = find_dead_ends(graph)
        self.assertEqual(dead.tolist(), [0])
        with self.assertRaises(DeadEndError):
            random_path(graph, 2, StartPolicy(), np.random.default_rng(0))


if __name__ == '__main__':
    unittest.main()
