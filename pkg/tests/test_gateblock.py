"""Tests for gate-blocks, encoding vectors and library enumeration."""

import tempfile
import unittest
from pathlib import Path

from library import (
    EncodingVector,
    Gate,
    GateBlock,
    InvalidBlockError,
    LibraryError,
    LibraryFormatError,
    LibraryLimitError,
    LibraryMode,
    LibrarySpec,
    MalformedVectorError,
    SpecMismatchError,
    count_closed_form,
    decode_vector,
    encode_block,
    enumerate_library,
    extend_library,
    library_from_text,
    library_to_text,
    load_library,
    save_library,
    vector_length,
)


FULL_COUNTS = {1: 2, 2: 6, 3: 16, 4: 44, 5: 120, 6: 328, 7: 896, 8: 2448, 9: 6688}


class TestGateBlock(unittest.TestCase):
    """Test cases for gates and blocks."""

    def test_overlapping_gates_rejected(self):
        with self.assertRaises(InvalidBlockError):
            GateBlock.of(3, [Gate.rot(1), Gate.crx(1, 2)])

    def test_gate_outside_block_rejected(self):
        with self.assertRaises(InvalidBlockError):
            GateBlock.of(2, [Gate.rot(3)])

    def test_crx_needs_two_distinct_qubits(self):
        with self.assertRaises(InvalidBlockError):
            Gate.crx(2, 2)

    def test_counts_and_support(self):
        block = GateBlock.of(4, [Gate.crx(1, 2), Gate.rot(4)])
        self.assertEqual(block.rot_count, 1)
        self.assertEqual(block.crx_count, 1)
        self.assertEqual(block.support, frozenset({1, 2, 4}))
        self.assertFalse(block.is_empty)
        self.assertTrue(GateBlock(4).is_empty)

    def test_ordered_gates_follow_lowest_qubit(self):
        block = GateBlock.of(4, [Gate.rot(4), Gate.crx(3, 2), Gate.rot(1)])
        self.assertEqual(
            [str(g) for g in block.ordered_gates],
            ['R(1)', 'CRx(3->2)', 'R(4)'],
        )


class TestEncodingVector(unittest.TestCase):
    """Test cases for encoding and decoding blocks."""

    def test_vector_length(self):
        self.assertEqual(vector_length(7), 13)
        self.assertEqual(vector_length(1), 1)

    def test_known_vector(self):
        vec = EncodingVector.parse("1,2,5,4,0,0;0,0,3,0,0,6,0")
        block = decode_vector(vec, 7)
        self.assertEqual(
            block.gates,
            frozenset({Gate.crx(1, 2), Gate.crx(5, 4), Gate.rot(3), Gate.rot(6)}),
        )
        self.assertEqual(str(encode_block(block)), "1,2,5,4,0,0;0,0,3,0,0,6,0")

    def test_rotation_only_vector(self):
        block = GateBlock.of(7, [Gate.rot(q) for q in (1, 3, 4, 6, 7)])
        self.assertEqual(str(encode_block(block)), "0,0,0,0,0,0;1,0,3,4,0,6,7")
        self.assertEqual(decode_vector(EncodingVector.parse("0,0,0,0,0,0;1,0,3,4,0,6,7"), 7), block)

    def test_crx_pair_order_is_canonicalized(self):
        block = decode_vector((5, 4, 1, 2, 0, 0, 0, 0, 3, 0, 0, 6, 0), 7)
        self.assertEqual(encode_block(block).entries, (1, 2, 5, 4, 0, 0, 0, 0, 3, 0, 0, 6, 0))

    def test_empty_block_is_all_zeros(self):
        self.assertEqual(encode_block(GateBlock(5)).entries, (0,) * 9)

    def test_decode_errors(self):
        cases = [
            ((1, 2, 0), 2),                # wrong length
            ((1, 2, 1, 0), 2),             # qubit 1 used twice
            ((1, 0, 0, 0), 2),             # half-specified pair
            ((2, 2, 0, 0), 2),             # control equals target
            ((0, 0, 0, 3), 2),             # rotation flag not equal to position
            ((3, 0, 0, 0), 2),             # qubit out of range
        ]
        for entries, k in cases:
            with self.subTest(entries=entries):
                with self.assertRaises(MalformedVectorError):
                    decode_vector(entries, k)

    def test_non_adjacent_pair_rejected_when_adjacent_only(self):
        entries = (1, 3, 0, 2, 0)
        with self.assertRaises(MalformedVectorError):
            decode_vector(entries, 3, adjacent_only=True)
        self.assertEqual(decode_vector(entries, 3).crx_count, 1)

    def test_parse_errors(self):
        for text in ["1,2;0", "1,2,0,0", "a,b;1,2"]:
            with self.subTest(text=text):
                with self.assertRaises(MalformedVectorError):
                    EncodingVector.parse(text)


class TestLibraryCounts(unittest.TestCase):
    """Test cases for closed-form counts and enumeration."""

    def test_full_counts_match_enumeration(self):
        for k, expected in FULL_COUNTS.items():
            with self.subTest(k=k):
                spec = LibrarySpec(k)
                self.assertEqual(count_closed_form(spec), expected)
                self.assertEqual(len(enumerate_library(spec)), expected)

    def test_recurrence(self):
        for k in range(2, 9):
            with self.subTest(k=k):
                self.assertEqual(
                    FULL_COUNTS[k + 1],
                    2 * count_closed_form(LibrarySpec(k)) + 2 * count_closed_form(LibrarySpec(k - 1)),
                )

    def test_closed_form_matches_sqrt3_expression(self):
        for k in range(1, 10):
            value = ((1 + 3 ** 0.5) ** (k + 1) - (1 - 3 ** 0.5) ** (k + 1)) / (2 * 3 ** 0.5)
            self.assertEqual(round(value), FULL_COUNTS[k])

    def test_cutoff_counts(self):
        spec = LibrarySpec(7, LibraryMode.CUTOFF, cutoff=2)
        self.assertEqual(count_closed_form(spec), 17)
        library = enumerate_library(spec)
        self.assertEqual(len(library), 17)
        for block in library:
            self.assertLessEqual(block.crx_count, 2)
            self.assertEqual(len(block.support), 7)
            for gate in block.gates:
                if not gate.is_rot:
                    self.assertEqual(gate.target, gate.control + 1)

    def test_cutoff_counts_over_grid(self):
        for k in range(1, 10):
            for cutoff in range(k // 2 + 1):
                with self.subTest(k=k, cutoff=cutoff):
                    spec = LibrarySpec(k, LibraryMode.CUTOFF, cutoff=cutoff)
                    self.assertEqual(len(enumerate_library(spec)), count_closed_form(spec))

    def test_cutoff_zero_is_rotation_layer(self):
        library = enumerate_library(LibrarySpec(5, LibraryMode.CUTOFF, cutoff=0))
        self.assertEqual(list(library), [GateBlock.all_rotations(5)])

    def test_cutoff_out_of_range(self):
        with self.assertRaises(LibraryError):
            LibrarySpec(5, LibraryMode.CUTOFF, cutoff=3)
        with self.assertRaises(LibraryError):
            LibrarySpec(5, LibraryMode.CUTOFF)

    def test_minimal_mode(self):
        library = enumerate_library(LibrarySpec(5, LibraryMode.MINIMAL))
        self.assertEqual(len(library), 3)
        self.assertIn(GateBlock.all_rotations(5), library)
        self.assertIn(GateBlock.of(5, [Gate.crx(1, 2), Gate.crx(3, 4)]), library)
        self.assertIn(GateBlock.of(5, [Gate.crx(2, 3), Gate.crx(4, 5)]), library)
        with self.assertRaises(LibraryError):
            LibrarySpec(2, LibraryMode.MINIMAL)

    def test_nonadjacent_counts_match_enumeration(self):
        for k in range(1, 7):
            with self.subTest(k=k):
                spec = LibrarySpec(k, LibraryMode.NONADJACENT)
                self.assertEqual(len(enumerate_library(spec)), count_closed_form(spec))

    def test_empty_block_excluded(self):
        spec = LibrarySpec(4, include_empty_block=False)
        library = enumerate_library(spec)
        self.assertEqual(len(library), 43)
        self.assertIsNone(library.empty_index())

    def test_limit_refusal(self):
        with self.assertRaises(LibraryLimitError) as ctx:
            enumerate_library(LibrarySpec(7), max_blocks=100)
        self.assertEqual(ctx.exception.count, 896)


class TestBlockLibrary(unittest.TestCase):
    """Test cases for library ordering, indexing and extension."""

    @classmethod
    def setUpClass(cls):
        cls.library = enumerate_library(LibrarySpec(5))

    def test_order_is_lexicographic_by_vector(self):
        entries = [v.entries for v in self.library.vectors]
        self.assertEqual(entries, sorted(entries))

    def test_encoding_is_bijective(self):
        for mode in (LibraryMode.FULL, LibraryMode.NONADJACENT):
            for k in range(1, 8):
                with self.subTest(mode=mode.value, k=k):
                    spec = LibrarySpec(k, mode)
                    library = enumerate_library(spec)
                    vectors = [library.vector(i) for i in range(len(library))]
                    self.assertEqual(len({v.entries for v in vectors}), len(library))
                    for index, (block, vector) in enumerate(zip(library, vectors)):
                        self.assertEqual(encode_block(block), vector)
                        decoded = decode_vector(vector, k, adjacent_only=spec.adjacent_only)
                        self.assertEqual(decoded, block)
                        self.assertEqual(encode_block(decoded).entries, vector.entries)
                        self.assertEqual(library.index_of(block), index)

    def test_enumeration_is_stable(self):
        again = enumerate_library(LibrarySpec(5))
        self.assertEqual(again.vectors, self.library.vectors)

    def test_all_rotations_index(self):
        index = self.library.all_rotations_index()
        self.assertEqual(self.library[index], GateBlock.all_rotations(5))

    def test_unknown_block(self):
        with self.assertRaises(LibraryError):
            self.library.index_of(GateBlock.of(5, [Gate.crx(1, 3)]))

    def test_extend_library(self):
        for low in (1, 3, 6):
            with self.subTest(qubits=(low, low + 1)):
                extended = extend_library(
                    enumerate_library(LibrarySpec(low)), enumerate_library(LibrarySpec(low + 1))
                )
                self.assertEqual(len(extended), FULL_COUNTS[low + 2])
                self.assertEqual(extended.vectors, enumerate_library(LibrarySpec(low + 2)).vectors)

    def test_extend_requires_consecutive_full_libraries(self):
        lib3 = enumerate_library(LibrarySpec(3))
        with self.assertRaises(SpecMismatchError):
            extend_library(lib3, self.library)
        cutoff = enumerate_library(LibrarySpec(4, LibraryMode.CUTOFF, cutoff=1))
        with self.assertRaises(SpecMismatchError):
            extend_library(lib3, cutoff)


class TestLibraryFiles(unittest.TestCase):
    """Test cases for library text files."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        import shutil
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_save_and_load(self):
        library = enumerate_library(LibrarySpec(7))
        path = save_library(library, Path(self.test_dir) / 'k7.txt')
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "# k=7 mode=full include_empty=true count=896")
        self.assertEqual(len(lines), 897)

        loaded = load_library(path)
        self.assertEqual(loaded.spec, library.spec)
        self.assertEqual(loaded.vectors, library.vectors)

    def test_cutoff_header(self):
        library = enumerate_library(LibrarySpec(4, LibraryMode.CUTOFF, cutoff=1))
        loaded = library_from_text(library_to_text(library))
        self.assertEqual(loaded.spec.cutoff, 1)
        self.assertEqual(len(loaded), 4)

    def test_count_mismatch(self):
        text = library_to_text(enumerate_library(LibrarySpec(2)))
        text = text.replace("count=6", "count=7")
        with self.assertRaises(LibraryFormatError):
            library_from_text(text)

    def test_malformed_line_reports_line_number(self):
        text = "# k=2 mode=full include_empty=true count=1\n1,2;0\n"
        with self.assertRaises(LibraryFormatError) as ctx:
            library_from_text(text)
        self.assertIn("Line 2", str(ctx.exception))

    def test_missing_header(self):
        with self.assertRaises(LibraryFormatError):
            library_from_text("0,0;0,0\n")

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_library(Path(self.test_dir) / 'missing.txt')


if __name__ == '__main__':
    unittest.main()
