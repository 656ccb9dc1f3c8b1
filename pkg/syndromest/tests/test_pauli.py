# Pauli algebra and syndrome unit testing
"""Unit testing for Pauli strings, syndromes, and logical classes."""

import unittest

import numpy as np

from syndromest.io import libsyn
from syndromest.qec import codes, pauli


class TestPauliString(unittest.TestCase):

    def test_label_round_trip(self):
        p = pauli.PauliString.from_label("XZZXI")
        self.assertEqual(p.label, "XZZXI")
        self.assertEqual(p.weight, 4)
        self.assertIs(p[2], pauli.Pauli.Z)
        np.testing.assert_array_equal(p.indices(), [1, 3, 3, 1, 0])

    def test_products(self):
        x = pauli.PauliString.from_label("X")
        z = pauli.PauliString.from_label("Z")
        self.assertEqual((x * z).label, "Y")
        self.assertTrue((x * x).is_identity())
        self.assertIs(pauli.Pauli.X * pauli.Pauli.Y, pauli.Pauli.Z)
        self.assertEqual(pauli.PRODUCT_TABLE[2, 3], pauli.Pauli.X.value)

    def test_commutes(self):
        a = pauli.PauliString.from_label("XX")
        b = pauli.PauliString.from_label("ZZ")
        c = pauli.PauliString.from_label("ZI")
        self.assertTrue(pauli.commutes(a, b))
        self.assertFalse(pauli.commutes(a, c))
        with self.assertRaises(libsyn.DimensionError):
            pauli.commutes(a, pauli.PauliString.from_label("X"))

    def test_invalid_letter(self):
        with self.assertRaises(libsyn.ConfigError):
            pauli.PauliString.from_label("XQ")

    def test_syndrome_bits(self):
        s = pauli.Syndrome.from_bits([1, 0, 1])
        self.assertEqual(s.value, 0b101)
        self.assertEqual(str(s), "101")
        self.assertEqual((s ^ pauli.Syndrome(3, 0b001)).value, 0b100)
        with self.assertRaises(libsyn.DimensionError):
            pauli.Syndrome(2, 4)


class TestCodeSyndromes(unittest.TestCase):

    def setUp(self):
        self.code = codes.five_qubit_code()

    def test_single_errors_perfect(self):
        self.assertTrue(self.code.is_perfect)
        synds = self.code.single_error_syndromes
        self.assertEqual(synds.shape, (5, 4))
        np.testing.assert_array_equal(synds[:, 0], 0)
        self.assertEqual(
            sorted(synds[:, 1:].ravel().tolist()), list(range(1, 16)))

    def test_syndrome_matches_commutation(self):
        e = pauli.PauliString.from_label("YIZXI")
        s = pauli.syndrome(self.code, e)
        expected = [int(not pauli.commutes(e, g))
                    for g in self.code.generators]
        self.assertEqual(list(s.bits), expected)

    def test_syndrome_inverse(self):
        for value in range(1, 16):
            s = pauli.Syndrome(4, value)
            e = pauli.syndrome_inverse(self.code, s)
            self.assertEqual(e.weight, 1)
            self.assertEqual(pauli.syndrome(self.code, e), s)
        with self.assertRaises(libsyn.ConfigError):
            pauli.syndrome_inverse(self.code, pauli.Syndrome(4, 0))

    def test_logical_classes(self):
        for g in self.code.generators:
            self.assertTrue(pauli.logical_class(self.code, g).is_trivial())
        x_l, z_l = self.code.logicals[0]
        self.assertIs(pauli.logical_class(self.code, x_l).value,
                      pauli.Pauli.X)
        self.assertIs(pauli.logical_class(self.code, x_l * z_l).value,
                      pauli.Pauli.Y)

    def test_class_values_match_logical_class(self):
        rng = np.random.default_rng(11)
        x, z = pauli.all_strings(5)
        picks = rng.choice(len(x), 40, replace=False)
        classes = self.code.class_values(x[picks], z[picks])
        for idx, cls in zip(picks, classes):
            e = pauli.PauliString(5, int(x[idx]), int(z[idx]))
            self.assertEqual(
                pauli.logical_class(self.code, e).value.value, cls)

    def test_pure_error(self):
        for value in range(16):
            s = pauli.Syndrome(4, value)
            self.assertEqual(
                pauli.syndrome(self.code, self.code.pure_error(s)), s)

    def test_enumerate_coset(self):
        s = pauli.Syndrome(4, 0b0110)
        coset = pauli.enumerate_coset(self.code, s)
        self.assertEqual(len(coset), 4 ** 5 // 2 ** 4)
        self.assertTrue(all(pauli.syndrome(self.code, e) == s for e in coset))
        labels = [e.label for e in coset]
        self.assertEqual(len(set(labels)), len(labels))

    def test_assignment_order(self):
        digits = pauli.assignment_digits(2)
        np.testing.assert_array_equal(digits[1], [0, 1])
        np.testing.assert_array_equal(digits[4], [1, 0])
        x, z = pauli.all_strings(2)
        # index 4 is "XI": X on qubit 1
        self.assertEqual((int(x[4]), int(z[4])), (1, 0))

    def test_enumeration_budget(self):
        with self.assertRaises(libsyn.BudgetError):
            pauli.all_strings(40)


if __name__ == "__main__":
    unittest.main(verbosity=2)
