# Tree decoder unit testing
"""Unit testing for sum-product and max-sum decoding against brute-force
enumeration."""

import math
import time
import unittest

import numpy as np

from syndromest.io import libsyn
from syndromest.infer import decoder, estimate
from syndromest.qec import codes, noise, pauli


def _random_rates(n_leaves, rng, hi=0.08):
    return noise.SingleQubitPauliRates(rng.uniform(0.005, hi, (n_leaves, 3)))


def _brute_force(tree, rates):
    """Joint probabilities of syndrome values, root classes, and leaf
    Paulis by enumerating every leaf error."""
    digits = pauli.assignment_digits(tree.n_leaves)
    table = rates.table()
    probs = np.prod(table[np.arange(tree.n_leaves), digits], axis=1)
    bits, root = tree.evaluate(digits)
    synd = bits.astype(np.int64) @ (1 << np.arange(tree.n_bits))
    return digits, probs, synd, root


def _value_bits(values, n_bits):
    return ((np.asarray(values)[:, None] >> np.arange(n_bits)) & 1).astype(
        np.uint8)


class TestBlockFactorTable(unittest.TestCase):

    def test_groups(self):
        for code, size in ((codes.five_qubit_code(), 64),
                           (codes.repetition_code(3), 4)):
            tree = codes.concatenate(codes.ConcatSpec(code, 1))
            table = decoder.BlockFactorTable.from_tree(tree)
            self.assertEqual(table.group_size, size)
            members = table.members(3, 2)
            np.testing.assert_array_equal(table.syndromes[members], 3)
            np.testing.assert_array_equal(table.classes[members], 2)
            self.assertEqual(table.class_members.shape, (4, 4 ** code.n // 4))


class TestSumProduct(unittest.TestCase):

    def test_level_one_matches_enumeration(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        values = np.arange(16)
        for seed in range(20):
            with self.subTest(seed=seed):
                rates = _random_rates(5, np.random.default_rng(seed))
                graph = decoder.build_factor_graph(tree, rates)
                digits, probs, synd, root = _brute_force(tree, rates)
                result = decoder.run_bp(graph, _value_bits(values, 4))
                p_s = np.bincount(synd, weights=probs, minlength=16)
                np.testing.assert_allclose(
                    np.exp(result.loglik), p_s, rtol=1e-10)
                joint = np.zeros((16, 4))
                np.add.at(joint, (synd, root), probs)
                np.testing.assert_allclose(
                    result.root, joint / p_s[:, None], atol=1e-12)
                for q in range(5):
                    leaf = np.zeros((16, 4))
                    np.add.at(leaf, (synd, digits[:, q]), probs)
                    np.testing.assert_allclose(
                        result.leaves[:, q], leaf / p_s[:, None], atol=1e-12)

    def test_level_two_matches_enumeration(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.repetition_code(3), 2))
        self.assertEqual((tree.n_leaves, tree.n_bits), (9, 8))
        rates = _random_rates(9, np.random.default_rng(2), hi=0.2)
        graph = decoder.build_factor_graph(tree, rates)
        digits, probs, synd, root = _brute_force(tree, rates)
        values = np.arange(256)
        result = decoder.run_bp(graph, _value_bits(values, 8))
        p_s = np.bincount(synd, weights=probs, minlength=256)
        np.testing.assert_allclose(np.exp(result.loglik), p_s, rtol=1e-9)
        self.assertAlmostEqual(math.fsum(np.exp(result.loglik)), 1.0)
        joint = np.zeros((256, 4))
        np.add.at(joint, (synd, root), probs)
        np.testing.assert_allclose(
            result.root, joint / p_s[:, None], atol=1e-10)
        for q in range(9):
            leaf = np.zeros((256, 4))
            np.add.at(leaf, (synd, digits[:, q]), probs)
            np.testing.assert_allclose(
                result.leaves[:, q], leaf / p_s[:, None], atol=1e-10)

    def test_runtime_scales_with_blocks(self):
        code = codes.five_qubit_code()
        rng = np.random.default_rng(9)
        timings = []
        n_factors = []
        for levels in (2, 3):
            tree = codes.concatenate(codes.ConcatSpec(code, levels))
            truth = noise.SingleQubitPauliRates.depolarizing(
                tree.n_leaves, 0.02)
            graph = decoder.build_factor_graph(tree, truth)
            bits, _, _ = decoder.sample_syndromes(tree, truth, 256, rng)
            decoder.run_bp(graph, bits)
            best = np.inf
            for _ in range(7):
                start = time.perf_counter()
                decoder.run_bp(graph, bits)
                best = min(best, time.perf_counter() - start)
            timings.append(best)
            n_factors.append(graph.n_factors)
        # 6 blocks at two levels, 31 at three
        self.assertEqual(n_factors, [6, 31])
        ratio = timings[1] / timings[0]
        self.assertGreaterEqual(ratio, 4)
        self.assertLessEqual(ratio, 6)

    def test_measurement_flips_match_enumeration(self):
        code = codes.repetition_code(3)
        tree = codes.concatenate(codes.ConcatSpec(code, 1))
        rates = noise.SingleQubitPauliRates(
            [[0.1, 0.02, 0.05], [0.05, 0.01, 0.02], [0.08, 0.03, 0.01]],
            [0.04, 0.07])
        graph = decoder.build_factor_graph(tree, rates)
        self.assertEqual(graph.n_variables, 3 + 1 + 2)
        model = rates.to_model(code)
        table = noise.enumerate_assignments(model)
        observed = table.observed_syndromes(code)
        p_s = np.bincount(observed, weights=table.probs, minlength=4)
        result = decoder.run_bp(graph, _value_bits(np.arange(4), 2))
        np.testing.assert_allclose(np.exp(result.loglik), p_s, rtol=1e-10)
        for bit in range(2):
            flipped = ((table.flips >> np.uint64(bit)) & np.uint64(1)).astype(
                bool)
            expect = np.bincount(observed[flipped],
                                 weights=table.probs[flipped], minlength=4)
            np.testing.assert_allclose(
                result.flips[:, bit], expect / p_s, atol=1e-12)

    def test_single_syndrome_helpers(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        graph = decoder.build_factor_graph(
            tree, noise.SingleQubitPauliRates.depolarizing(5, 0.02))
        s = pauli.Syndrome(4, 0)
        root, loglik = decoder.bp_root_marginal(graph, s)
        self.assertEqual(int(np.argmax(root)), 0)
        self.assertLess(loglik, 0)
        post = decoder.bp_leaf_posteriors(graph, s)
        self.assertIsNone(post.flips)
        np.testing.assert_allclose(post.leaves.sum(axis=1), 1)

    def test_zero_support(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        rates = np.zeros((5, 3))
        rates[0, 0] = 0.1
        graph = decoder.build_factor_graph(tree, rates)
        code = tree.base
        z1 = code.single_error_syndromes[0, pauli.Pauli.Z.value]
        bits = _value_bits([0, z1], 4)
        with self.assertRaises(libsyn.ZeroSupportError):
            decoder.run_bp(graph, bits)
        result = decoder.run_bp(graph, bits, strict=False)
        np.testing.assert_array_equal(result.zero_support, [False, True])
        self.assertEqual(result.loglik[1], -np.inf)
        np.testing.assert_array_equal(
            decoder.decode_classes(graph, bits), [0, -1])

    def test_dimension_checks(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        with self.assertRaises(libsyn.DimensionError):
            decoder.build_factor_graph(tree, np.full((4, 3), 0.01))
        graph = decoder.build_factor_graph(tree, np.full((5, 3), 0.01))
        with self.assertRaises(libsyn.DimensionError):
            decoder.run_bp(graph, np.zeros((1, 3), dtype=np.uint8))


class TestMaxSum(unittest.TestCase):

    def test_level_one_map(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        rates = _random_rates(5, np.random.default_rng(3))
        graph = decoder.build_factor_graph(tree, rates)
        digits, probs, synd, _ = _brute_force(tree, rates)
        result = decoder.run_max_sum(graph, _value_bits(np.arange(16), 4))
        table = rates.table()
        for s in range(16):
            best = np.max(probs[synd == s])
            got = np.prod(table[np.arange(5), result.paulis[s]])
            self.assertAlmostEqual(got, best, delta=1e-15)
            bits, _ = tree.evaluate(result.paulis[s][None])
            self.assertEqual(
                pauli.Syndrome.from_bits(bits[0]).value, s)

    def test_map_error_event(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        graph = decoder.build_factor_graph(
            tree, noise.SingleQubitPauliRates.depolarizing(5, 0.01))
        code = tree.base
        e = pauli.PauliString.from_label("IIYII")
        event = decoder.map_error(graph, pauli.syndrome(code, e))
        self.assertEqual(event.data, e)
        self.assertEqual(event.flips, 0)

    def test_equal_rates_tie_break(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.repetition_code(3), 1))
        graph = decoder.build_factor_graph(
            tree, noise.SingleQubitPauliRates.depolarizing(3, 0.1))
        # X1 and Y1 are equally likely for syndrome 01
        result = decoder.run_max_sum(graph, _value_bits([1], 2))
        self.assertGreater(result.n_ties, 0)
        np.testing.assert_array_equal(
            result.paulis[0], [pauli.Pauli.X.value, 0, 0])


class TestLogicalErrorRate(unittest.TestCase):

    def test_clopper_pearson(self):
        lower, upper = decoder.clopper_pearson(0, 100)
        self.assertEqual(lower, 0.0)
        self.assertAlmostEqual(upper, 1 - 0.025 ** (1 / 100), places=10)
        lower, upper = decoder.clopper_pearson(50, 100)
        self.assertLess(lower, 0.5)
        self.assertGreater(upper, 0.5)

    def test_sampled_rate_brackets_exact(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        truth = noise.SingleQubitPauliRates.depolarizing(5, 0.05)
        graph = decoder.build_factor_graph(tree, truth)
        exact = decoder.exact_logical_error_rate(graph, truth)
        self.assertGreater(exact, 0)
        ler = decoder.logical_error_rate(
            graph, truth, 4000, np.random.default_rng(4))
        self.assertEqual(ler.n_trials, 4000)
        # within 5 sigma of the binomial fraction
        sigma = math.sqrt(exact * (1 - exact) / 4000)
        self.assertLess(abs(ler.rate - exact), 5 * sigma)
        self.assertLessEqual(ler.lower, ler.rate)
        self.assertGreaterEqual(ler.upper, ler.rate)

    def test_perfect_knowledge_beats_perturbed_rates(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 2))
        truth = noise.SingleQubitPauliRates.depolarizing(25, 0.1)
        rng = np.random.default_rng(12)
        perturbed = estimate.sample_dirichlet_init(20, 0.1, 25, rng)
        bits, root, _ = decoder.sample_syndromes(tree, truth, 4000, rng)
        failures = []
        for rates in (truth, perturbed):
            graph = decoder.build_factor_graph(tree, rates)
            failures.append(
                int(np.sum(decoder.decode_classes(graph, bits) != root)))
        self.assertLess(failures[0], failures[1])

    def test_sample_syndromes_consistent(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 2))
        truth = noise.SingleQubitPauliRates.depolarizing(25, 0.02)
        bits, root, leaf_paulis = decoder.sample_syndromes(
            tree, truth, 64, np.random.default_rng(8))
        self.assertEqual(bits.shape, (64, 24))
        again, again_root = tree.evaluate(leaf_paulis)
        np.testing.assert_array_equal(bits, again)
        np.testing.assert_array_equal(root, again_root)

    def test_exact_rate_level_check(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 2))
        truth = noise.SingleQubitPauliRates.depolarizing(25, 0.02)
        graph = decoder.build_factor_graph(tree, truth)
        with self.assertRaises(libsyn.UnsupportedCodeError):
            decoder.exact_logical_error_rate(graph, truth)


if __name__ == "__main__":
    unittest.main(verbosity=2)
