# Fisher information unit testing
"""Unit testing for scores, Fisher matrices, and Cramer-Rao bounds."""

import unittest

import numpy as np

from syndromest.io import libsyn
from syndromest.infer import decoder
from syndromest.qec import codes, noise
from syndromest.settings import config
from syndromest.stats import fisher


def _all_bits(n_bits):
    return ((np.arange(2 ** n_bits)[:, None] >> np.arange(n_bits)) & 1
            ).astype(np.uint8)


def _level_one(code, rates):
    tree = codes.concatenate(codes.ConcatSpec(code, 1))
    return decoder.build_factor_graph(tree, rates)


class TestScores(unittest.TestCase):

    def _check_finite_differences(self, graph, h=1e-6):
        rates = graph.rates
        bits = _all_bits(graph.n_bits)
        scores = fisher.score(graph, bits)
        vec = rates.param_vector()
        for col in range(len(vec)):
            up = vec.copy()
            up[col] += h
            down = vec.copy()
            down[col] -= h
            ll_up = decoder.run_bp(graph.with_rates(
                noise.SingleQubitPauliRates.from_param_vector(
                    up, rates.n, rates.n_bits)), bits, posteriors=False).loglik
            ll_down = decoder.run_bp(graph.with_rates(
                noise.SingleQubitPauliRates.from_param_vector(
                    down, rates.n, rates.n_bits)), bits,
                posteriors=False).loglik
            np.testing.assert_allclose(
                scores[:, col], (ll_up - ll_down) / (2 * h),
                rtol=1e-5, atol=1e-6, err_msg="parameter {}".format(col))

    def test_finite_differences_five_qubit(self):
        rng = np.random.default_rng(31)
        rates = noise.SingleQubitPauliRates(rng.uniform(0.01, 0.08, (5, 3)))
        self._check_finite_differences(
            _level_one(codes.five_qubit_code(), rates))

    def test_finite_differences_with_flips(self):
        rates = noise.SingleQubitPauliRates(
            [[0.05, 0.02, 0.03], [0.04, 0.01, 0.06], [0.07, 0.02, 0.02]],
            [0.03, 0.05])
        self._check_finite_differences(
            _level_one(codes.repetition_code(3), rates))

    def test_mean_score_vanishes(self):
        rng = np.random.default_rng(32)
        rates = noise.SingleQubitPauliRates(rng.uniform(0.01, 0.08, (5, 3)))
        graph = _level_one(codes.five_qubit_code(), rates)
        bits = _all_bits(4)
        probs = np.exp(decoder.run_bp(graph, bits, posteriors=False).loglik)
        np.testing.assert_allclose(
            probs @ fisher.score(graph, bits), 0, atol=1e-10)

    def test_boundary_rates_rejected(self):
        rates = np.full((5, 3), 0.02)
        rates[2, 1] = 0.0
        graph = _level_one(codes.five_qubit_code(), rates)
        with self.assertRaises(libsyn.PositivityError):
            fisher.score(graph, _all_bits(4))

    def test_model_scores_match_graph(self):
        code = codes.five_qubit_code()
        rng = np.random.default_rng(33)
        rates = noise.SingleQubitPauliRates(rng.uniform(0.01, 0.08, (5, 3)))
        p_s, scores = fisher.model_scores(rates.to_model(code), code)
        graph = _level_one(code, rates)
        np.testing.assert_allclose(
            scores, fisher.score(graph, _all_bits(4)), rtol=1e-9, atol=1e-9)
        self.assertAlmostEqual(np.sum(p_s), 1.0)


class TestFisherMatrices(unittest.TestCase):

    def setUp(self):
        self.code = codes.five_qubit_code()
        rng = np.random.default_rng(34)
        self.rates = noise.SingleQubitPauliRates(
            rng.uniform(0.02, 0.1, (5, 3)))
        self.graph = _level_one(self.code, self.rates)

    def test_exact_is_psd_and_matches_model(self):
        exact = fisher.fisher_exact(self.graph)
        self.assertEqual(exact.mode, config.FisherModes.EXACT)
        self.assertEqual(exact.matrix.shape, (15, 15))
        self.assertTrue(exact.is_psd())
        np.testing.assert_array_equal(exact.matrix, exact.matrix.T)
        from_model = fisher.fisher_exact(
            self.rates.to_model(self.code), self.code)
        np.testing.assert_allclose(
            from_model.matrix, exact.matrix, rtol=1e-8, atol=1e-8)
        self.assertEqual(from_model.labels, exact.labels)

    def test_monte_carlo(self):
        exact = fisher.fisher_exact(self.graph)
        mc = fisher.fisher_mc(
            self.graph, 20000, np.random.default_rng(35), chunk_size=1000)
        self.assertEqual(mc.n_samples, 20000)
        self.assertTrue(mc.is_psd())
        err = (np.linalg.norm(mc.matrix - exact.matrix)
               / np.linalg.norm(exact.matrix))
        self.assertLess(err, 0.1)
        again = fisher.fisher_mc(
            self.graph, 20000, np.random.default_rng(35), chunk_size=1000)
        np.testing.assert_array_equal(again.matrix, mc.matrix)

    def test_exact_budget(self):
        tree = codes.concatenate(codes.ConcatSpec(self.code, 2))
        graph = decoder.build_factor_graph(
            tree, noise.SingleQubitPauliRates.depolarizing(25, 0.01))
        with self.assertRaises(libsyn.BudgetError):
            fisher.fisher_exact(graph)

    def test_model_source_needs_code(self):
        with self.assertRaises(libsyn.ConfigError):
            fisher.fisher_exact(self.rates.to_model(self.code))

    def test_direct_dominates_syndrome(self):
        direct = fisher.fisher_direct(self.rates)
        self.assertEqual(direct.mode, config.FisherModes.DIRECT)
        # one qubit block is diag(1 / theta_e) + 1 / theta_I
        row = self.rates.table()[0]
        np.testing.assert_allclose(
            direct.matrix[:3, :3], np.diag(1 / row[1:]) + 1 / row[0])
        np.testing.assert_array_equal(direct.matrix[:3, 3:], 0)
        gap = fisher.loewner_gap(direct, fisher.fisher_exact(self.graph))
        self.assertTrue(gap.holds)
        self.assertGreater(gap.trace_ratio, 1)

    def test_direct_with_flips(self):
        rates = noise.SingleQubitPauliRates.depolarizing(3, 0.05, 2, 0.1)
        direct = fisher.fisher_direct(rates)
        self.assertEqual(direct.matrix.shape, (11, 11))
        self.assertAlmostEqual(direct.matrix[-1, -1], 1 / 0.09)


class TestCRB(unittest.TestCase):

    def test_bounds_scale_with_m(self):
        code = codes.five_qubit_code()
        rates = noise.SingleQubitPauliRates.depolarizing(5, 0.05)
        info = fisher.fisher_exact(rates.to_model(code), code)
        one = fisher.crb(info, 1000)
        two = fisher.crb(info, 2000)
        self.assertFalse(one.pseudo_inverse)
        self.assertEqual(one.rank, 15)
        np.testing.assert_allclose(two.bounds, one.bounds / 2, rtol=1e-12)
        np.testing.assert_allclose(
            one.bounds, np.diag(np.linalg.inv(info.matrix)) / 1000,
            rtol=1e-6)
        out = one.to_dict()
        self.assertEqual(out["m"], 1000)
        self.assertIn("q1_X", out["bounds"])

    def test_singular_uses_pseudo_inverse(self):
        # Z errors never change the repetition syndrome
        code = codes.repetition_code(3)
        rates = noise.SingleQubitPauliRates.depolarizing(3, 0.05)
        info = fisher.fisher_exact(rates.to_model(code), code)
        with self.assertWarns(UserWarning):
            report = fisher.crb(info, 100)
        self.assertTrue(report.pseudo_inverse)
        self.assertLess(report.rank, 9)
        self.assertEqual(report.condition_number, np.inf)
        self.assertTrue(np.all(np.isfinite(report.bounds)))

    def test_invalid_m(self):
        info = fisher.fisher_direct(
            noise.SingleQubitPauliRates.depolarizing(2, 0.05))
        with self.assertRaises(libsyn.ConfigError):
            fisher.crb(info, 0)


if __name__ == "__main__":
    unittest.main(verbosity=2)
