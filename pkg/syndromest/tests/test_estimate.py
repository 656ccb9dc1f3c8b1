# Rate estimator unit testing
"""Unit testing for EM and hard-assignment EM rate estimation."""

import unittest

import numpy as np

from syndromest.io import libsyn
from syndromest.infer import chunking, decoder, estimate
from syndromest.qec import codes, noise
from syndromest.settings import config


def _setup(levels=1, n_est=400, seed=21, meas=None):
    tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), levels))
    rng = np.random.default_rng(seed)
    truth = noise.SingleQubitPauliRates(
        rng.uniform(0.01, 0.06, (tree.n_leaves, 3)), meas)
    data = estimate.SyndromeDataset.sample(tree, truth, n_est, rng, seed)
    return tree, truth, data


class TestDirichletInit(unittest.TestCase):

    def test_concentration_conventions(self):
        literal = estimate.DirichletInit(100, 0.01)
        np.testing.assert_allclose(
            literal.concentration(), [98.0, 2.0, 2.0, 2.0])
        standard = estimate.DirichletInit(
            100, 0.01, config.DirichletConventions.STANDARD)
        np.testing.assert_allclose(
            standard.concentration(), [97.0, 1.0, 1.0, 1.0])
        np.testing.assert_allclose(
            literal.flip_concentration(0.02), [3.0, 99.0])

    def test_validation(self):
        with self.assertRaises(libsyn.ConfigError):
            estimate.DirichletInit(0, 0.01)
        with self.assertRaises(libsyn.ConfigError):
            estimate.DirichletInit(10, 0.4)

    def test_sample(self):
        rng = np.random.default_rng(2)
        rates = estimate.sample_dirichlet_init(1000, 0.05, 25, rng)
        self.assertEqual(rates.rates.shape, (25, 3))
        self.assertIsNone(rates.meas)
        # mean of 1000 * 0.05 + 1 over 1004
        self.assertAlmostEqual(np.mean(rates.rates), 51 / 1004, delta=0.01)
        with_flips = estimate.DirichletInit(1000, 0.05).sample(
            5, rng, n_bits=4, p_m=0.01)
        self.assertEqual(with_flips.meas.shape, (4,))
        same = estimate.sample_dirichlet_init(
            1000, 0.05, 25, np.random.default_rng(2))
        np.testing.assert_array_equal(same.rates, rates.rates)


class TestRegularizer(unittest.TestCase):

    def test_pseudocount_forms(self):
        ref = noise.SingleQubitPauliRates([[0.1, 0.2, 0.3]], [0.25])
        comp = estimate.RegularizerConfig(10, ref)
        np.testing.assert_allclose(comp.pseudocounts(), [[6, 9, 8, 7]])
        np.testing.assert_allclose(comp.flip_pseudocounts(), [[7.5, 2.5]])
        proportional = estimate.RegularizerConfig(
            10, ref, config.PseudocountForms.PROPORTIONAL)
        np.testing.assert_allclose(
            proportional.pseudocounts(), [[4, 1, 2, 3]])
        standard = estimate.RegularizerConfig(
            10, ref, config.PseudocountForms.PROPORTIONAL,
            config.DirichletConventions.STANDARD)
        np.testing.assert_allclose(standard.pseudocounts(), [[3, 0, 1, 2]])
        with self.assertRaises(libsyn.ConfigError):
            estimate.RegularizerConfig(-1, ref)

    def test_maximize_adds_pseudocounts(self):
        ref = noise.SingleQubitPauliRates([[0.1, 0.1, 0.1]])
        state = estimate.EMState(
            0, ref, np.array([[90.0, 10.0, 0.0, 0.0]]), None, 0.0)
        plain = estimate.maximize(state, 100)
        np.testing.assert_allclose(plain.rates[0, 0], 0.1)
        self.assertGreater(plain.rates[0, 1], 0)
        reg = estimate.maximize(
            state, 100, estimate.RegularizerConfig(20, ref))
        # counts [90, 10, 0, 0] plus (1 - [0.7, 0.1, 0.1, 0.1]) * 20
        np.testing.assert_allclose(
            reg.table()[0], np.array([96, 28, 18, 18]) / 160)


class TestExpectedCounts(unittest.TestCase):

    def test_counts_sum_to_dataset_size(self):
        tree, truth, data = _setup()
        graph = decoder.build_factor_graph(tree, truth)
        stats, flips, loglik = estimate.expected_counts(graph, data)
        np.testing.assert_allclose(stats.sum(axis=1), len(data))
        self.assertIsNone(flips)
        self.assertLess(loglik, 0)
        hard, _, hard_ll = estimate.expected_counts(graph, data, hard=True)
        np.testing.assert_allclose(hard.sum(axis=1), len(data))
        self.assertEqual(hard_ll, loglik)

    def test_chunking_invariance(self):
        tree, truth, data = _setup(n_est=300)
        graph = decoder.build_factor_graph(tree, truth)
        prev = config.chunk_size
        try:
            config.chunk_size = 7
            small = estimate.expected_counts(graph, data)
            config.chunk_size = 4096
            large = estimate.expected_counts(graph, data)
        finally:
            config.chunk_size = prev
        np.testing.assert_allclose(small[0], large[0], rtol=1e-12)
        self.assertAlmostEqual(small[2], large[2], delta=1e-9)

    def test_dataset(self):
        _, _, data = _setup(n_est=50)
        self.assertEqual(len(data), 50)
        self.assertEqual(data.n_bits, 4)
        again = estimate.SyndromeDataset.from_syndromes(data.syndromes())
        np.testing.assert_array_equal(again.bits, data.bits)
        with self.assertRaises(libsyn.ConfigError):
            estimate.SyndromeDataset(np.array([[0, 2]]))


class TestEstimators(unittest.TestCase):

    def test_em_loglik_non_decreasing(self):
        tree, truth, data = _setup(n_est=500)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_em(init, data, tree, n_iter=10, tol=0)
        self.assertEqual(run.n_iter_run, 10)
        self.assertFalse(run.converged)
        logliks = run.logliks()
        self.assertTrue(np.all(np.diff(logliks) >= -1e-9 * abs(logliks[0])))
        self.assertGreater(logliks[-1], logliks[0])
        self.assertEqual(run.trajectory().shape, (11, 15))

    def test_em_level_two_non_decreasing(self):
        tree, _, data = _setup(levels=2, n_est=200, seed=4)
        init = noise.SingleQubitPauliRates.depolarizing(25, 0.03)
        run = estimate.run_em(init, data, tree, n_iter=4, tol=0)
        logliks = run.logliks()
        self.assertTrue(np.all(np.diff(logliks) >= -1e-9 * abs(logliks[0])))

    def test_em_with_flips_non_decreasing(self):
        tree, _, data = _setup(n_est=400, seed=6, meas=np.full(4, 0.02))
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03, 4, 0.03)
        graph = decoder.build_factor_graph(tree, init)
        run = estimate.run_em(init, data, graph, n_iter=6, tol=0)
        self.assertEqual(run.final.flip_stats.shape, (4,))
        self.assertEqual(run.final.rates.meas.shape, (4,))
        logliks = run.logliks()
        self.assertTrue(np.all(np.diff(logliks) >= -1e-9 * abs(logliks[0])))

    def test_em_convergence_stops(self):
        tree, _, data = _setup(n_est=300)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_em(init, data, tree, n_iter=200, tol=1e-3)
        self.assertTrue(run.converged)
        self.assertLess(run.n_iter_run, 200)

    def test_hem_runs_deterministically(self):
        tree, _, data = _setup(n_est=300)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run_a = estimate.run_hem(init, data, tree, n_iter=5)
        run_b = estimate.run_hem(init, data, tree, n_iter=5)
        self.assertIs(run_a.estimator, config.Estimators.HEM)
        np.testing.assert_array_equal(
            run_a.final.rates.param_vector(),
            run_b.final.rates.param_vector())
        self.assertTrue(np.all(run_a.final.rates.table() > 0))

    def test_hem_counts_whole_decisions(self):
        tree, _, data = _setup(n_est=300)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_hem(init, data, tree, n_iter=2, tol=0)
        for state in run.states:
            np.testing.assert_array_equal(state.stats, np.round(state.stats))
            np.testing.assert_array_equal(state.stats.sum(axis=1), len(data))
        np.testing.assert_allclose(
            run.final.rates.table().sum(axis=1), 1, rtol=1e-12)

    def test_hem_trivial_syndromes_give_zero_rates(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        data = estimate.SyndromeDataset(np.zeros((50, 4), dtype=np.uint8))
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_hem(init, data, tree, n_iter=1, tol=0)
        np.testing.assert_array_equal(run.states[0].stats[:, 0], 50)
        # clamped to the interior rather than exactly zero
        np.testing.assert_allclose(
            run.final.rates.rates, 0, atol=2 * config.RATE_CLAMP[0])

    def test_hem_decoder_plateaus_after_first_iteration(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 2))
        truth = noise.SingleQubitPauliRates.depolarizing(25, 0.13)
        rng = np.random.default_rng(40)
        init = estimate.sample_dirichlet_init(20, 0.13, 25, rng)
        data = estimate.SyndromeDataset.sample(tree, truth, 1000, rng)
        run = estimate.run_hem(init, data, tree, n_iter=4, tol=0)
        self.assertEqual(run.n_iter_run, 4)
        # the rates keep moving by whole counts
        self.assertGreater(
            np.max(np.abs(run.states[2].rates.param_vector()
                          - run.states[1].rates.param_vector())), 1e-6)
        # decoders from each iteration on one shared set of errors
        bits, root, _ = decoder.sample_syndromes(tree, truth, 4000, rng)
        failed = [decoder.decode_classes(
            decoder.build_factor_graph(tree, state.rates), bits) != root
            for state in run.states[1:]]
        for k, fail in enumerate(failed[1:], 2):
            with self.subTest(iteration=k):
                diff = int(np.sum(fail)) - int(np.sum(failed[0]))
                discordant = int(np.sum(fail != failed[0]))
                self.assertLessEqual(abs(diff), 4 * np.sqrt(discordant) + 1)

    def test_zero_strength_regularizer_is_plain_em(self):
        tree, _, data = _setup(n_est=200)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        plain = estimate.run_em(init, data, tree, n_iter=4, tol=0)
        reg = estimate.run_em(init, data, tree, n_iter=4, tol=0,
                              regularizer=estimate.RegularizerConfig(0, init))
        np.testing.assert_array_equal(reg.trajectory(), plain.trajectory())
        np.testing.assert_array_equal(reg.logliks(), plain.logliks())

    def test_regularized_stays_near_init(self):
        tree = codes.concatenate(codes.ConcatSpec(codes.five_qubit_code(), 1))
        truth = noise.SingleQubitPauliRates.depolarizing(5, 0.13)
        rng = np.random.default_rng(41)
        init = estimate.sample_dirichlet_init(200, 0.13, 5, rng)
        data = estimate.SyndromeDataset.sample(tree, truth, 100, rng)
        reg = estimate.RegularizerConfig(
            200, init, config.PseudocountForms.PROPORTIONAL)
        plain_run = estimate.run_em(init, data, tree, n_iter=30, tol=0)
        reg_run = estimate.run_em(init, data, tree, n_iter=30, tol=0,
                                  regularizer=reg)
        start = init.param_vector()
        self.assertLess(
            np.linalg.norm(reg_run.final.rates.param_vector() - start),
            np.linalg.norm(plain_run.final.rates.param_vector() - start))

    def test_em_step_matches_enumeration(self):
        tree, _, data = _setup(n_est=400)
        code = tree.base
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_em(init, data, tree, n_iter=20, tol=0)
        counts = np.bincount(
            data.bits.astype(np.int64) @ (1 << np.arange(data.n_bits)),
            minlength=2 ** code.l)
        for state in (run.states[0], run.states[10], run.final):
            p_s, joints = noise.set_posteriors(
                state.rates.to_model(code), code)
            stats = np.array([joint @ (counts / p_s) for joint in joints])
            np.testing.assert_allclose(
                stats, state.stats, rtol=1e-9, atol=1e-9)
            # a fixed point of one map is a fixed point of the other
            np.testing.assert_allclose(
                stats / len(data),
                estimate.maximize(state, len(data)).table(),
                rtol=1e-9, atol=1e-12)

    def test_states_hold_their_own_loglik(self):
        tree, _, data = _setup(n_est=200)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        run = estimate.run_em(init, data, tree, n_iter=2, tol=0)
        state = run.states[1]
        graph = decoder.build_factor_graph(tree, state.rates)
        _, _, loglik = estimate.expected_counts(graph, data)
        self.assertEqual(state.loglik, loglik)

    def test_regularized_run(self):
        tree, _, data = _setup(n_est=200)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        reg = estimate.RegularizerConfig(50, init)
        run = estimate.run_em(init, data, tree, n_iter=3, regularizer=reg,
                              seeds={"data": 21})
        self.assertEqual(run.seeds, {"data": 21})
        self.assertTrue(np.all(run.final.rates.table() > 0))

    def test_invalid_settings(self):
        tree, _, data = _setup(n_est=20)
        init = noise.SingleQubitPauliRates.depolarizing(5, 0.03)
        with self.assertRaises(libsyn.ConfigError):
            estimate.run_estimator(init, data, tree, n_iter=0)
        with self.assertRaises(libsyn.ConfigError):
            estimate.run_estimator(
                init, data, tree, config.Estimators.BOTH)


class TestChunking(unittest.TestCase):

    def test_chunk_bounds(self):
        self.assertEqual(list(chunking.chunk_bounds(10, 4)),
                         [(0, 4), (4, 8), (8, 10)])

    def test_fsum_accumulator(self):
        acc = chunking.FsumAccumulator((2,))
        acc.add(np.array([[1e16, 1.0], [1.0, 2.0]]))
        acc.add(np.array([[-1e16, 3.0]]))
        np.testing.assert_array_equal(acc.total(), [1.0, 6.0])


if __name__ == "__main__":
    unittest.main(verbosity=2)
