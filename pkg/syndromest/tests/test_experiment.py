# Experiment runner unit testing
"""Unit testing for seeded estimation experiments."""

import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from syndromest.io import libsyn
from syndromest.settings import config, experiment_prof
from syndromest.stats import experiment, summary

SMALL = dict(
    code="five_qubit", levels=1, p=0.03, alpha=100, n_est=200, n_iter=3,
    n_trials=2, n_decode_trials=200, estimator="both", seed=7)


class ExperimentTestCase(unittest.TestCase):

    def setUp(self):
        self._cpus = config.cpus
        config.cpus = 1
        self.settings = experiment_prof.ExperimentProfile()

    def tearDown(self):
        config.cpus = self._cpus


class TestExperimentConfig(ExperimentTestCase):

    def test_defaults_and_enums(self):
        cfg = experiment.ExperimentConfig.from_settings(
            self.settings, seed=3, estimator="hem")
        self.assertIs(cfg.estimator, config.Estimators.HEM)
        self.assertIs(cfg.init_mode, config.InitModes.DIRICHLET)
        self.assertEqual(cfg.estimators(), [config.Estimators.HEM])
        self.assertEqual(cfg.tol, config.EM_TOL)
        both = experiment.ExperimentConfig.from_settings(
            self.settings, seed=3, estimator="both")
        self.assertEqual(both.estimators(),
                         [config.Estimators.EM, config.Estimators.HEM])

    def test_invalid(self):
        with self.assertRaises(libsyn.ConfigError):
            experiment.ExperimentConfig.from_settings(self.settings)
        for key, val in (("p", 0.4), ("alpha", 0), ("n_iter", 0),
                         ("estimator", "foo"), ("p_m", 1.5),
                         ("fisher_mode", "direct"), ("fisher_mode", "x")):
            with self.assertRaises(libsyn.ConfigError, msg=key):
                experiment.ExperimentConfig.from_settings(
                    self.settings, seed=1, **{key: val})

    def test_hash_depends_on_settings(self):
        a = experiment.ExperimentConfig.from_settings(self.settings, seed=1)
        b = experiment.ExperimentConfig.from_settings(self.settings, seed=2)
        self.assertNotEqual(a.config_hash, b.config_hash)
        self.assertEqual(
            a.config_hash,
            experiment.ExperimentConfig.from_settings(
                self.settings, seed=1).config_hash)


class TestTrials(ExperimentTestCase):

    def test_streams(self):
        draw = experiment.trial_rng(1, 0, experiment.STREAM_INIT).random()
        self.assertEqual(
            draw, experiment.trial_rng(1, 0, experiment.STREAM_INIT).random())
        self.assertNotEqual(
            draw, experiment.trial_rng(1, 0, experiment.STREAM_DATA).random())
        self.assertNotEqual(
            draw, experiment.trial_rng(1, 1, experiment.STREAM_INIT).random())

    def test_draw_rates_roles(self):
        cfg = experiment.ExperimentConfig.from_settings(
            self.settings, **SMALL)
        tree = cfg.build_tree()
        truth, init = experiment.draw_rates(
            cfg, tree, np.random.default_rng(0))
        np.testing.assert_allclose(truth.rates, 0.03)
        self.assertFalse(np.allclose(init.rates, 0.03))
        fixed = experiment.ExperimentConfig.from_settings(
            self.settings, init_mode="fixed_init", **SMALL)
        truth, init = experiment.draw_rates(
            fixed, tree, np.random.default_rng(0))
        np.testing.assert_allclose(init.rates, 0.03)
        self.assertFalse(np.allclose(truth.rates, 0.03))

    def test_run_experiment(self):
        result = experiment.run_experiment(self.settings, **SMALL)
        trials = result.trials
        self.assertEqual(len(trials), 4)
        self.assertEqual(list(trials.columns[:3]),
                         [c.value for c in config.MetaCols])
        self.assertEqual(set(trials[config.TrialCols.ESTIMATOR.value]),
                         {"em", "hem"})
        self.assertFalse(trials[config.TrialCols.ABORTED.value].any())
        self.assertTrue(
            (trials[config.TrialCols.MSE.value] >= 0).all())
        self.assertTrue(
            trials[config.TrialCols.LER_TRUTH.value].between(0, 1).all())
        self.assertEqual(result.errors["em"].shape, (2, 15))
        # one row per parameter per recorded iteration
        self.assertEqual(len(result.trace) % 15, 0)
        self.assertFalse(result.summary.empty)

    def test_reproducible(self):
        first = experiment.run_experiment(self.settings, **SMALL)
        second = experiment.run_experiment(self.settings, **SMALL)
        pd.testing.assert_frame_equal(first.trials, second.trials)
        np.testing.assert_array_equal(
            first.errors["hem"], second.errors["hem"])
        alone = experiment.run_trial(first.config, 1)
        cols = config.TrialCols
        expect = first.trials[first.trials[cols.TRIAL.value] == 1]
        for row, (_, df_row) in zip(alone.rows, expect.iterrows()):
            self.assertEqual(row[cols.ESTIMATOR], df_row[cols.ESTIMATOR.value])
            self.assertEqual(row[cols.MSE], df_row[cols.MSE.value])
            self.assertEqual(row[cols.LER_EST], df_row[cols.LER_EST.value])

    def test_writes_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            experiment.run_experiment(
                self.settings, tmp, "t_", **{**SMALL, "n_trials": 1})
            for suffix in (config.SUFFIX_TRIALS, config.SUFFIX_TRACE,
                           "run.json"):
                self.assertTrue(
                    os.path.exists(os.path.join(tmp, "t_" + suffix)))
            df_sum = summary.emit_summary(tmp)
            self.assertIn("t_em_L1_n200",
                          set(df_sum[config.SummaryCols.CONFIG.value]))


class TestMseVsCrb(ExperimentTestCase):

    def test_sweep(self):
        settings = experiment_prof.ExperimentProfile()
        settings["n_est_sweep"] = [100, 200]
        df = experiment.mse_vs_crb(
            settings, **{**SMALL, "estimator": "em", "n_iter": 2,
                         "n_decode_trials": 0})
        cols = config.MseCrbCols
        self.assertEqual(len(df), 2)
        self.assertEqual(list(df[cols.N_EST.value]), [100, 200])
        crb = df[cols.CRB.value].to_numpy()
        np.testing.assert_allclose(crb[1], crb[0] / 2, rtol=1e-12)
        np.testing.assert_allclose(
            df[cols.MSE.value],
            df[cols.BIAS2.value] + df[cols.VARIANCE.value], rtol=1e-10)
        self.assertTrue((df[cols.N_TRIALS.value] == 2).all())

    def test_em_reaches_bound_and_hem_does_not(self):
        result = experiment.run_experiment(
            self.settings, code="five_qubit", levels=1, p=0.03, alpha=200,
            n_est=10 ** 4, n_iter=100, tol=1e-9, n_trials=40,
            n_decode_trials=0, estimator="both", seed=17)
        cfg = result.config
        tree = cfg.build_tree()
        _, report = experiment.fisher_for(cfg, tree, cfg.truth_rates(tree))
        em_sq = result.errors["em"] ** 2
        hem_sq = result.errors["hem"] ** 2
        self.assertEqual(em_sq.shape, (40, 15))
        ratio = np.sum(np.mean(em_sq, axis=0)) / np.sum(report.bounds)
        self.assertGreaterEqual(ratio, 0.67)
        self.assertLessEqual(ratio, 1.5)
        # paired per trial, since both estimators see the same data
        diff = np.sum(hem_sq, axis=1) - np.sum(em_sq, axis=1)
        self.assertGreater(
            np.mean(diff), 4 * np.std(diff, ddof=1) / np.sqrt(len(diff)))

    def test_fisher_modes(self):
        cfg = experiment.ExperimentConfig.from_settings(
            self.settings, **SMALL)
        self.assertIs(cfg.fisher_mode, config.FisherModes.AUTO)
        tree = cfg.build_tree()
        truth = cfg.truth_rates(tree)
        info, _ = experiment.fisher_for(cfg, tree, truth)
        self.assertIs(info.mode, config.FisherModes.EXACT)
        sampled = experiment.ExperimentConfig.from_settings(
            self.settings, fisher_mode="monte_carlo", n_fisher_samples=2000,
            **SMALL)
        info, report = experiment.fisher_for(sampled, tree, truth)
        self.assertIs(info.mode, config.FisherModes.MONTE_CARLO)
        self.assertEqual(info.n_samples, 2000)
        self.assertEqual(len(report.bounds), 15)


if __name__ == "__main__":
    unittest.main(verbosity=2)
