# Summary statistics unit testing
"""Unit testing for box plot summaries of trial results."""

import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from syndromest.io import df_io, libsyn
from syndromest.settings import config
from syndromest.stats import summary

COLS = config.SummaryCols


def _trials_frame():
    tcols = config.TrialCols
    return pd.DataFrame({
        tcols.TRIAL.value: [0, 1, 2, 3, 0, 1],
        tcols.ESTIMATOR.value: ["em"] * 4 + ["hem"] * 2,
        tcols.LEVELS.value: [1] * 6,
        tcols.N_EST.value: [100] * 6,
        tcols.N_ITER.value: [5, 5, 5, 0, 3, 4],
        tcols.MSE.value: [1.0, 2.0, 3.0, 1000.0, 0.5, 0.7],
        tcols.LER_EST.value: [np.nan] * 6,
        tcols.ABORTED.value: [False, False, False, True, False, False],
    })


class TestBoxStats(unittest.TestCase):

    def test_quartiles(self):
        stats = summary.box_stats(range(1, 101))
        self.assertEqual(stats[COLS.N], 100)
        self.assertAlmostEqual(stats[COLS.Q1], 25.75)
        self.assertAlmostEqual(stats[COLS.MEDIAN], 50.5)
        self.assertAlmostEqual(stats[COLS.Q3], 75.25)
        self.assertEqual(stats[COLS.WHISKER_LO], 1)
        self.assertEqual(stats[COLS.WHISKER_HI], 100)
        self.assertEqual(stats[COLS.OUTLIERS], "")

    def test_single_value(self):
        stats = summary.box_stats([0.3])
        for col in (COLS.MIN, COLS.Q1, COLS.MEDIAN, COLS.Q3, COLS.MAX):
            self.assertEqual(stats[col], 0.3)

    def test_outliers(self):
        stats = summary.box_stats(list(range(1, 11)) + [100, np.nan])
        self.assertEqual(stats[COLS.N], 11)
        self.assertEqual(stats[COLS.WHISKER_HI], 10)
        self.assertEqual(stats[COLS.MAX], 100)
        self.assertEqual(stats[COLS.OUTLIERS], "100")

    def test_empty(self):
        with self.assertRaises(libsyn.ConfigError):
            summary.box_stats([np.nan])


class TestSummarizeTrials(unittest.TestCase):

    def test_skips_aborted_and_empty_metrics(self):
        df_sum = summary.summarize_trials(_trials_frame())
        self.assertEqual(list(df_sum.columns), [c.value for c in COLS])
        self.assertEqual(set(df_sum[COLS.CONFIG.value]),
                         {"em_L1_n100", "hem_L1_n100"})
        self.assertEqual(set(df_sum[COLS.METRIC.value]),
                         {config.TrialCols.MSE.value,
                          config.TrialCols.N_ITER.value})
        em_mse = df_sum[(df_sum[COLS.CONFIG.value] == "em_L1_n100")
                        & (df_sum[COLS.METRIC.value] == "mse")].iloc[0]
        self.assertEqual(em_mse[COLS.N.value], 3)
        self.assertEqual(em_mse[COLS.MAX.value], 3.0)

    def test_prefix(self):
        df_sum = summary.summarize_trials(_trials_frame(), "run_")
        self.assertTrue(all(
            c.startswith("run_") for c in df_sum[COLS.CONFIG.value]))


class TestEmitSummary(unittest.TestCase):

    def test_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            df = df_io.add_provenance(_trials_frame(), "abc", 5)
            df_io.data_frames_to_csv(
                df, os.path.join(tmp, "x_" + config.SUFFIX_TRIALS))
            df_sum = summary.emit_summary(tmp)
            self.assertTrue(os.path.exists(
                os.path.join(tmp, config.SUFFIX_SUMMARY)))
            self.assertIn("x_em_L1_n100", set(df_sum[COLS.CONFIG.value]))
            self.assertEqual(df_sum.columns[0], config.MetaCols.SCHEMA.value)
            self.assertTrue(
                (df_sum[config.MetaCols.CONFIG_HASH.value] == "abc").all())

    def test_empty_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(libsyn.ConfigError):
                summary.emit_summary(tmp)


if __name__ == "__main__":
    unittest.main(verbosity=2)
