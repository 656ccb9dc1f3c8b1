# Box plot statistics of experiment results
"""Quartile summaries of per-trial results.

Quartiles use linear interpolation between order statistics
(``numpy.quantile`` default), so ``1..100`` has ``q1 = 25.75``. Whiskers
extend to the last data point within 1.5 interquartile ranges of the box,
and points beyond them are listed individually.
"""

import glob
import os

import numpy as np
import pandas as pd

from syndromest.io import df_io, libsyn
from syndromest.settings import config

#: Tuple[:class:`config.TrialCols`]: Per-trial metrics summarized.
METRICS = (
    config.TrialCols.MSE,
    config.TrialCols.MSE_X1,
    config.TrialCols.LER_INIT,
    config.TrialCols.LER_EST,
    config.TrialCols.LER_TRUTH,
    config.TrialCols.N_ITER,
)

#: Tuple[:class:`config.TrialCols`]: Columns identifying a configuration.
GROUP_COLS = (
    config.TrialCols.ESTIMATOR,
    config.TrialCols.LEVELS,
    config.TrialCols.N_EST,
)


def box_stats(values):
    """Box plot statistics of a sample.

    Args:
        values (Sequence[float]): Values; NaNs are dropped.

    Returns:
        dict[:class:`config.SummaryCols`, Any]: Count, extremes, quartiles,
        whiskers, and outliers joined by ``;``.

    Raises:
        :class:`libsyn.ConfigError`: if no finite values remain.

    """
    vals = np.asarray(values, dtype=float)
    vals = np.sort(vals[~np.isnan(vals)])
    if not len(vals):
        raise libsyn.ConfigError("no values to summarize")
    q1, median, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
    iqr = q3 - q1
    inside = vals[(vals >= q1 - 1.5 * iqr) & (vals <= q3 + 1.5 * iqr)]
    outliers = vals[(vals < inside[0]) | (vals > inside[-1])]
    cols = config.SummaryCols
    return {
        cols.N: len(vals),
        cols.MIN: vals[0],
        cols.Q1: q1,
        cols.MEDIAN: median,
        cols.Q3: q3,
        cols.MAX: vals[-1],
        cols.WHISKER_LO: inside[0],
        cols.WHISKER_HI: inside[-1],
        cols.OUTLIERS: ";".join("{:.6g}".format(v) for v in outliers),
    }


def config_label(row, prefix=""):
    """Label of the configuration a trial row belongs to."""
    label = "{}_L{}_n{}".format(
        row[config.TrialCols.ESTIMATOR.value],
        row[config.TrialCols.LEVELS.value],
        row[config.TrialCols.N_EST.value])
    return prefix + label if prefix else label


def summarize_trials(df, prefix=""):
    """Box statistics per configuration and metric.

    Args:
        df (:obj:`pd.DataFrame`): Trial rows; aborted trials are skipped.
        prefix (str): Prefix for configuration labels.

    Returns:
        :obj:`pd.DataFrame`: One row per configuration and metric.

    """
    aborted = config.TrialCols.ABORTED.value
    if aborted in df.columns:
        df = df[~df[aborted].astype(bool)]
    group_cols = [c.value for c in GROUP_COLS]
    rows = []
    for _, group in df.groupby(group_cols, sort=True):
        label = config_label(group.iloc[0], prefix)
        for metric in METRICS:
            if metric.value not in group.columns:
                continue
            vals = group[metric.value].to_numpy(dtype=float)
            if np.all(np.isnan(vals)):
                continue
            stats = box_stats(vals)
            stats[config.SummaryCols.CONFIG] = label
            stats[config.SummaryCols.METRIC] = metric.value
            rows.append(stats)
    order = [c.value for c in config.SummaryCols]
    if not rows:
        return pd.DataFrame(columns=order)
    df_sum = df_io.dict_to_data_frame(rows)
    return df_sum[order]


def emit_summary(results_dir, path=None):
    """Summarize every trials file in a results directory.

    Args:
        results_dir (str): Directory holding ``*trials.csv`` files.
        path (str): Output path; defaults to None for
            ``summary.csv`` in ``results_dir``.

    Returns:
        :obj:`pd.DataFrame`: Summary rows with provenance columns.

    Raises:
        :class:`libsyn.ConfigError`: if no trials are found.

    """
    paths = sorted(glob.glob(os.path.join(
        results_dir, "*{}".format(config.SUFFIX_TRIALS))))
    if not paths:
        raise libsyn.ConfigError(
            "no {} files in {}".format(config.SUFFIX_TRIALS, results_dir))
    dfs = []
    config_hash = seed = None
    for trials_path in paths:
        df = df_io.read_csv(trials_path)
        prefix = os.path.basename(trials_path)[:-len(config.SUFFIX_TRIALS)]
        libsyn.printv("summarizing {} trial rows from {}".format(
            len(df), trials_path))
        df_sum = summarize_trials(df, prefix)
        if not df_sum.empty:
            dfs.append(df_sum)
        if config_hash is None and len(df):
            config_hash = df[config.MetaCols.CONFIG_HASH.value].iloc[0]
            seed = df[config.MetaCols.SEED.value].iloc[0]
    if not dfs:
        raise libsyn.ConfigError("no completed trials in {}".format(
            results_dir))
    combined = pd.concat(dfs, ignore_index=True)
    df_io.add_provenance(combined, config_hash, seed)
    if path is None:
        path = os.path.join(results_dir, config.SUFFIX_SUMMARY)
    return df_io.data_frames_to_csv(combined, path)
