# Seeded estimation experiments
"""Estimation experiments on simulated syndrome data.

Each trial draws its rates, dataset, and decoding errors from its own
random streams, derived from the master seed by the trial index and a
stream number. Trials therefore give the same results whether they run
in order, in a worker pool, or alone.
"""

from dataclasses import asdict, dataclass, field
import math
import os
import time

import numpy as np
import pandas as pd

from syndromest.infer import chunking, decoder, estimate
from syndromest.io import code_io, df_io, libsyn
from syndromest.qec import codes, noise
from syndromest.settings import config
from syndromest.stats import fisher, summary

#: int: Random stream for initial and truth rates.
STREAM_INIT = 0
#: int: Random stream for syndrome datasets.
STREAM_DATA = 1
#: int: Random stream for decoding trials.
STREAM_DECODE = 2
#: int: Random stream for Monte-Carlo Fisher information.
STREAM_FISHER = 3


def trial_rng(seed, trial, stream):
    """Generator for one stream of one trial."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(trial, stream)))


def _enum(val, enum_class, key):
    if val is None:
        return None
    enum = libsyn.get_enum(val, enum_class)
    if enum is None:
        raise libsyn.ConfigError("{} is not a valid {}; choose from {}".format(
            val, key, libsyn.enum_names_aslist(enum_class)))
    return enum


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment settings.

    Attributes:
        code (str): Code name such as ``five_qubit`` or ``repetition:3``,
            or a code definition file.
        levels (int): Concatenation levels.
        p (float): Rate of each of X, Y, and Z.
        p_m (float): Syndrome bit flip rate, or None.
        init_mode (:class:`config.InitModes`): Initialization scheme.
        alpha (float): Dirichlet concentration scale.
        dirichlet_convention (:class:`config.DirichletConventions`):
            Exponent convention of the Dirichlet draws and the prior.
        beta (float): Regularizer strength, or None.
        pseudocount_form (:class:`config.PseudocountForms`): Regularizer
            form.
        estimator (:class:`config.Estimators`): EM, HEM, or both.
        n_est (int): Syndromes per dataset.
        n_iter (int): Maximum estimator iterations.
        tol (float): Convergence tolerance.
        n_trials (int): Trials.
        n_decode_trials (int): Decoding trials per logical error rate;
            0 skips decoding.
        n_fisher_samples (int): Monte-Carlo samples for Fisher information
            beyond the exact enumeration limit.
        fisher_mode (:class:`config.FisherModes`): Fisher information
            evaluation, ``AUTO``, ``EXACT``, or ``MONTE_CARLO``.
        seed (int): Master seed.

    """
    code: str
    levels: int
    p: float
    p_m: float
    init_mode: object
    alpha: float
    dirichlet_convention: object
    beta: float
    pseudocount_form: object
    estimator: object
    n_est: int
    n_iter: int
    tol: float
    n_trials: int
    n_decode_trials: int
    n_fisher_samples: int
    fisher_mode: object
    seed: int

    @classmethod
    def from_settings(cls, settings, **overrides):
        """Validate a settings dictionary such as an experiment profile.

        Args:
            settings (dict): Settings with every field of this class.
            overrides: Field values replacing those in ``settings``.

        Raises:
            :class:`libsyn.ConfigError`: for missing or invalid values.

        """
        vals = {}
        for name in cls.__dataclass_fields__:
            vals[name] = overrides.get(name, settings.get(name))
        if vals["seed"] is None:
            raise libsyn.ConfigError(
                "a master seed is required; set it with --seed")
        vals["seed"] = int(vals["seed"])
        vals["code"] = str(getattr(vals["code"], "value", vals["code"]))
        vals["init_mode"] = _enum(
            vals["init_mode"] or "dirichlet", config.InitModes, "init_mode")
        vals["dirichlet_convention"] = _enum(
            vals["dirichlet_convention"] or "literal",
            config.DirichletConventions, "dirichlet_convention")
        vals["pseudocount_form"] = _enum(
            vals["pseudocount_form"] or "complement",
            config.PseudocountForms, "pseudocount_form")
        vals["estimator"] = _enum(
            vals["estimator"] or "em", config.Estimators, "estimator")
        vals["fisher_mode"] = _enum(
            vals["fisher_mode"] or "auto", config.FisherModes, "fisher_mode")
        if vals["fisher_mode"] is config.FisherModes.DIRECT:
            raise libsyn.ConfigError(
                "direct Fisher information does not bound syndrome "
                "estimators")
        for key in ("levels", "n_est", "n_iter", "n_trials"):
            if vals[key] is None or int(vals[key]) < 1:
                raise libsyn.ConfigError(
                    "{} must be a positive integer, got {}".format(
                        key, vals[key]))
            vals[key] = int(vals[key])
        for key in ("n_decode_trials", "n_fisher_samples"):
            vals[key] = int(vals[key] or 0)
            if vals[key] < 0:
                raise libsyn.ConfigError("{} must be nonnegative".format(key))
        vals["tol"] = config.EM_TOL if vals["tol"] is None else float(
            vals["tol"])
        for key in ("p", "p_m", "alpha", "beta"):
            if vals[key] is not None:
                vals[key] = float(vals[key])
        if vals["p"] is None or not 0 < vals["p"] < 1 / 3:
            raise libsyn.ConfigError(
                "p must lie in (0, 1/3), got {}".format(vals["p"]))
        if vals["p_m"] is not None and not 0 < vals["p_m"] < 1:
            raise libsyn.ConfigError(
                "p_m must lie in (0, 1), got {}".format(vals["p_m"]))
        if vals["alpha"] is None or not vals["alpha"] > 0:
            raise libsyn.ConfigError("alpha must be positive")
        if vals["beta"] is not None and vals["beta"] < 0:
            raise libsyn.ConfigError("beta must be nonnegative")
        return cls(**vals)

    def estimators(self):
        if self.estimator is config.Estimators.BOTH:
            return [config.Estimators.EM, config.Estimators.HEM]
        return [self.estimator]

    def to_dict(self):
        return asdict(self)

    @property
    def config_hash(self):
        return libsyn.config_hash(self.to_dict())

    def build_tree(self):
        code = code_io.load_code(self.code)
        return codes.concatenate(codes.ConcatSpec(code, self.levels))

    def truth_rates(self, tree):
        """Equal rates ``p`` on every leaf, with flips if ``p_m`` is set."""
        n_bits = tree.n_bits if self.p_m is not None else None
        return noise.SingleQubitPauliRates.depolarizing(
            tree.n_leaves, self.p, n_bits, self.p_m)

    def dirichlet(self):
        return estimate.DirichletInit(self.alpha, self.p,
                                      self.dirichlet_convention)


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Results of one trial.

    Attributes:
        trial (int): Trial index.
        rows (List[dict]): One per-trial row per estimator.
        trace (List[dict]): Per-iteration, per-parameter rows.
        errors (Dict[str, :obj:`np.ndarray`]): Final estimate minus truth
            per completed estimator.

    """
    trial: int
    rows: list
    trace: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)


def draw_rates(cfg, tree, rng):
    """Truth and initial rates of a trial.

    With Dirichlet initialization the truth is fixed at ``p`` and the
    initialization drawn around it; with fixed initialization the roles
    swap.

    Returns:
        :class:`noise.SingleQubitPauliRates`,
        :class:`noise.SingleQubitPauliRates`: Truth and initial rates.

    """
    fixed = cfg.truth_rates(tree)
    n_bits = tree.n_bits if cfg.p_m is not None else 0
    drawn = cfg.dirichlet().sample(tree.n_leaves, rng, n_bits, cfg.p_m)
    if cfg.init_mode is config.InitModes.FIXED_INIT:
        return drawn, fixed
    return fixed, drawn


def _ler(cfg, graph, truth, trial):
    if not cfg.n_decode_trials:
        return math.nan
    # common random numbers: every decoder sees the same sampled errors
    rng = trial_rng(cfg.seed, trial, STREAM_DECODE)
    return decoder.logical_error_rate(
        graph, truth, cfg.n_decode_trials, rng).rate


def _trial_row(cfg, trial, est_name, **vals):
    cols = config.TrialCols
    row = {
        cols.TRIAL: trial,
        cols.ESTIMATOR: est_name,
        cols.LEVELS: cfg.levels,
        cols.N_EST: cfg.n_est,
        cols.N_ITER: 0,
        cols.CONVERGED: False,
        cols.MSE: math.nan,
        cols.MSE_X1: math.nan,
        cols.LER_INIT: math.nan,
        cols.LER_EST: math.nan,
        cols.LER_TRUTH: math.nan,
        cols.LOGLIK: math.nan,
        cols.ABORTED: False,
        cols.MESSAGE: "",
    }
    row.update({cols[k.upper()] if k.upper() in cols.__members__
                else k: v for k, v in vals.items()})
    return row


def _trace_rows(trial, est_name, run, truth_vec, labels):
    rows = []
    cols = config.TraceCols
    for state in run.states:
        for label, val, true_val in zip(
                labels, state.rates.param_vector(), truth_vec):
            rows.append({
                cols.TRIAL: trial,
                cols.ESTIMATOR: est_name,
                cols.ITER: state.iteration,
                cols.PARAM: label,
                cols.VALUE: val,
                cols.TRUTH: true_val,
                cols.LOGLIK: state.loglik,
                cols.WALL_TIME: state.wall_time,
            })
    return rows


def run_trial(cfg, trial, tree=None):
    """Run one trial of every configured estimator on a shared dataset.

    A syndrome with zero probability under an estimator's rates aborts
    that estimator's run; the row records it and the trial goes on.

    Args:
        cfg (:class:`ExperimentConfig`): Settings.
        trial (int): Trial index.
        tree (:class:`codes.ConcatTree`): Tree to reuse; defaults to None
            to build it.

    Returns:
        :class:`TrialResult`: Rows and final errors.

    """
    if tree is None:
        tree = cfg.build_tree()
    truth, init = draw_rates(cfg, tree, trial_rng(
        cfg.seed, trial, STREAM_INIT))
    data = estimate.SyndromeDataset.sample(
        tree, truth, cfg.n_est, trial_rng(cfg.seed, trial, STREAM_DATA),
        cfg.seed)
    graph = decoder.build_factor_graph(tree, init.clamp())
    regularizer = None
    if cfg.beta:
        regularizer = estimate.RegularizerConfig(
            cfg.beta, init.clamp(), cfg.pseudocount_form,
            cfg.dirichlet_convention)
    truth_vec = truth.param_vector()
    labels = truth.param_labels()
    ler_init = _ler(cfg, graph, truth, trial)
    ler_truth = _ler(cfg, graph.with_rates(truth.clamp()), truth, trial)
    seeds = {"master": cfg.seed, "trial": trial}

    rows, trace, errors = [], [], {}
    for est in cfg.estimators():
        name = est.name.lower()
        try:
            run = estimate.run_estimator(
                init, data, graph, est, cfg.n_iter, cfg.tol, regularizer,
                seeds)
        except libsyn.ZeroSupportError as e:
            libsyn.warn("trial {} {} aborted: {}".format(trial, name, e))
            rows.append(_trial_row(
                cfg, trial, name, ler_init=ler_init, ler_truth=ler_truth,
                aborted=True, message=str(e)))
            continue
        final = run.final.rates
        err = final.param_vector() - truth_vec
        errors[name] = err
        rows.append(_trial_row(
            cfg, trial, name, n_iter=run.n_iter_run,
            converged=run.converged, mse=float(np.mean(err ** 2)),
            mse_x1=float(err[0] ** 2), ler_init=ler_init,
            ler_est=_ler(cfg, graph.with_rates(final), truth, trial),
            ler_truth=ler_truth, loglik=run.final.loglik))
        trace.extend(_trace_rows(trial, name, run, truth_vec, labels))
    libsyn.printv("finished trial {}".format(trial))
    return TrialResult(trial, rows, trace, errors)


def _run_trial_task(cfg, trial):
    return run_trial(cfg, trial)


def run_trials(cfg):
    """Run all trials, in a worker pool if more than one CPU is set.

    Returns:
        List[:class:`TrialResult`]: Results ordered by trial index.

    """
    if chunking.use_pool(cfg.n_trials):
        pool = chunking.get_mp_pool()
        try:
            results = pool.starmap(
                _run_trial_task, [(cfg, t) for t in range(cfg.n_trials)])
        finally:
            pool.close()
            pool.join()
        return results
    tree = cfg.build_tree()
    return [run_trial(cfg, t, tree) for t in range(cfg.n_trials)]


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Tables from an experiment.

    Attributes:
        config (:class:`ExperimentConfig`): Settings.
        trials (:obj:`pd.DataFrame`): Per-trial rows.
        trace (:obj:`pd.DataFrame`): Per-iteration rows.
        summary (:obj:`pd.DataFrame`): Quartiles per estimator and metric.
        errors (Dict[str, :obj:`np.ndarray`]): ``(n_completed, P)`` final
            errors per estimator.

    """
    config: ExperimentConfig
    trials: pd.DataFrame
    trace: pd.DataFrame
    summary: pd.DataFrame
    errors: dict


def _out_path(output_dir, prefix, suffix):
    if output_dir is None:
        return None
    return os.path.join(output_dir, prefix + suffix)


def run_experiment(settings, output_dir=None, prefix="", **overrides):
    """Run and record an estimation experiment.

    Args:
        settings (Union[dict, :class:`ExperimentConfig`]): Settings such as
            :attr:`config.experiment_profile`.
        output_dir (str): Directory for ``trials.csv``, ``trace.csv``, and
            the run metadata; defaults to None to skip writing.
        prefix (str): File name prefix.
        overrides: Settings replacing those in ``settings``.

    Returns:
        :class:`ExperimentResult`: Tables and errors.

    """
    cfg = settings
    if not isinstance(cfg, ExperimentConfig):
        cfg = ExperimentConfig.from_settings(settings, **overrides)
    elif overrides:
        cfg = ExperimentConfig(**{**cfg.to_dict(), **overrides})
    print("Running {} trials of {} on {} at {} levels, n_est={}".format(
        cfg.n_trials, cfg.estimator.name.lower(), cfg.code, cfg.levels,
        cfg.n_est))
    start = time.perf_counter()
    results = run_trials(cfg)
    config_hash = cfg.config_hash

    rows = [row for res in results for row in res.rows]
    df_trials = df_io.add_provenance(
        df_io.dict_to_data_frame(rows), config_hash, cfg.seed)
    trace = [row for res in results for row in res.trace]
    df_trace = df_io.dict_to_data_frame(trace) if trace else pd.DataFrame(
        columns=[c.value for c in config.TraceCols])
    df_io.add_provenance(df_trace, config_hash, cfg.seed)
    df_sum = summary.summarize_trials(df_trials, prefix)

    errors = {}
    for est in cfg.estimators():
        name = est.name.lower()
        errs = [res.errors[name] for res in results if name in res.errors]
        if errs:
            errors[name] = np.stack(errs)
    if output_dir is not None:
        df_io.data_frames_to_csv(
            df_trials, _out_path(output_dir, prefix, config.SUFFIX_TRIALS))
        df_io.data_frames_to_csv(
            df_trace, _out_path(output_dir, prefix, config.SUFFIX_TRACE))
        libsyn.write_json({
            config.MetaCols.SCHEMA.value: config.SCHEMA_VERSION,
            config.MetaCols.CONFIG_HASH.value: config_hash,
            config.MetaCols.SEED.value: cfg.seed,
            "settings": cfg.to_dict(),
            "wall_time": time.perf_counter() - start,
        }, _out_path(output_dir, prefix, "run.json"))
    n_aborted = int(df_trials[config.TrialCols.ABORTED.value].sum())
    if n_aborted:
        libsyn.warn("{} estimator runs aborted on zero-support syndromes"
                    .format(n_aborted))
    return ExperimentResult(cfg, df_trials, df_trace, df_sum, errors)


def fisher_for(cfg, tree, truth, m=None):
    """CRB at the truth.

    Under ``cfg.fisher_mode`` of ``AUTO`` the information is exact up to
    :const:`config.FISHER_MAX_BITS` syndrome bits and Monte-Carlo beyond.

    Returns:
        :class:`fisher.FisherMatrix`, :class:`fisher.CRBReport`: Matrix
        and bounds for ``m`` syndromes, defaulting to ``cfg.n_est``.

    """
    graph = decoder.build_factor_graph(tree, truth)
    mode = cfg.fisher_mode
    if mode is config.FisherModes.AUTO:
        mode = (config.FisherModes.EXACT
                if tree.n_bits <= config.FISHER_MAX_BITS
                else config.FisherModes.MONTE_CARLO)
    if mode is config.FisherModes.EXACT:
        info = fisher.fisher_exact(graph)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(
            cfg.seed, spawn_key=(0, STREAM_FISHER, cfg.levels)))
        info = fisher.fisher_mc(graph, max(1, cfg.n_fisher_samples), rng)
    return info, fisher.crb(info, cfg.n_est if m is None else m)


def mse_vs_crb(settings, output_dir=None, prefix="", **overrides):
    """MSE of the first rate against its Cramer-Rao bound.

    Runs the experiment for every level in ``levels_sweep`` and every
    size in ``n_est_sweep`` (or the single configured values) and splits
    the MSE of ``theta^1_X`` into squared bias and variance.

    Args:
        settings (dict): Experiment settings.
        output_dir (str): Directory for the table and per-run files;
            defaults to None to skip writing.
        prefix (str): File name prefix.
        overrides: Settings replacing those in ``settings``.

    Returns:
        :obj:`pd.DataFrame`: One row per estimator, level, and size.

    """
    base = ExperimentConfig.from_settings(settings, **overrides)
    levels_list = libsyn.to_seq(
        settings.get("levels_sweep") or base.levels)
    n_est_list = libsyn.to_seq(settings.get("n_est_sweep") or base.n_est)
    cols = config.MseCrbCols
    rows = []
    for levels in levels_list:
        for n_est in n_est_list:
            cfg = ExperimentConfig(**{
                **base.to_dict(), "levels": int(levels),
                "n_est": int(n_est)})
            run_prefix = "{}L{}_n{}_".format(prefix, levels, n_est)
            result = run_experiment(cfg, output_dir, run_prefix)
            tree = cfg.build_tree()
            _, report = fisher_for(cfg, tree, cfg.truth_rates(tree))
            for est_name, errs in result.errors.items():
                x1 = errs[:, 0]
                bias2 = float(np.mean(x1) ** 2)
                variance = float(np.var(x1))
                rows.append({
                    cols.ESTIMATOR: est_name,
                    cols.LEVELS: cfg.levels,
                    cols.N_EST: cfg.n_est,
                    cols.MSE: float(np.mean(x1 ** 2)),
                    cols.CRB: float(report.bounds[0]),
                    cols.BIAS2: bias2,
                    cols.VARIANCE: variance,
                    cols.N_TRIALS: len(x1),
                })
    df = df_io.dict_to_data_frame(rows) if rows else pd.DataFrame(
        columns=[c.value for c in cols])
    df_io.add_provenance(df, base.config_hash, base.seed)
    df_io.data_frames_to_csv(
        df, _out_path(output_dir, prefix, config.SUFFIX_MSE_CRB), show=" ")
    return df
