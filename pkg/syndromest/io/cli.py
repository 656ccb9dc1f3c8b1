#!/usr/bin/env python
# Command line parsing and setup
"""Command line parser and task dispatch for SyndromEst.

Examples:
    Run EM on the concatenated 5-qubit code at desk scale:

        $ python -m syndromest.io.cli estimate --profile desk --seed 7

    Layer profiles and files, then override single settings:

        $ python -m syndromest.io.cli sweep --profile level1,both \
            --config mysweep.yaml --n_est_sweep 100 1000 --seed 3

Settings are layered in this order, later ones taking precedence:
experiment profile defaults, named profiles and profile files given by
``--profile`` and ``--config``, and individual flags.

Exit codes are 0 on success, 2 for configuration and argument errors,
and 3 for numerical failures.
"""

import argparse
import itertools
import os
import sys

import numpy as np
import pandas as pd

from syndromest.infer import chunking, decoder, estimate
from syndromest.io import code_io, df_io, libsyn
from syndromest.qec import noise
from syndromest.settings import config, experiment_prof
from syndromest.stats import (
    closedform, experiment, fisher, identify, summary)

#: int: Exit code for configuration and argument errors.
EXIT_CONFIG = 2
#: int: Exit code for numerical failures.
EXIT_NUMERICAL = 3

#: Tuple[str]: Experiment profile settings exposed as flags.
_PROFILE_FLAGS = (
    ("code", str, "Code name such as five_qubit, steane, repetition:5, "
                  "or a code definition file"),
    ("levels", int, "Concatenation levels"),
    ("p", float, "Truth rate of each of X, Y, and Z"),
    ("p_m", float, "Syndrome bit flip rate"),
    ("alpha", float, "Dirichlet concentration scale"),
    ("beta", float, "Regularizer strength"),
    ("n_est", int, "Syndromes per dataset"),
    ("n_iter", int, "Maximum estimator iterations"),
    ("tol", float, "Convergence tolerance as max absolute rate change"),
    ("n_trials", int, "Number of trials"),
    ("n_decode_trials", int, "Decoding trials per logical error rate"),
    ("n_fisher_samples", int, "Monte-Carlo samples for Fisher information"),
)

#: Tuple: Enum settings exposed as flags.
_ENUM_FLAGS = (
    ("estimator", config.Estimators),
    ("init_mode", config.InitModes),
    ("dirichlet_convention", config.DirichletConventions),
    ("pseudocount_form", config.PseudocountForms),
    ("fisher_mode", config.FisherModes),
)


def _build_parser():
    parser = argparse.ArgumentParser(
        description="Estimate noise rates from syndrome statistics")
    parser.add_argument(
        "proc", type=str.lower,
        choices=libsyn.enum_names_aslist(config.ProcessTypes),
        help="Task to run")

    # settings sources
    parser.add_argument(
        "--profile",
        help="Experiment profiles or profile files, separated by commas")
    parser.add_argument(
        "--config", help="Settings file in YAML or JSON format")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument(
        "--cpus", type=int, help="Maximum number of worker processes")
    parser.add_argument(
        "--chunk_size", type=int, help="Syndromes decoded per batch")
    parser.add_argument("-o", "--output_dir", help="Output directory")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Verbose output")

    # experiment settings
    for name, kind, msg in _PROFILE_FLAGS:
        parser.add_argument("--{}".format(name), type=kind, help=msg)
    for name, enum_class in _ENUM_FLAGS:
        parser.add_argument(
            "--{}".format(name), type=str.lower,
            choices=libsyn.enum_names_aslist(enum_class))
    parser.add_argument(
        "--n_est_sweep", nargs="*", type=int, help="Dataset sizes to sweep")
    parser.add_argument(
        "--levels_sweep", nargs="*", type=int, help="Levels to sweep")

    # task inputs
    parser.add_argument("--dataset", help="Syndrome dataset CSV to estimate")
    parser.add_argument(
        "--model", help="Noise model file for identify, crb, and closedform")
    parser.add_argument(
        "--n_samples", type=int, default=0,
        help="Sampled syndromes for closedform; 0 for exact moments")
    parser.add_argument(
        "--n_boot", type=int, default=200,
        help="Bootstrap resamples for sampled closedform estimates")
    parser.add_argument(
        "--results", help="Results directory to summarize")
    return parser


def setup_settings(args):
    """Apply flags and profiles to :mod:`config` and the experiment
    profile.

    Args:
        args (:obj:`argparse.Namespace`): Parsed arguments.

    Returns:
        :class:`experiment_prof.ExperimentProfile`: Resolved settings.

    """
    if args.verbose:
        config.verbose = args.verbose
        print("Set verbose to {}".format(config.verbose))
    if args.cpus is not None:
        config.cpus = args.cpus
        print("Set maximum number of CPUs for multiprocessing tasks to",
              config.cpus)
    if args.chunk_size is not None:
        config.chunk_size = args.chunk_size
        print("Set chunk size to {}".format(config.chunk_size))
    if args.output_dir is not None:
        config.output_dir = args.output_dir
        print("Set output directory to {}".format(config.output_dir))

    # layer profiles then files, both as comma-separated modifiers
    profile = experiment_prof.ExperimentProfile()
    names = [n for n in (args.profile, args.config) if n]
    if names:
        profile.update_settings(",".join(names))
    print("Set experiment profile to {}".format(profile[profile.NAME_KEY]))

    # individual flags take precedence over profiles
    for name, _, _ in _PROFILE_FLAGS:
        val = getattr(args, name)
        if val is not None:
            profile[name] = val
            print("Set {} to {}".format(name, val))
    for name, enum_class in _ENUM_FLAGS:
        val = getattr(args, name)
        if val is not None:
            profile[name] = libsyn.get_enum(val, enum_class)
            print("Set {} to {}".format(name, profile[name]))
    for name in ("n_est_sweep", "levels_sweep"):
        val = getattr(args, name)
        if val:
            profile[name] = val
            print("Set {} to {}".format(name, val))
    if args.seed is not None:
        profile["seed"] = args.seed
    config.seed = profile["seed"]
    if config.seed is not None:
        print("Set seed to {}".format(config.seed))
    config.experiment_profile = profile
    return profile


def _settings_hash(profile):
    return libsyn.config_hash(
        {k: v for k, v in profile.items() if k != profile.NAME_KEY})


def _require_seed(profile):
    if profile["seed"] is None:
        raise libsyn.ConfigError(
            "a master seed is required; set it with --seed")
    return int(profile["seed"])


def _meta(profile):
    return {
        config.MetaCols.SCHEMA.value: config.SCHEMA_VERSION,
        config.MetaCols.CONFIG_HASH.value: _settings_hash(profile),
        config.MetaCols.SEED.value: profile["seed"],
        "settings": {k: v for k, v in profile.items()},
    }


def _out(name):
    return os.path.join(config.output_dir, name)


def _base_code(profile):
    return code_io.load_code(str(getattr(
        profile["code"], "value", profile["code"])))


def simulate(profile):
    """Sample one dataset from the truth rates and save it."""
    cfg = experiment.ExperimentConfig.from_settings(profile)
    tree = cfg.build_tree()
    truth = cfg.truth_rates(tree)
    rng = experiment.trial_rng(cfg.seed, 0, experiment.STREAM_DATA)
    data = estimate.SyndromeDataset.sample(tree, truth, cfg.n_est, rng,
                                           cfg.seed)
    print("Sampled {} syndromes of {} bits".format(len(data), data.n_bits))
    code_io.dataset_to_csv(data, _out(config.SUFFIX_DATASET),
                           cfg.config_hash, cfg.seed)
    return data


def estimate_rates(profile, dataset_path=None):
    """Estimate rates from a saved dataset, or run simulated trials.

    A saved dataset is estimated once per configured estimator from an
    initialization drawn from the first trial's stream.

    """
    if not dataset_path:
        return experiment.run_experiment(profile, config.output_dir)
    cfg = experiment.ExperimentConfig.from_settings(profile)
    tree = cfg.build_tree()
    bits, data_seed = code_io.load_dataset(dataset_path)
    data = estimate.SyndromeDataset(bits, data_seed)
    if data.n_bits != tree.n_bits:
        raise libsyn.DimensionError(
            "dataset has {} bits; the code at {} levels has {}".format(
                data.n_bits, cfg.levels, tree.n_bits))
    _, init = experiment.draw_rates(cfg, tree, experiment.trial_rng(
        cfg.seed, 0, experiment.STREAM_INIT))
    graph = decoder.build_factor_graph(tree, init.clamp())
    regularizer = None
    if cfg.beta:
        regularizer = estimate.RegularizerConfig(
            cfg.beta, init.clamp(), cfg.pseudocount_form,
            cfg.dirichlet_convention)
    rows = []
    for est in cfg.estimators():
        run = estimate.run_estimator(
            init, data, graph, est, cfg.n_iter, cfg.tol, regularizer,
            {"master": cfg.seed, "data": data_seed})
        labels = run.final.rates.param_labels()
        for state in run.states:
            for label, val in zip(labels, state.rates.param_vector()):
                rows.append({
                    config.TraceCols.ESTIMATOR: est.name.lower(),
                    config.TraceCols.ITER: state.iteration,
                    config.TraceCols.PARAM: label,
                    config.TraceCols.VALUE: val,
                    config.TraceCols.LOGLIK: state.loglik,
                    config.TraceCols.WALL_TIME: state.wall_time,
                })
        print("{} finished after {} iterations, converged: {}".format(
            est.name, run.n_iter_run, run.converged))
    df = df_io.dict_to_data_frame(rows)
    df_io.add_provenance(df, cfg.config_hash, cfg.seed)
    return df_io.data_frames_to_csv(df, _out(config.SUFFIX_TRACE))


def crb_report(profile, model_path=None):
    """Fisher information and Cramer-Rao bounds at the truth rates."""
    cfg = experiment.ExperimentConfig.from_settings(profile)
    tree = cfg.build_tree()
    truth = cfg.truth_rates(tree)
    if model_path:
        rates = code_io.load_model(model_path, tree.base, tree.n_bits)
        if not isinstance(rates, noise.SingleQubitPauliRates):
            raise libsyn.ModelError(
                "CRB models must be depolarizing or phenomenological")
        truth = noise.SingleQubitPauliRates(
            np.tile(rates.rates[:1], (tree.n_leaves, 1)), rates.meas)
    info, report = experiment.fisher_for(cfg, tree, truth)
    direct = fisher.fisher_direct(truth)
    gap = fisher.loewner_gap(direct, info)
    print("Fisher trace ratio direct to syndrome: {:.3g}".format(
        gap.trace_ratio))
    out = _meta(profile)
    out.update({
        "fisher": info.matrix,
        "mode": info.mode.value,
        "n_samples": info.n_samples,
        "crb": report.to_dict(),
        "loewner_min_eigenvalue": gap.min_eigenvalue,
        "direct_trace_ratio": gap.trace_ratio,
    })
    libsyn.write_json(out, _out("crb.json"))
    df = pd.DataFrame({"param": list(report.labels),
                       "crb": report.bounds})
    df_io.add_provenance(df, cfg.config_hash, cfg.seed)
    df_io.data_frames_to_csv(df, _out(config.SUFFIX_CRB), show=" ")
    return report


def identify_report(profile, model_path=None):
    """Rank tests at zero and at the model rates on the base code."""
    code = _base_code(profile)
    if model_path:
        model = code_io.as_model(
            code_io.load_model(model_path, code), code)
    else:
        model = noise.SingleQubitPauliRates.depolarizing(
            code.n, float(profile["p"])).to_model()
    at_zero = identify.jacobian_at_zero(code, model)
    interior = identify.jtilde(code, model)
    print("Jacobian at zero: rank {} of {}".format(
        at_zero.rank, at_zero.matrix.shape[1]))
    print("Transformed Jacobian: rank {} of {}, gap {:.3g}".format(
        interior.rank, interior.matrix.shape[1], interior.gap))
    out = _meta(profile)
    out.update({
        "code": str(code),
        "jacobian_at_zero": at_zero.to_dict(),
        "jtilde": interior.to_dict(),
    })
    if code.is_perfect:
        checks = [identify.equal_conditional_probs_check(
            code, float(profile["p"]), q) for q in range(1, code.n + 1)]
        out["equal_conditional"] = [
            {"qubit": c.qubit, "holds": c.holds, "max_diff": c.max_diff}
            for c in checks]
    libsyn.write_json(out, _out("identify.json"))
    return at_zero, interior


def weights_report(profile):
    """Compare the weight recursion with brute force on a perfect code."""
    code = _base_code(profile)
    if not code.is_perfect:
        raise libsyn.UnsupportedCodeError(
            "{} is not a perfect code".format(code))
    rows = []
    n_mismatch = 0
    for qubit in range(1, code.n + 1):
        for s_star in range(1, 2 ** code.l):
            cases = identify.kw_cases(code, qubit, s_star)
            recursive = identify.kw_recursive(code.n, cases, qubit, s_star)
            for e, rec in enumerate(recursive):
                brute = identify.kw_bruteforce(code, e, qubit, s_star)
                match = brute.values == rec.values
                n_mismatch += not match
                rows.append({
                    "qubit": qubit, "pauli": e, "s_star": s_star,
                    "case": rec.case.value, "recursive": rec.values,
                    "bruteforce": brute.values, "match": match})
    print("{} of {} weight distributions match brute force".format(
        len(rows) - n_mismatch, len(rows)))
    out = _meta(profile)
    out.update({"code": str(code), "mismatches": n_mismatch,
                "distributions": rows})
    libsyn.write_json(out, _out("weights.json"))
    if n_mismatch:
        raise libsyn.RecursionConsistencyError(
            "{} weight distributions differ from brute force".format(
                n_mismatch))
    return rows


def closedform_report(profile, model_path=None, n_samples=0, n_boot=200):
    """Closed-form estimates on binary circuit noise.

    Pairs of bits are estimated from the error they share if the pair
    conditions hold; each bit's remaining rate is solved from the other
    rates flipping it.

    """
    code = _base_code(profile)
    if model_path:
        model = closedform.BinaryCircuitModel.from_model(
            code_io.as_model(code_io.load_model(model_path, code), code),
            code)
    else:
        model = closedform.BinaryCircuitModel.bitflip(
            code, np.full(code.n, float(profile["p"])))
    bits = None
    if n_samples:
        rng = experiment.trial_rng(
            _require_seed(profile), 0, experiment.STREAM_DATA)
        bits = model.sample(n_samples, rng)
        moments = closedform.sample_moments(bits)
    else:
        moments = closedform.exact_moments(model)
    inc = model.incidence
    pairs = []
    for i, j in itertools.combinations(range(1, code.l + 1), 2):
        shared = np.flatnonzero(inc[:, i - 1] & inc[:, j - 1])
        for q in shared:
            report = closedform.check_so1_preconditions(model, i, j, q + 1)
            entry = {"bits": [i, j], "error": model.labels[q],
                     "truth": model.rates[q], "failed": report.failed}
            if report.holds:
                entry["estimate"] = closedform.so1_estimate(
                    moments, i, j).rate
                if bits is not None:
                    boot = closedform.bootstrap_so1(
                        bits, i, j, n_boot, experiment.trial_rng(
                            _require_seed(profile), 0,
                            experiment.STREAM_FISHER))
                    entry["bootstrap_std"] = boot.std
            pairs.append(entry)
    singles = []
    for bit in range(1, code.l + 1):
        idx = model.anticommuting(bit)
        if not len(idx):
            continue
        est = closedform.so2_estimate(moments.mean[bit - 1],
                                      model.rates[idx[1:]])
        singles.append({"bit": bit, "error": model.labels[idx[0]],
                        "truth": model.rates[idx[0]],
                        "estimate": est.rate,
                        "out_of_range": est.out_of_range})
    count = closedform.count_equations(model, code)
    print("{} equations for {} parameters".format(
        count.n_equations, count.n_params))
    out = _meta(profile)
    out.update({"code": str(code), "n_samples": n_samples,
                "pairs": pairs, "singles": singles,
                "n_equations": count.n_equations,
                "n_params": count.n_params})
    libsyn.write_json(out, _out("closedform.json"))
    return out


def process_proc(proc_type, args, profile):
    """Dispatch a task."""
    if proc_type is config.ProcessTypes.SIMULATE:
        return simulate(profile)
    if proc_type is config.ProcessTypes.ESTIMATE:
        return estimate_rates(profile, args.dataset)
    if proc_type is config.ProcessTypes.SWEEP:
        return experiment.mse_vs_crb(profile, config.output_dir)
    if proc_type is config.ProcessTypes.CRB:
        return crb_report(profile, args.model)
    if proc_type is config.ProcessTypes.IDENTIFY:
        return identify_report(profile, args.model)
    if proc_type is config.ProcessTypes.WEIGHTS:
        return weights_report(profile)
    if proc_type is config.ProcessTypes.CLOSEDFORM:
        return closedform_report(
            profile, args.model, args.n_samples, args.n_boot)
    if proc_type is config.ProcessTypes.SUMMARY:
        return summary.emit_summary(args.results or config.output_dir)
    raise libsyn.ConfigError("unknown task {}".format(proc_type))


def main(args=None):
    """Parse arguments, set up settings, and run the chosen task.

    Args:
        args (List[str]): Arguments; defaults to None for ``sys.argv``.

    Returns:
        int: Exit code.

    """
    parser = _build_parser()
    try:
        args = parser.parse_args(args)
    except SystemExit as e:
        return e.code
    config.proc_type = libsyn.get_enum(args.proc, config.ProcessTypes)
    print("processing type set to {}".format(config.proc_type))
    try:
        profile = setup_settings(args)
        if config.proc_type not in (
                config.ProcessTypes.SUMMARY, config.ProcessTypes.IDENTIFY,
                config.ProcessTypes.WEIGHTS):
            _require_seed(profile)
        process_proc(config.proc_type, args, profile)
    except libsyn.ConfigError as e:
        print("configuration error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG
    except libsyn.NumericalError as e:
        print("numerical failure: {}".format(e), file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    print("Starting SyndromEst command-line interface...")
    chunking.set_mp_start_method()
    sys.exit(main())
