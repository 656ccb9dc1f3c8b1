# Config file for shared settings
"""Configuration storage module.

Settings shared across the package live here as module-level attributes,
set from command-line flags and profiles in :mod:`syndromest.io.cli` and
read by the library modules. Library functions take explicit arguments
and fall back to these values only when an argument is not given.

Attributes:
    verbose: True for verbose diagnostic output.
    cpus: Number of worker processes for trial-level parallelism; None
        uses all available CPUs, capped by the ``SYNDROMEST_THREADS``
        environment variable.
    seed: Master random number generator seed.
    output_dir: Directory for result files.
    chunk_size: Number of syndromes decoded per batch. Fixed independently
        of ``cpus`` so that results do not depend on the worker count.
"""

from enum import Enum, auto
import os

#: bool: True for verbose debugging output.
verbose = False

#: str: Environment variable capping the number of worker processes.
ENV_THREADS = "SYNDROMEST_THREADS"

#: int: Number of CPUs for multiprocessing tasks; defaults to None to
# use the number determined by the CPU count.
cpus = None

#: int: Master random number generator seed; mandatory for experiments.
seed = None

#: str: Output directory for CSV and JSON results.
output_dir = "output"

#: int: Syndromes per decoding batch.
chunk_size = 512

#: :class:`syndromest.settings.experiment_prof.ExperimentProfile`:
# Experiment settings profile.
experiment_profile = None


# ENUMERATION BUDGETS

#: int: Maximum number of set-choice assignments enumerated exactly.
ENUM_MAX_ASSIGNMENTS = 2 ** 24
#: int: Maximum qubit count for whole-group coset enumeration.
ENUM_MAX_QUBITS = 12
#: int: Maximum total syndrome bits for exact Fisher information.
FISHER_MAX_BITS = 20


# NUMERICS

#: Tuple[float, float]: Rates are clamped to this range between iterations.
RATE_CLAMP = (1e-12, 1 - 1e-12)
#: float: Default convergence tolerance as max absolute rate change.
EM_TOL = 1e-6
#: int: Default cap on estimator iterations.
EM_N_ITER = 30
#: int: Multiplier of ``max(dim) * sigma_max * eps`` for numerical rank.
RANK_TOL_FACTOR = 64
#: float: Tolerance for exact equalities checked on floating point values.
EXACT_TOL = 1e-12
#: float: Denominators below this magnitude are ill-conditioned.
ILL_COND_TOL = 1e-9


# TASKS

#: :class:`Enum`: Command-line subcommands. ``simulate`` samples a
# syndrome dataset, ``estimate`` runs estimators on a dataset or on
# freshly sampled trials, ``sweep`` runs MSE versus CRB over data sizes
# and levels, ``crb`` evaluates Fisher information and bounds,
# ``identify`` runs the rank tests, ``weights`` runs the weight
# distribution recursion against brute force, ``closedform`` applies the
# correlation estimators, and ``summary`` emits box plot statistics from
# a results directory.
ProcessTypes = Enum(
    "ProcessTypes", (
        "SIMULATE",
        "ESTIMATE",
        "SWEEP",
        "CRB",
        "IDENTIFY",
        "WEIGHTS",
        "CLOSEDFORM",
        "SUMMARY",
    )
)
proc_type = None

#: :class:`Enum`: Rate estimators.
Estimators = Enum(
    "Estimators", (
        "EM",  # soft assignments from BP posteriors
        "HEM",  # hard assignments from max-sum MAP errors
        "BOTH",
    )
)

#: :class:`Enum`: Initialization schemes for experiments.
InitModes = Enum(
    "InitModes", (
        "DIRICHLET",  # truth fixed at p, init drawn around it
        "FIXED_INIT",  # init fixed at p, truth drawn around it
    )
)


class DirichletConventions(Enum):
    """Exponent conventions for Dirichlet densities.

    ``LITERAL`` reads the density ``prod(theta_e ** alpha_e)`` as written,
    giving concentration parameters ``alpha_e + 1``; ``STANDARD`` uses
    ``prod(theta_e ** (alpha_e - 1))``.
    """
    LITERAL = auto()
    STANDARD = auto()


class PseudocountForms(Enum):
    """Regularizer pseudocounts from reference rates ``theta0``.

    ``COMPLEMENT`` gives ``(1 - theta0) * beta`` per error; ``PROPORTIONAL``
    gives ``theta0 * beta``, whose prior mode is the reference itself.
    """
    COMPLEMENT = auto()
    PROPORTIONAL = auto()


class FisherModes(Enum):
    """Evaluation modes of Fisher information.

    ``AUTO`` enumerates every syndrome up to :const:`FISHER_MAX_BITS` bits
    and samples syndromes beyond. ``DIRECT`` is the information of the
    errors themselves and only serves as a reference.
    """
    AUTO = "auto"
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"
    DIRECT = "direct"


class CodeNames(Enum):
    """Built-in code constructor names."""
    FIVE_QUBIT = "five_qubit"
    STEANE = "steane"
    REPETITION = "repetition"


# OUTPUT

#: int: Version of the CSV and JSON schemas.
SCHEMA_VERSION = 1

#: str: Suffix for per-trial results.
SUFFIX_TRIALS = "trials.csv"
#: str: Suffix for per-iteration traces.
SUFFIX_TRACE = "trace.csv"
#: str: Suffix for MSE versus CRB tables.
SUFFIX_MSE_CRB = "mse_vs_crb.csv"
#: str: Suffix for summary statistics.
SUFFIX_SUMMARY = "summary.csv"
#: str: Suffix for per-parameter Cramer-Rao bounds.
SUFFIX_CRB = "crb.csv"
#: str: Suffix for sampled syndrome datasets.
SUFFIX_DATASET = "syndromes.csv"


class MetaCols(Enum):
    """Provenance columns embedded in every output file."""
    SCHEMA = "schema_version"
    CONFIG_HASH = "config_hash"
    SEED = "seed"


class TrialCols(Enum):
    """Per-trial result columns."""
    TRIAL = "trial"
    ESTIMATOR = "estimator"
    LEVELS = "levels"
    N_EST = "n_est"
    N_ITER = "n_iter_run"
    CONVERGED = "converged"
    MSE = "mse"
    MSE_X1 = "mse_theta1_x"
    LER_INIT = "ler_init"
    LER_EST = "ler_est"
    LER_TRUTH = "ler_truth"
    LOGLIK = "loglik"
    ABORTED = "aborted"
    MESSAGE = "message"


class TraceCols(Enum):
    """Per-iteration trace columns."""
    TRIAL = "trial"
    ESTIMATOR = "estimator"
    ITER = "iter"
    PARAM = "param"
    VALUE = "value"
    TRUTH = "truth"
    LOGLIK = "loglik"
    WALL_TIME = "wall_time"


class MseCrbCols(Enum):
    """MSE versus CRB columns."""
    ESTIMATOR = "estimator"
    LEVELS = "levels"
    N_EST = "n_est"
    MSE = "mse"
    CRB = "crb"
    BIAS2 = "bias2"
    VARIANCE = "variance"
    N_TRIALS = "n_trials"


class SummaryCols(Enum):
    """Box plot summary columns."""
    CONFIG = "config"
    METRIC = "metric"
    N = "n"
    MIN = "min"
    Q1 = "q1"
    MEDIAN = "median"
    Q3 = "q3"
    MAX = "max"
    WHISKER_LO = "whisker_lo"
    WHISKER_HI = "whisker_hi"
    OUTLIERS = "outliers"


def get_cpus():
    """Get the number of worker processes, applying the environment cap.

    Returns:
        int: Number of processes, or None to let the pool decide when
        neither :attr:`cpus` nor :const:`ENV_THREADS` is set.

    """
    n = cpus
    cap = os.environ.get(ENV_THREADS)
    if cap:
        try:
            cap = max(1, int(cap))
        except ValueError:
            cap = None
    if cap:
        n = cap if n is None else min(n, cap)
    return n
