# Closed-form rate estimators from syndrome correlations
"""Closed-form estimators for independent binary circuit noise.

Each elementary error ``X_q`` occurs independently with rate ``theta_q``
and flips a fixed set of syndrome bits. Two estimators follow:

- From a pair of bits ``S_i, S_j`` whose correlation is carried by a single
  error ``X``, ``theta_X (1 - theta_X) = (E[S_i S_j] - E[S_i] E[S_j])
  / (1 - 2 E[S_i xor S_j])``.
- From one bit ``S`` and the rates of all but one of the errors flipping
  it, ``prod_q (1 - 2 theta_q) = 1 - 2 E[S]``.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from syndromest.io import libsyn
from syndromest.qec import noise, pauli
from syndromest.settings import config


@dataclass(frozen=True, eq=False)
class BinaryCircuitModel:
    """Independent binary errors with fixed syndrome bit incidence.

    Attributes:
        code (:class:`pauli.StabilizerCode`): Code measured.
        errors (Tuple[:class:`noise.ErrorEvent`]): Elementary errors.
        rates (:obj:`np.ndarray`): Rate of each error.

    """
    code: pauli.StabilizerCode
    errors: tuple
    rates: np.ndarray

    def __post_init__(self):
        errors = tuple(self.errors)
        rates = np.array(self.rates, dtype=float).ravel()
        if len(errors) != len(rates):
            raise libsyn.DimensionError(
                "{} rates for {} errors".format(len(rates), len(errors)))
        if np.any(rates < 0) or np.any(rates > 1):
            raise libsyn.ModelError("rates must lie in [0, 1]")
        if len(set(errors)) != len(errors):
            raise libsyn.ModelError("elementary errors must be distinct")
        rates.setflags(write=False)
        object.__setattr__(self, "errors", errors)
        object.__setattr__(self, "rates", rates)

    @classmethod
    def bitflip(cls, code, rates):
        """Single-qubit X errors on every qubit."""
        errors = tuple(noise.ErrorEvent(pauli.PauliString.single(
            code.n, i + 1, pauli.Pauli.X)) for i in range(code.n))
        return cls(code, errors, rates)

    @classmethod
    def from_model(cls, model, code):
        """Binary model from a decomposable model of singleton sets."""
        if any(len(s) != 1 for s in model.sets):
            raise libsyn.ModelError(
                "binary circuit noise needs one error per set")
        return cls(code, tuple(s.elements[0] for s in model.sets),
                   model.param_vector())

    @property
    def m(self):
        return len(self.errors)

    @property
    def incidence(self):
        """``(m, l)`` 0/1 array of the syndrome bits each error flips."""
        rows = []
        for e in self.errors:
            synd = (e.observed_syndrome(self.code) if e.l
                    else pauli.syndrome(self.code, e.data))
            rows.append(synd.bits)
        return np.array(rows, dtype=np.uint8).reshape(self.m, self.code.l)

    @property
    def labels(self):
        return tuple(str(e) for e in self.errors)

    def to_model(self):
        sets = tuple(noise.ErrorSet((e,)) for e in self.errors)
        return noise.DecomposableModel(
            sets, tuple([r] for r in self.rates), self.labels)

    def anticommuting(self, bit):
        """0-based indices of errors flipping 1-based ``bit``."""
        return np.flatnonzero(self.incidence[:, bit - 1])

    def sample(self, size, rng):
        """Sample ``(size, l)`` syndrome bits."""
        occurs = (rng.random((size, self.m)) < self.rates).astype(np.int64)
        return (occurs @ self.incidence.astype(np.int64)) % 2


@dataclass(frozen=True, eq=False)
class SyndromeMoments:
    """First and second syndrome moments.

    Attributes:
        mean (:obj:`np.ndarray`): ``E[S_i]`` per bit.
        joint (:obj:`np.ndarray`): ``E[S_i S_j]`` matrix.
        xor (:obj:`np.ndarray`): ``E[S_i xor S_j]`` matrix.
        n_samples (int): Sample count, or None for exact moments.

    """
    mean: np.ndarray
    joint: np.ndarray
    xor: np.ndarray
    n_samples: int = None

    @classmethod
    def from_joint(cls, mean, joint, n_samples=None):
        mean = np.asarray(mean, dtype=float)
        joint = np.asarray(joint, dtype=float)
        xor = mean[:, None] + mean[None, :] - 2 * joint
        return cls(mean, joint, xor, n_samples)

    @property
    def l(self):
        return len(self.mean)


def _as_model(model):
    if isinstance(model, BinaryCircuitModel):
        return model.to_model(), model.code
    raise libsyn.ModelError("expected a binary circuit model")


def exact_moments(model, code=None):
    """Exact syndrome moments by enumeration.

    Args:
        model (Union[:class:`BinaryCircuitModel`,
            :class:`noise.DecomposableModel`]): Model.
        code (:class:`pauli.StabilizerCode`): Code for decomposable models;
            defaults to None to use the binary model's code.

    Returns:
        :class:`SyndromeMoments`: Moments.

    """
    if code is None:
        model, code = _as_model(model)
    elif isinstance(model, BinaryCircuitModel):
        model = model.to_model()
    probs = noise.syndrome_probabilities(model, code)
    bits = np.array([pauli.Syndrome(code.l, s).bits
                     for s in range(2 ** code.l)], dtype=float)
    mean = probs @ bits
    joint = bits.T @ (bits * probs[:, None])
    return SyndromeMoments.from_joint(mean, joint)


def sample_moments(bits):
    """Plug-in moments from a ``(N, l)`` array of syndrome bits."""
    bits = np.asarray(bits, dtype=float)
    if bits.ndim != 2 or not len(bits):
        raise libsyn.DimensionError("expected a nonempty (N, l) bit array")
    n_samples = len(bits)
    mean = bits.mean(axis=0)
    joint = bits.T @ bits / n_samples
    return SyndromeMoments.from_joint(mean, joint, n_samples)


@dataclass(frozen=True)
class SO1Estimate:
    """Rate from a correlated pair of syndrome bits.

    Attributes:
        rate (float): Root in ``[0, 1/2]``.
        discarded_root (float): Symmetric root ``1 - rate``.
        product (float): Estimated ``theta (1 - theta)``.
        numerator (float): Covariance of the pair.
        denominator (float): ``1 - 2 E[S_i xor S_j]``.

    """
    rate: float
    discarded_root: float
    product: float
    numerator: float
    denominator: float


def _check_bit(moments, bit):
    if not 1 <= bit <= moments.l:
        raise libsyn.DimensionError(
            "bit {} outside 1..{}".format(bit, moments.l))


def so1_estimate(moments, i, j, tol=None):
    """Rate of the single error correlating two syndrome bits.

    Args:
        moments (:class:`SyndromeMoments`): Moments.
        i, j (int): Distinct 1-based syndrome bits.
        tol (float): Tolerance on the denominator and on the product range;
            defaults to None for :const:`config.ILL_COND_TOL`.

    Returns:
        :class:`SO1Estimate`: Estimate.

    Raises:
        :class:`libsyn.IllConditionedError`: if the denominator is near 0.
        :class:`libsyn.InconsistentMomentsError`: if the product lies
        outside ``[0, 1/4]``.

    """
    if tol is None:
        tol = config.ILL_COND_TOL
    _check_bit(moments, i)
    _check_bit(moments, j)
    if i == j:
        raise libsyn.ConfigError("the bits of a pair must differ")
    a, b = i - 1, j - 1
    num = moments.joint[a, b] - moments.mean[a] * moments.mean[b]
    denom = 1 - 2 * moments.xor[a, b]
    if abs(denom) <= tol:
        raise libsyn.IllConditionedError(
            "1 - 2 E[S_{} xor S_{}] = {:.3g} is near zero".format(i, j, denom))
    product = num / denom
    if product < -tol or product > 0.25 + tol:
        raise libsyn.InconsistentMomentsError(
            "theta (1 - theta) = {:.6g} lies outside [0, 1/4]".format(product))
    product = min(max(product, 0.0), 0.25)
    rate = (1 - math.sqrt(1 - 4 * product)) / 2
    return SO1Estimate(rate, 1 - rate, product, num, denom)


@dataclass(frozen=True)
class SO2Estimate:
    """Remaining rate from one bit and known rates.

    Attributes:
        rate (float): Estimate clamped to ``[0, 1]``.
        raw (float): Unclamped estimate.
        out_of_range (bool): True if clamping changed the estimate.

    """
    rate: float
    raw: float
    out_of_range: bool


def so2_estimate(mean_s, known_rates, tol=None):
    """Remaining rate among the errors flipping one syndrome bit.

    Solves ``1 - 2 theta_1 = (1 - 2 E[S]) / prod_q (1 - 2 theta_q)`` over
    the known rates ``theta_q``.

    Args:
        mean_s (float): ``E[S]``.
        known_rates (Sequence[float]): Rates of the other errors flipping
            the bit; may be empty.
        tol (float): Threshold on each factor ``1 - 2 theta_q``; defaults
            to None for :const:`config.ILL_COND_TOL`.

    Returns:
        :class:`SO2Estimate`: Estimate.

    Raises:
        :class:`libsyn.IllConditionedError`: if a known rate is near 1/2.

    """
    if tol is None:
        tol = config.ILL_COND_TOL
    factors = 1 - 2 * np.asarray(known_rates, dtype=float).ravel()
    if np.any(np.abs(factors) <= tol):
        raise libsyn.IllConditionedError(
            "a known rate is 1/2, so its factor vanishes")
    raw = (1 - (1 - 2 * mean_s) / np.prod(factors)) / 2
    rate = min(max(raw, 0.0), 1.0)
    out_of_range = rate != raw
    if out_of_range:
        libsyn.warn("remaining rate {:.6g} clamped to [0, 1]".format(raw))
    return SO2Estimate(float(rate), float(raw), out_of_range)


def so2_product_gap(model, bit):
    """``|prod_q (1 - 2 theta_q) - (1 - 2 E[S])|`` over the errors
    flipping a bit, with ``E[S]`` by enumeration."""
    moments = exact_moments(model)
    factors = 1 - 2 * model.rates[model.anticommuting(bit)]
    return abs(np.prod(factors) - (1 - 2 * moments.mean[bit - 1]))


@dataclass(frozen=True)
class SO1PreconditionReport:
    """Conditions for the pair estimator on a pair and an error.

    Attributes:
        equal_parity (bool): ``P[S_i = S_j | X] = P[S_i = S_j]``.
        symmetric (bool): ``P[S_b = 1 | X] = P[S_b = 0 | not X]`` for both
            bits.
        conditionally_independent (bool): ``S_i`` and ``S_j`` independent
            given ``X``.
        max_diffs (Tuple[float]): Largest violation of each condition.

    """
    equal_parity: bool
    symmetric: bool
    conditionally_independent: bool
    max_diffs: tuple = ()

    @property
    def holds(self):
        return (self.equal_parity and self.symmetric
                and self.conditionally_independent)

    @property
    def failed(self):
        names = ("equal_parity", "symmetric", "conditionally_independent")
        flags = (self.equal_parity, self.symmetric,
                 self.conditionally_independent)
        return [name for name, flag in zip(names, flags) if not flag]


def check_so1_preconditions(model, i, j, q, tol=None):
    """Check the pair estimator's conditions by exact enumeration.

    Args:
        model (:class:`BinaryCircuitModel`): Model.
        i, j (int): 1-based syndrome bits.
        q (int): 1-based error index.
        tol (float): Equality tolerance; defaults to None for
            :const:`config.EXACT_TOL`.

    Returns:
        :class:`SO1PreconditionReport`: Report.

    """
    if tol is None:
        tol = config.EXACT_TOL
    if not 1 <= q <= model.m:
        raise libsyn.DimensionError("error {} outside 1..{}".format(
            q, model.m))
    table = noise.enumerate_assignments(model.to_model())
    synds = table.observed_syndromes(model.code)
    s_i = (synds >> (i - 1)) & 1
    s_j = (synds >> (j - 1)) & 1
    x = table.choices[:, q - 1]
    # P[X, S_i, S_j]
    joint = np.zeros((2, 2, 2))
    np.add.at(joint, (x, s_i, s_j), table.probs)
    p_x = joint.sum(axis=(1, 2))
    if np.any(p_x <= 0):
        raise libsyn.PositivityError(
            "error {} has a degenerate rate".format(q))
    cond = joint / p_x[:, None, None]

    same = cond[:, 0, 0] + cond[:, 1, 1]
    diff_parity = np.max(np.abs(same - joint[:, [0, 1], [0, 1]].sum()))

    marg_i = cond.sum(axis=2)
    marg_j = cond.sum(axis=1)
    diff_sym = max(abs(marg[1, 1] - marg[0, 0]) for marg in (marg_i, marg_j))

    diff_indep = np.max(np.abs(
        cond - marg_i[:, :, None] * marg_j[:, None, :]))
    report = SO1PreconditionReport(
        diff_parity <= tol, diff_sym <= tol, diff_indep <= tol,
        (float(diff_parity), float(diff_sym), float(diff_indep)))
    libsyn.printv("pair ({}, {}) with error {}: failed {}".format(
        i, j, q, report.failed or "none"))
    return report


@dataclass(frozen=True)
class EquationCount:
    """Equations available to the closed-form estimators.

    Attributes:
        n_equations (int): Pair equations plus one equation per bit.
        n_params (int): Parameters of the model.
        pairs (List[Tuple[int, int]]): Pairs of 1-based bits flipped
            together by at least one error.
        bits (List[int]): 1-based bits flipped by at least one error.

    """
    n_equations: int
    n_params: int
    pairs: list = field(default_factory=list)
    bits: list = field(default_factory=list)

    @property
    def underdetermined(self):
        return self.n_equations < self.n_params


def count_equations(model, code):
    """Count the equations obtainable from one- and two-bit moments.

    Args:
        model (Union[:class:`noise.DecomposableModel`,
            :class:`BinaryCircuitModel`]): Model.
        code (:class:`pauli.StabilizerCode`): Code.

    Returns:
        :class:`EquationCount`: At most ``C(l, 2) + l`` equations.

    """
    if isinstance(model, BinaryCircuitModel):
        model = model.to_model()
    rows = []
    for err_set in model.sets:
        for e in err_set.elements:
            synd = (e.observed_syndrome(code) if e.l
                    else pauli.syndrome(code, e.data))
            rows.append(synd.bits)
    inc = np.array(rows, dtype=bool).reshape(-1, code.l)
    bits = [b + 1 for b in range(code.l) if inc[:, b].any()]
    pairs = [(a, b) for a, b in itertools.combinations(bits, 2)
             if np.any(inc[:, a - 1] & inc[:, b - 1])]
    count = EquationCount(len(pairs) + len(bits), model.n_params, pairs, bits)
    if count.underdetermined:
        libsyn.printv("{} equations for {} parameters".format(
            count.n_equations, count.n_params))
    return count


@dataclass(frozen=True)
class BootstrapResult:
    """Bootstrap distribution of a pair estimate.

    Attributes:
        estimate (float): Estimate on the full sample.
        std (float): Bootstrap standard deviation.
        lower, upper (float): Percentile interval bounds.
        n_boot (int): Resamples drawn.
        n_failed (int): Resamples whose moments were rejected.

    """
    estimate: float
    std: float
    lower: float
    upper: float
    n_boot: int
    n_failed: int


def bootstrap_so1(bits, i, j, n_boot, rng, confidence=0.95):
    """Nonparametric bootstrap of :func:`so1_estimate`.

    Args:
        bits (:obj:`np.ndarray`): ``(N, l)`` sampled syndrome bits.
        i, j (int): 1-based bits.
        n_boot (int): Number of resamples.
        rng (:obj:`np.random.Generator`): Seeded generator.
        confidence (float): Percentile interval coverage.

    Returns:
        :class:`BootstrapResult`: Result.

    """
    bits = np.asarray(bits)
    pair = bits[:, [i - 1, j - 1]]
    estimate = so1_estimate(sample_moments(pair), 1, 2).rate
    rates = []
    n_failed = 0
    for _ in range(n_boot):
        resample = pair[rng.integers(0, len(pair), len(pair))]
        try:
            rates.append(so1_estimate(sample_moments(resample), 1, 2).rate)
        except libsyn.NumericalError:
            n_failed += 1
    if n_failed:
        libsyn.warn("{} of {} bootstrap resamples rejected".format(
            n_failed, n_boot))
    if not rates:
        raise libsyn.InconsistentMomentsError(
            "every bootstrap resample was rejected")
    alpha = (1 - confidence) / 2
    lower, upper = np.quantile(rates, [alpha, 1 - alpha])
    return BootstrapResult(estimate, float(np.std(rates, ddof=1))
                           if len(rates) > 1 else 0.0,
                           float(lower), float(upper), n_boot, n_failed)
