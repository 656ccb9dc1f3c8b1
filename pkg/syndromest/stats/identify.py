# Identifiability of error rates from syndrome statistics
"""Identifiability tests and weight distributions of perfect codes.

Rates are locally identifiable from syndrome statistics where the map
from rates to the syndrome distribution has a Jacobian of full column
rank. At zero noise the Jacobian only depends on the syndromes of the
elementary errors. At interior points the transformed Jacobian
``J~[S, theta_e] = P[X_i = e | S] / theta_e - P[X_i = I | S] / theta_I``
is evaluated by exact enumeration.

For perfect codes under equal rates, the conditional syndrome
probabilities given the error on one qubit agree for most syndromes.
This follows from equal counts ``k_w`` of coset errors by the weight of
their remaining qubits, which satisfy a recursion over ``w``.
"""

from dataclasses import dataclass, field
from enum import Enum
import itertools
import math

import numpy as np
from scipy import linalg

from syndromest.io import libsyn
from syndromest.qec import noise, pauli
from syndromest.settings import config


@dataclass(frozen=True, eq=False)
class JacobianReport:
    """Rank analysis of a Jacobian.

    Attributes:
        matrix (:obj:`np.ndarray`): Rows over syndrome values, columns
            over parameters.
        singular_values (:obj:`np.ndarray`): Descending singular values.
        rank (int): Numerical rank.
        tol (float): Rank tolerance.
        gap (float): Ratio of the smallest retained singular value to the
            largest discarded one, or to ``tol`` at full rank.
        identifiable (bool): True at full column rank.
        labels (Tuple[str]): Parameter labels.

    """
    matrix: np.ndarray
    singular_values: np.ndarray
    rank: int
    tol: float
    gap: float
    identifiable: bool
    labels: tuple = ()

    def to_dict(self):
        return {
            "matrix": self.matrix,
            "singular_values": self.singular_values,
            "rank": self.rank,
            "tol": self.tol,
            "gap": self.gap,
            "identifiable": self.identifiable,
            "labels": list(self.labels),
        }


def rank_tolerance(matrix, singular_values):
    """``max(dim) * sigma_max * eps * factor`` rank threshold."""
    smax = singular_values[0] if len(singular_values) else 0.0
    return (max(matrix.shape) * smax * np.finfo(float).eps
            * config.RANK_TOL_FACTOR)


def rank_report(matrix, labels=(), tol=None):
    """Numerical rank of a matrix with an audited singular value gap.

    Args:
        matrix (:obj:`np.ndarray`): Matrix.
        labels (Sequence[str]): Column labels.
        tol (float): Rank tolerance; defaults to None for
            :func:`rank_tolerance`.

    Returns:
        :class:`JacobianReport`: Report.

    """
    matrix = np.asarray(matrix, dtype=float)
    svals = linalg.svdvals(matrix)
    if tol is None:
        tol = rank_tolerance(matrix, svals)
    rank = int(np.sum(svals > tol))
    if rank == 0:
        gap = 0.0
    elif rank < len(svals):
        gap = (svals[rank - 1] / svals[rank] if svals[rank] > 0
               else math.inf)
    else:
        gap = svals[-1] / tol if tol > 0 else math.inf
    identifiable = rank == matrix.shape[1]
    libsyn.printv("rank {} of {} columns, tolerance {:.3g}, gap {:.3g}"
                  .format(rank, matrix.shape[1], tol, gap))
    if gap < 100:
        libsyn.warn("singular value gap of {:.3g} is under two decades; "
                    "the rank decision is fragile".format(gap))
    return JacobianReport(matrix, svals, rank, float(tol), float(gap),
                          identifiable, tuple(labels))


def _default_model(code, model):
    if model is None:
        return noise.single_error_model(code)
    if isinstance(model, noise.SingleQubitPauliRates):
        return model.to_model(code)
    return model


def jacobian_at_zero(code, model=None):
    """Jacobian of the syndrome distribution at zero rates.

    Column ``theta^i_e`` has +1 in the row of the observed syndrome of
    ``e`` and -1 in the zero row; both cancel when that syndrome is zero.

    Args:
        code (:class:`pauli.StabilizerCode`): Code.
        model (:class:`noise.DecomposableModel`): Model structure; rates are
            ignored. Defaults to None for single-qubit X, Y, Z errors.

    Returns:
        :class:`JacobianReport`: Full column rank iff the elementary
        syndromes are nonzero and pairwise distinct.

    """
    model = _default_model(code, model)
    if model.n != code.n:
        raise libsyn.DimensionError("model and code differ in qubit count")
    matrix = np.zeros((2 ** code.l, model.n_params))
    col = 0
    for err_set in model.sets:
        for e in err_set.elements:
            s = e.observed_syndrome(code) if e.l else pauli.syndrome(
                code, e.data)
            matrix[s.value, col] += 1
            matrix[0, col] -= 1
            col += 1
    return rank_report(matrix, model.labels)


def _check_positive(model):
    for err_set, theta, idx in zip(
            model.sets, model.rates, itertools.count()):
        if np.any(theta <= 0):
            bad = err_set.elements[int(np.flatnonzero(theta <= 0)[0])]
            raise libsyn.PositivityError(
                "rate of {} in set {} is zero".format(bad, idx + 1))
        if 1 - np.sum(theta) <= 0:
            raise libsyn.PositivityError(
                "identity rate of set {} is zero".format(idx + 1))


def jtilde_matrix(code, model):
    """Transformed Jacobian entries by exact enumeration.

    Returns:
        :obj:`np.ndarray`: ``(2**l, n_params)`` matrix.

    Raises:
        :class:`libsyn.PositivityError`: for a zero rate.
        :class:`libsyn.ZeroSupportError`: for a syndrome of zero
        probability.

    """
    _check_positive(model)
    p_s, joints = noise.set_posteriors(model, code)
    if np.any(p_s <= 0):
        synd = pauli.Syndrome(code.l, int(np.flatnonzero(p_s <= 0)[0]))
        raise libsyn.ZeroSupportError(
            "syndrome {} has zero probability".format(synd), synd)
    cols = []
    for theta, joint in zip(model.rates, joints):
        post = joint / p_s[None, :]
        theta_i = 1 - np.sum(theta)
        for j, rate in enumerate(theta):
            cols.append(post[j + 1] / rate - post[0] / theta_i)
    return np.stack(cols, axis=1)


def jtilde(code, model, theta=None):
    """Rank test of the transformed Jacobian at interior rates.

    Args:
        code (:class:`pauli.StabilizerCode`): Code.
        model (Union[:class:`noise.DecomposableModel`,
            :class:`noise.SingleQubitPauliRates`]): Model.
        theta (:obj:`np.ndarray`): Flat rates overriding the model's;
            defaults to None.

    Returns:
        :class:`JacobianReport`: Report.

    """
    model = _default_model(code, model)
    if theta is not None:
        model = model.with_rates(theta)
    return rank_report(jtilde_matrix(code, model), model.labels)


@dataclass(frozen=True, eq=False)
class EqualConditionalReport:
    """Conditional syndrome distributions given one qubit's error.

    Attributes:
        table (:obj:`np.ndarray`): ``(4, 2**l)`` rows ``P[S | E_q = e]``.
        qubit (int): 1-based qubit.
        p (float): Rate parameter.
        max_diff (float): Largest difference over qualifying triples.
        holds (bool): True if every qualifying difference is within
            :const:`config.EXACT_TOL`.
        violations (List[tuple]): ``(S, e, e', diff)`` failures.

    """
    table: np.ndarray
    qubit: int
    p: float
    max_diff: float
    holds: bool
    violations: list = field(default_factory=list)


def equal_rate_weights(p):
    """Per-qubit weights ``(1 - p, p, p, p) / (1 + 2p)`` for ``p`` in
    ``(0, 1)``; uniform at ``p = 0.5``."""
    return np.array([1 - p, p, p, p]) / (1 + 2 * p)


def conditional_table(code, weights, qubit):
    """``P[S | E_q = e]`` for independent per-qubit weights by
    enumeration over all errors.

    Args:
        code (:class:`pauli.StabilizerCode`): Code.
        weights (:obj:`np.ndarray`): Distribution over ``I, X, Y, Z``
            shared by all qubits.
        qubit (int): 1-based qubit.

    Returns:
        :obj:`np.ndarray`: ``(4, 2**l)`` table.

    """
    digits = pauli.assignment_digits(code.n)
    x, z = pauli.all_strings(code.n)
    synd = code.syndrome_values(x, z)
    probs = np.prod(np.asarray(weights)[digits], axis=1)
    on_qubit = digits[:, qubit - 1]
    table = np.zeros((4, 2 ** code.l))
    for e in range(4):
        mask = on_qubit == e
        table[e] = np.bincount(synd[mask], weights=probs[mask],
                               minlength=2 ** code.l) / weights[e]
    return table


def equal_conditional_probs_check(code, p, qubit):
    """Check equal conditional syndrome probabilities on a perfect code.

    For every pair of single-qubit errors ``e != e'`` on ``qubit`` and
    every syndrome other than zero, ``S(e)``, and ``S(e')``, the
    probabilities ``P[S | E_q = e]`` and ``P[S | E_q = e']`` must agree.

    Args:
        code (:class:`pauli.StabilizerCode`): Perfect code.
        p (float): Rate in ``(0, 1)``; see :func:`equal_rate_weights`.
        qubit (int): 1-based qubit.

    Returns:
        :class:`EqualConditionalReport`: Report.

    Raises:
        :class:`libsyn.UnsupportedCodeError`: if the code is not perfect.

    """
    if not code.is_perfect:
        raise libsyn.UnsupportedCodeError(
            "{} is not a perfect code".format(code))
    if not 0 < p < 1:
        raise libsyn.ConfigError("p must lie in (0, 1), got {}".format(p))
    if not 1 <= qubit <= code.n:
        raise libsyn.DimensionError("qubit {} outside 1..{}".format(
            qubit, code.n))
    table = conditional_table(code, equal_rate_weights(p), qubit)
    single = code.single_error_syndromes[qubit - 1]
    max_diff = 0.0
    violations = []
    for e, e2 in itertools.combinations(range(4), 2):
        excluded = {0, int(single[e]), int(single[e2])}
        for s in range(2 ** code.l):
            if s in excluded:
                continue
            diff = abs(table[e, s] - table[e2, s])
            max_diff = max(max_diff, diff)
            if diff > config.EXACT_TOL:
                violations.append((s, e, e2, diff))
    return EqualConditionalReport(table, qubit, p, max_diff,
                                  not violations, violations)


class WeightCases(Enum):
    """Relation of the target syndrome to the fixed qubit's error."""
    MATCHING = "matching"  # S* = S(e on q)
    OTHER_ON_QUBIT = "other_on_qubit"  # S* = S(e' on q) for e' != e
    OFF_QUBIT = "off_qubit"  # S* is a syndrome of an error on another qubit


#: dict: Initial ``(k_0, k_1)`` for each case.
_INITIAL_COUNTS = {
    WeightCases.MATCHING: (1, 0),
    WeightCases.OTHER_ON_QUBIT: (0, 0),
    WeightCases.OFF_QUBIT: (0, 1),
}


@dataclass(frozen=True)
class WeightDistribution:
    """Counts ``k_w`` of errors with a fixed error on one qubit, weight
    ``w`` on the other qubits, and a target syndrome.

    Attributes:
        n (int): Code size.
        qubit (int): 1-based fixed qubit.
        pauli (int): Pauli index on the fixed qubit.
        s_star (int): Target syndrome value.
        values (Tuple[int]): ``k_0..k_{n-1}``.
        case (:class:`WeightCases`): Case of the target syndrome.

    """
    n: int
    qubit: int
    pauli: int
    s_star: int
    values: tuple
    case: WeightCases = None

    @property
    def total(self):
        return sum(self.values)


def kw_cases(code, qubit, s_star):
    """Case of a target syndrome for each Pauli on ``qubit``.

    Returns:
        List[:class:`WeightCases`]: Cases for ``I, X, Y, Z``.

    """
    if s_star == 0:
        raise libsyn.ConfigError("the target syndrome must be nonzero")
    single = code.single_error_syndromes[qubit - 1]
    on_qubit = [e for e in range(1, 4) if single[e] == s_star]
    cases = []
    for e in range(4):
        if not on_qubit:
            cases.append(WeightCases.OFF_QUBIT)
        elif e == on_qubit[0]:
            cases.append(WeightCases.MATCHING)
        else:
            cases.append(WeightCases.OTHER_ON_QUBIT)
    return cases


def kw_bruteforce(code, e, qubit, s_star):
    """Count ``k_w`` by enumerating all errors.

    Args:
        code (:class:`pauli.StabilizerCode`): Code.
        e (Union[int, :class:`pauli.Pauli`]): Pauli on the fixed qubit.
        qubit (int): 1-based fixed qubit.
        s_star (Union[int, :class:`pauli.Syndrome`]): Target syndrome.

    Returns:
        :class:`WeightDistribution`: Exact counts.

    """
    e = e.value if isinstance(e, pauli.Pauli) else int(e)
    if isinstance(s_star, pauli.Syndrome):
        s_star = s_star.value
    digits = pauli.assignment_digits(code.n)
    x, z = pauli.all_strings(code.n)
    synd = code.syndrome_values(x, z)
    mask = (digits[:, qubit - 1] == e) & (synd == s_star)
    rest = np.sum(np.delete(digits[mask], qubit - 1, axis=1) != 0, axis=1)
    values = np.bincount(rest, minlength=code.n)
    case = None
    if s_star:
        case = kw_cases(code, qubit, s_star)[e]
    return WeightDistribution(code.n, qubit, e, s_star,
                              tuple(int(v) for v in values), case)


def kw_recursive(n, cases, qubit=None, s_star=None):
    """Weight distributions of all four Paulis on a qubit by recursion.

    With ``k_w(e)`` for the Paulis ``e`` on the fixed qubit,
    ``l_w = 3**(w-1) C(n-1, w-1) - k_{w-1} - 3 (n-w+1) k_{w-2}
    - 2 (w-1) k_{w-1} - sum_{e' != e} k_{w-1}(e')`` and ``k_w = l_w / w``.
    The sum couples the four sequences, so they are computed together.

    Args:
        n (int): Code size, at least 2.
        cases (Sequence[:class:`WeightCases`]): Case of each of ``I, X, Y,
            Z``, as from :func:`kw_cases`.
        qubit (int): Fixed qubit, recorded in the output.
        s_star (int): Target syndrome, recorded in the output.

    Returns:
        List[:class:`WeightDistribution`]: Distributions for ``I, X, Y,
        Z``.

    Raises:
        :class:`libsyn.RecursionConsistencyError`: if ``l_w`` is not a
        nonnegative multiple of ``w``.

    """
    if n < 2:
        raise libsyn.ConfigError("n must be at least 2, got {}".format(n))
    if len(cases) != 4:
        raise libsyn.DimensionError("one case per Pauli required")
    k = np.zeros((4, n), dtype=object)
    for e, case in enumerate(cases):
        k0, k1 = _INITIAL_COUNTS[WeightCases(case)]
        k[e, 0] = k0
        if n > 1:
            k[e, 1] = k1
    for w in range(2, n):
        total_prev = sum(k[:, w - 1])
        for e in range(4):
            others = total_prev - k[e, w - 1]
            l_w = (3 ** (w - 1) * math.comb(n - 1, w - 1) - k[e, w - 1]
                   - 3 * (n - w + 1) * k[e, w - 2]
                   - 2 * (w - 1) * k[e, w - 1] - others)
            if l_w < 0 or l_w % w:
                raise libsyn.RecursionConsistencyError(
                    "l_{} = {} for Pauli {} is not a nonnegative multiple "
                    "of {}".format(w, l_w, pauli.PAULI_LABELS[e], w))
            k[e, w] = l_w // w
    return [WeightDistribution(n, qubit, e, s_star,
                               tuple(int(v) for v in k[e]),
                               WeightCases(cases[e]))
            for e in range(4)]
