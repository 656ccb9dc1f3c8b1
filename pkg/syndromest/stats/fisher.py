# Fisher information of syndrome data
"""Score vectors, Fisher information, and Cramer-Rao bounds.

For per-set rates ``theta^i_e`` with ``theta^i_I = 1 - sum_e theta^i_e``,
the score of an observed syndrome is
``d ln P[S] / d theta^i_e = P[X_i = e | S] / theta^i_e
- P[X_i = I | S] / theta^i_I``, using posteriors from belief propagation
on concatenated codes or from exact enumeration on decomposable models.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from syndromest.infer import chunking, decoder
from syndromest.io import libsyn
from syndromest.qec import noise
from syndromest.settings import config


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """Fisher information per syndrome.

    Attributes:
        matrix (:obj:`np.ndarray`): Symmetric ``(P, P)`` matrix.
        mode (:class:`config.FisherModes`): How the matrix was evaluated.
        theta (:obj:`np.ndarray`): Parameters evaluated at.
        n_samples (int): Monte-Carlo sample count, or None.
        labels (Tuple[str]): Parameter labels.

    """
    matrix: np.ndarray
    mode: config.FisherModes
    theta: np.ndarray
    n_samples: int = None
    labels: tuple = ()

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        # symmetrize away the rounding of the outer product sums
        object.__setattr__(self, "matrix", (matrix + matrix.T) / 2)

    @property
    def eigenvalues(self):
        return linalg.eigvalsh(self.matrix)

    def is_psd(self, tol=1e-9):
        return bool(self.eigenvalues[0] >= -tol)

    @property
    def condition_number(self):
        eigs = self.eigenvalues
        return np.inf if eigs[0] <= 0 else float(eigs[-1] / eigs[0])


@dataclass(frozen=True, eq=False)
class CRBReport:
    """Cramer-Rao bounds for ``m`` independent syndromes.

    Attributes:
        bounds (:obj:`np.ndarray`): Per-parameter variance bounds.
        m (int): Number of syndromes.
        condition_number (float): Condition number of the Fisher matrix.
        pseudo_inverse (bool): True if the matrix was singular and the
            bounds come from its pseudo-inverse.
        rank (int): Numerical rank of the Fisher matrix.
        labels (Tuple[str]): Parameter labels.

    """
    bounds: np.ndarray
    m: int
    condition_number: float
    pseudo_inverse: bool
    rank: int
    labels: tuple = field(default=())

    def to_dict(self):
        return {
            "bounds": dict(zip(self.labels, self.bounds.tolist()))
            if self.labels else self.bounds.tolist(),
            "m": self.m,
            "condition_number": self.condition_number,
            "pseudo_inverse": self.pseudo_inverse,
            "rank": self.rank,
        }


def _leaf_scores(priors, leaves):
    # (B, n, 4) posteriors to (B, 3n) scores in qubit-major X, Y, Z order
    ratio = leaves / priors[None]
    return (ratio[..., 1:] - ratio[..., :1]).reshape(len(leaves), -1)


def score(graph, observed):
    """Scores of observed syndromes at the graph's rates.

    Args:
        graph (:class:`decoder.FactorGraph`): Graph; rates must be
            interior.
        observed: Syndromes accepted by :func:`decoder.as_bits`.

    Returns:
        :obj:`np.ndarray`: ``(B, P)`` scores in the order of
        :meth:`noise.SingleQubitPauliRates.param_vector`.

    Raises:
        :class:`libsyn.ZeroSupportError`: for a zero-probability syndrome.
        :class:`libsyn.PositivityError`: for rates on the boundary.

    """
    priors = graph.priors
    if np.any(priors <= 0) or (
            graph.meas is not None
            and np.any((graph.meas <= 0) | (graph.meas >= 1))):
        raise libsyn.PositivityError("scores need interior rates")
    result = decoder.run_bp(graph, observed)
    scores = _leaf_scores(priors, result.leaves)
    if graph.meas is not None:
        q = graph.meas
        flip = result.flips / q - (1 - result.flips) / (1 - q)
        scores = np.concatenate([scores, flip], axis=1)
    return scores


def model_scores(model, code):
    """Scores of every syndrome of a decomposable model by enumeration.

    Args:
        model (:class:`noise.DecomposableModel`): Model with interior
            rates.
        code (:class:`pauli.StabilizerCode`): Code.

    Returns:
        :obj:`np.ndarray`, :obj:`np.ndarray`: ``P[S]`` over syndrome values
        and ``(2**l, P)`` scores, NaN for zero-probability syndromes.

    """
    for theta in model.rates:
        if np.any(theta <= 0) or np.sum(theta) >= 1:
            raise libsyn.PositivityError("scores need interior rates")
    p_s, joints = noise.set_posteriors(model, code)
    support = p_s > 0
    cols = []
    with np.errstate(invalid="ignore", divide="ignore"):
        for theta, joint in zip(model.rates, joints):
            post = np.where(support, joint / p_s, np.nan)
            theta_i = 1 - np.sum(theta)
            for j, rate in enumerate(theta):
                cols.append(post[j + 1] / rate - post[0] / theta_i)
    return p_s, np.stack(cols, axis=1)


def _weighted_outer(scores, weights):
    return (scores * weights[:, None]).T @ scores


def _all_syndromes(n_bits, start, stop):
    return ((np.arange(start, stop)[:, None] >> np.arange(n_bits)) & 1
            ).astype(np.uint8)


def fisher_exact(source, code=None):
    """Exact Fisher information per syndrome.

    Args:
        source: :class:`decoder.FactorGraph`, or a
            :class:`noise.DecomposableModel` together with ``code``.
        code (:class:`pauli.StabilizerCode`): Code for model sources.

    Returns:
        :class:`FisherMatrix`: ``E_S[score score^T]``.

    Raises:
        :class:`libsyn.BudgetError`: if the syndrome space exceeds
        ``2**config.FISHER_MAX_BITS``.

    """
    if isinstance(source, decoder.FactorGraph):
        graph = source
        if graph.n_bits > config.FISHER_MAX_BITS:
            raise libsyn.BudgetError(
                "exact Fisher information over {} syndrome bits exceeds the "
                "limit of {}".format(graph.n_bits, config.FISHER_MAX_BITS),
                2 ** graph.n_bits)
        n_params = graph.rates.n_params
        acc = chunking.FsumAccumulator((n_params, n_params))
        for start, stop in chunking.chunk_bounds(2 ** graph.n_bits):
            bits = _all_syndromes(graph.n_bits, start, stop)
            probs = np.exp(decoder.run_bp(
                graph, bits, posteriors=False, strict=False).loglik)
            keep = probs > 0
            if not np.any(keep):
                continue
            acc.add(_weighted_outer(score(graph, bits[keep]), probs[keep]))
        theta = graph.rates.param_vector()
        labels = tuple(graph.rates.param_labels())
    else:
        if code is None:
            raise libsyn.ConfigError("a code is needed for model sources")
        p_s, scores = model_scores(source, code)
        keep = p_s > 0
        acc = chunking.FsumAccumulator((source.n_params,) * 2)
        acc.add(_weighted_outer(scores[keep], p_s[keep]))
        theta = source.param_vector()
        labels = source.labels
    fisher = FisherMatrix(
        acc.total(), config.FisherModes.EXACT, theta, None, labels)
    libsyn.printv("exact Fisher condition number {:.3g}".format(
        fisher.condition_number))
    return fisher


def fisher_mc(graph, n_samples, rng, chunk_size=None):
    """Monte-Carlo Fisher information from syndromes sampled at the
    graph's rates.

    Per-chunk sums are combined with exactly rounded totals, so a fixed
    seed and chunk size reproduce the matrix bit for bit.

    Args:
        graph (:class:`decoder.FactorGraph`): Graph.
        n_samples (int): Number of sampled syndromes, at least 1.
        rng (:obj:`np.random.Generator`): Seeded generator.
        chunk_size (int): Syndromes per batch; defaults to None for
            :attr:`config.chunk_size`.

    Returns:
        :class:`FisherMatrix`: Mean outer product of the scores.

    """
    if n_samples < 1:
        raise libsyn.ConfigError("n_samples must be at least 1")
    n_params = graph.rates.n_params
    acc = chunking.FsumAccumulator((n_params, n_params))
    for start, stop in chunking.chunk_bounds(n_samples, chunk_size):
        bits, _, _ = decoder.sample_syndromes(
            graph.tree, graph.rates, stop - start, rng)
        scores = score(graph, bits)
        acc.add(scores.T @ scores)
    fisher = FisherMatrix(
        acc.total() / n_samples, config.FisherModes.MONTE_CARLO,
        graph.rates.param_vector(), n_samples,
        tuple(graph.rates.param_labels()))
    libsyn.printv("Monte-Carlo Fisher condition number {:.3g} from {} "
                  "samples".format(fisher.condition_number, n_samples))
    return fisher


def crb(fisher, m):
    """Cramer-Rao bounds ``diag(I^-1) / m``.

    Singular matrices fall back to the pseudo-inverse over eigenvalues
    above the rank tolerance and flag the report.

    Args:
        fisher (:class:`FisherMatrix`): Per-syndrome Fisher information.
        m (int): Number of syndromes, at least 1.

    Returns:
        :class:`CRBReport`: Bounds.

    """
    if m < 1:
        raise libsyn.ConfigError("m must be at least 1")
    eigs, vecs = linalg.eigh(fisher.matrix)
    tol = (max(fisher.matrix.shape) * max(abs(eigs[-1]), 0.0)
           * np.finfo(float).eps * config.RANK_TOL_FACTOR)
    keep = eigs > tol
    rank = int(np.sum(keep))
    pseudo = rank < len(eigs)
    cond = np.inf if pseudo else float(eigs[-1] / eigs[0])
    if pseudo:
        libsyn.warn("Fisher matrix has rank {} of {}; bounds use the "
                    "pseudo-inverse".format(rank, len(eigs)))
    inv_diag = np.sum(vecs[:, keep] ** 2 / eigs[keep], axis=1)
    bounds = np.clip(inv_diag / m, 0, None)
    libsyn.printv("CRB condition number {:.3g}, rank {}".format(cond, rank))
    return CRBReport(bounds, int(m), cond, pseudo, rank, fisher.labels)


def fisher_direct(rates):
    """Fisher information per observation of the errors themselves.

    Each qubit's Pauli is a categorical draw and each flip a Bernoulli
    draw, so the matrix is block diagonal with blocks
    ``diag(1 / theta_e) + 1 / theta_I`` and ``1 / (q (1 - q))``.

    Args:
        rates (:class:`noise.SingleQubitPauliRates`): Interior rates.

    Returns:
        :class:`FisherMatrix`: Direct-observation information.

    """
    table = rates.table()
    if np.any(table <= 0):
        raise libsyn.PositivityError("direct information needs interior rates")
    blocks = [np.diag(1 / row[1:]) + 1 / row[0] for row in table]
    if rates.meas is not None:
        q = rates.meas
        if np.any((q <= 0) | (q >= 1)):
            raise libsyn.PositivityError("flip rates must be interior")
        blocks += [np.array([[1 / (qb * (1 - qb))]]) for qb in q]
    return FisherMatrix(
        linalg.block_diag(*blocks), config.FisherModes.DIRECT,
        rates.param_vector(), None, tuple(rates.param_labels()))


@dataclass(frozen=True)
class LoewnerGap:
    """Comparison of direct and syndrome Fisher information.

    Attributes:
        min_eigenvalue (float): Smallest eigenvalue of the difference.
        trace_ratio (float): ``tr(direct) / tr(syndrome)``.
        holds (bool): True if the difference is positive semi-definite.

    """
    min_eigenvalue: float
    trace_ratio: float
    holds: bool


def loewner_gap(direct, syndrome, tol=1e-9):
    """Check that syndrome information is below direct information."""
    diff = direct.matrix - syndrome.matrix
    min_eig = float(linalg.eigvalsh(diff)[0])
    scale = max(1.0, float(np.max(np.abs(direct.matrix))))
    ratio = float(np.trace(direct.matrix) / np.trace(syndrome.matrix))
    gap = LoewnerGap(min_eig, ratio, min_eig >= -tol * scale)
    libsyn.printv("direct to syndrome Fisher trace ratio {:.3g}, minimum "
                  "eigenvalue of the difference {:.3g}".format(ratio, min_eig))
    return gap
