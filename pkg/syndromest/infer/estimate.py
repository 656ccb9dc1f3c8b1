# Rate estimation from syndrome data
"""Expectation-maximization estimators of per-qubit Pauli rates and
per-bit measurement flip rates from syndrome datasets.

The soft estimator (EM) collects expected error counts from the exact
leaf posteriors of the factor tree. The hard estimator (HEM) counts the
single-qubit components of the most likely error instead. Both may add
Dirichlet pseudocounts to the counts before normalizing.

Each :class:`EMState` is evaluated at its own rates: it holds the
expected counts and the dataset log-likelihood under those rates, and
the next state's rates come from normalizing its counts.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from syndromest.infer import chunking, decoder
from syndromest.io import libsyn
from syndromest.qec import noise, pauli
from syndromest.settings import config


@dataclass(frozen=True, eq=False)
class SyndromeDataset:
    """Observed syndromes.

    Attributes:
        bits (:obj:`np.ndarray`): ``(n_est, n_bits)`` bits as ``uint8``.
        seed (int): Seed the data was generated from, if simulated.
        truth (:class:`noise.SingleQubitPauliRates`): Generating rates, if
            simulated.

    """
    bits: np.ndarray
    seed: int = None
    truth: noise.SingleQubitPauliRates = None

    def __post_init__(self):
        bits = np.atleast_2d(np.asarray(self.bits, dtype=np.uint8))
        if np.any(bits > 1):
            raise libsyn.ConfigError("syndrome bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_syndromes(cls, syndromes, seed=None, truth=None):
        lengths = {s.l for s in syndromes}
        if len(lengths) > 1:
            raise libsyn.DimensionError("syndromes differ in length")
        return cls(np.array([s.bits for s in syndromes], dtype=np.uint8),
                   seed, truth)

    @classmethod
    def sample(cls, tree, truth, n_est, rng, seed=None):
        """Sample ``n_est`` observed syndromes of a concatenated code."""
        bits, _, _ = decoder.sample_syndromes(tree, truth, n_est, rng)
        return cls(bits, seed, truth)

    def __len__(self):
        return len(self.bits)

    @property
    def n_bits(self):
        return self.bits.shape[1]

    def syndromes(self):
        return [pauli.Syndrome.from_bits(row) for row in self.bits]

    def unique_counts(self):
        """Distinct syndromes and their multiplicities, sorted."""
        return np.unique(self.bits, axis=0, return_counts=True)


@dataclass(frozen=True, eq=False)
class EMState:
    """Estimator state evaluated at its rates.

    Attributes:
        iteration (int): Iteration count, 0 for the initialization.
        rates (:class:`noise.SingleQubitPauliRates`): Current rates.
        stats (:obj:`np.ndarray`): ``(n_leaves, 4)`` expected counts of
            ``I, X, Y, Z`` per qubit; each row sums to the dataset size.
        flip_stats (:obj:`np.ndarray`): Expected flips per syndrome bit, or
            None without measurement noise.
        loglik (float): Dataset log-likelihood under ``rates``.
        wall_time (float): Seconds since the run started.

    """
    iteration: int
    rates: noise.SingleQubitPauliRates
    stats: np.ndarray
    flip_stats: np.ndarray
    loglik: float
    wall_time: float = 0.0


@dataclass(frozen=True, eq=False)
class DirichletInit:
    """Dirichlet distribution of per-qubit rates around equal rates ``p``.

    Attributes:
        alpha (float): Concentration scale.
        p (float): Target rate of each of X, Y, and Z.
        convention (:class:`config.DirichletConventions`): Exponent
            convention.

    """
    alpha: float
    p: float
    convention: config.DirichletConventions = (
        config.DirichletConventions.LITERAL)

    def __post_init__(self):
        if not self.alpha > 0:
            raise libsyn.ConfigError(
                "alpha must be positive, got {}".format(self.alpha))
        if not 0 < self.p < 1 / 3:
            raise libsyn.ConfigError(
                "p must lie in (0, 1/3), got {}".format(self.p))

    def _offset(self):
        return 1 if self.convention is config.DirichletConventions.LITERAL \
            else 0

    def concentration(self):
        """Dirichlet parameters over ``I, X, Y, Z``."""
        base = np.array([1 - 3 * self.p, self.p, self.p, self.p]) * self.alpha
        return base + self._offset()

    def flip_concentration(self, p_m):
        """Beta parameters ``(flip, no flip)`` around flip rate ``p_m``."""
        if not 0 < p_m < 1:
            raise libsyn.ConfigError(
                "p_m must lie in (0, 1), got {}".format(p_m))
        return (np.array([p_m, 1 - p_m]) * self.alpha) + self._offset()

    def mean(self):
        conc = self.concentration()
        return conc / np.sum(conc)

    def sample(self, n_qubits, rng, n_bits=0, p_m=None):
        """Draw rates for ``n_qubits`` and optionally ``n_bits`` flips."""
        table = rng.dirichlet(self.concentration(), size=n_qubits)
        meas = None
        if n_bits:
            a, b = self.flip_concentration(p_m)
            meas = rng.beta(a, b, size=n_bits)
        return noise.SingleQubitPauliRates(table[:, 1:], meas).clamp()


def sample_dirichlet_init(alpha, p, n_qubits, rng, convention=None,
                          n_bits=0, p_m=None):
    """Draw per-qubit rates from a Dirichlet distribution around ``p``.

    Args:
        alpha (float): Concentration scale, positive.
        p (float): Target rate in ``(0, 1/3)``.
        n_qubits (int): Number of qubits.
        rng (:obj:`np.random.Generator`): Generator.
        convention (:class:`config.DirichletConventions`): Exponent
            convention; defaults to None for ``LITERAL``, under which the
            concentration parameters are ``alpha_e + 1``.
        n_bits (int): Syndrome bits to draw flip rates for; defaults to 0.
        p_m (float): Target flip rate when ``n_bits`` is nonzero.

    Returns:
        :class:`noise.SingleQubitPauliRates`: Sampled rates.

    """
    if convention is None:
        convention = config.DirichletConventions.LITERAL
    init = DirichletInit(alpha, p, convention)
    return init.sample(n_qubits, rng, n_bits, p_m)


@dataclass(frozen=True, eq=False)
class RegularizerConfig:
    """Dirichlet prior on the rates around reference rates.

    Attributes:
        beta (float): Strength; 0 disables the prior.
        reference (:class:`noise.SingleQubitPauliRates`): Reference rates,
            normally the initialization.
        form (:class:`config.PseudocountForms`): Pseudocount form.
        convention (:class:`config.DirichletConventions`): Exponent
            convention; ``STANDARD`` subtracts one from each pseudocount.

    """
    beta: float
    reference: noise.SingleQubitPauliRates
    form: config.PseudocountForms = config.PseudocountForms.COMPLEMENT
    convention: config.DirichletConventions = (
        config.DirichletConventions.LITERAL)

    def __post_init__(self):
        if self.beta < 0:
            raise libsyn.ConfigError(
                "beta must be nonnegative, got {}".format(self.beta))

    def _counts(self, probs):
        if self.form is config.PseudocountForms.COMPLEMENT:
            counts = (1 - probs) * self.beta
        else:
            counts = probs * self.beta
        if (self.convention is config.DirichletConventions.STANDARD
                and self.beta > 0):
            counts = np.maximum(counts - 1, 0)
        return counts

    def pseudocounts(self):
        """``(n, 4)`` pseudocounts over ``I, X, Y, Z``."""
        return self._counts(self.reference.table())

    def flip_pseudocounts(self):
        """``(n_bits, 2)`` pseudocounts over ``(flip, no flip)``, or None."""
        meas = self.reference.meas
        if meas is None:
            return None
        return self._counts(np.stack([meas, 1 - meas], axis=1))


@dataclass(frozen=True, eq=False)
class EstimationRun:
    """Trajectory of an estimator.

    Attributes:
        estimator (:class:`config.Estimators`): EM or HEM.
        states (List[:class:`EMState`]): Initial state then one per step.
        converged (bool): True if stopped by the tolerance.
        seeds (dict): Seeds used, for provenance.

    """
    estimator: object
    states: list
    converged: bool
    seeds: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.states[-1]

    @property
    def n_iter_run(self):
        return len(self.states) - 1

    def logliks(self):
        return np.array([s.loglik for s in self.states])

    def trajectory(self):
        """``(n_iter_run + 1, n_params)`` parameter vectors."""
        return np.stack([s.rates.param_vector() for s in self.states])


def _graph_for(graph, rates):
    if isinstance(graph, decoder.FactorGraph):
        return graph.with_rates(rates)
    return decoder.build_factor_graph(graph, rates)


def expected_counts(graph, data, hard=False):
    """Sufficient statistics and log-likelihood of a dataset.

    Distinct syndromes are processed once in fixed-size chunks and
    weighted by multiplicity; totals are exactly rounded sums, so they do
    not depend on chunking or order.

    Args:
        graph (:class:`decoder.FactorGraph`): Graph at the current rates.
        data (:class:`SyndromeDataset`): Dataset.
        hard (bool): True to count MAP error components instead of
            posterior expectations; defaults to False.

    Returns:
        :obj:`np.ndarray`, :obj:`np.ndarray`, float: ``(n_leaves, 4)``
        counts, expected flips per bit or None, and the log-likelihood.

    Raises:
        :class:`libsyn.ZeroSupportError`: for a syndrome with zero
        probability under the current rates.

    """
    uniq, counts = data.unique_counts()
    n_leaves = graph.n_leaves
    with_flips = graph.meas is not None
    acc = chunking.FsumAccumulator((n_leaves, 4))
    flip_acc = chunking.FsumAccumulator((graph.n_bits,))
    ll_parts = []
    for start, stop in chunking.chunk_bounds(len(uniq)):
        bits = uniq[start:stop]
        weights = counts[start:stop].astype(float)
        result = decoder.run_bp(graph, bits, posteriors=not hard)
        ll_parts.append(result.loglik * weights)
        if hard:
            best = decoder.run_max_sum(graph, bits)
            onehot = np.zeros((len(bits), n_leaves, 4))
            np.put_along_axis(onehot, best.paulis[..., None], 1, axis=2)
            acc.add(onehot * weights[:, None, None])
            if with_flips:
                flip_acc.add(best.flips * weights[:, None])
        else:
            acc.add(result.leaves * weights[:, None, None])
            if with_flips:
                flip_acc.add(result.flips * weights[:, None])
    loglik = math.fsum(np.concatenate(ll_parts)) if ll_parts else 0.0
    flip_stats = flip_acc.total() if with_flips else None
    return acc.total(), flip_stats, loglik


def evaluate_state(graph, data, iteration=0, hard=False, start=None):
    """Evaluate a state at the graph's rates."""
    stats, flip_stats, loglik = expected_counts(graph, data, hard)
    wall = 0.0 if start is None else time.perf_counter() - start
    return EMState(iteration, graph.rates, stats, flip_stats, loglik, wall)


def maximize(state, n_data, regularizer=None):
    """M-step: normalize counts, with optional pseudocounts, and clamp.

    Args:
        state (:class:`EMState`): Evaluated state.
        n_data (int): Dataset size.
        regularizer (:class:`RegularizerConfig`): Prior; defaults to None.

    Returns:
        :class:`noise.SingleQubitPauliRates`: New rates.

    """
    stats = np.array(state.stats, dtype=float)
    flips = None
    if state.flip_stats is not None:
        flips = np.stack(
            [state.flip_stats, n_data - state.flip_stats], axis=1)
    if regularizer is not None and regularizer.beta > 0:
        stats = stats + regularizer.pseudocounts()
        if flips is not None:
            flips = flips + regularizer.flip_pseudocounts()
    table = stats / np.sum(stats, axis=1, keepdims=True)
    meas = None if flips is None else flips[:, 0] / np.sum(flips, axis=1)
    return noise.SingleQubitPauliRates(table[:, 1:], meas).clamp()


def em_step(state, data, graph, regularizer=None, start=None):
    """One soft EM step.

    Args:
        state (:class:`EMState`): Evaluated current state.
        data (:class:`SyndromeDataset`): Dataset.
        graph: :class:`decoder.FactorGraph` or :class:`codes.ConcatTree`
            to build graphs from.
        regularizer (:class:`RegularizerConfig`): Prior; defaults to None.
        start (float): Run start from :func:`time.perf_counter`.

    Returns:
        :class:`EMState`: Next state, evaluated at the new rates.

    """
    rates = maximize(state, len(data), regularizer)
    return evaluate_state(_graph_for(graph, rates), data,
                          state.iteration + 1, False, start)


def hem_step(state, data, graph, regularizer=None, start=None):
    """One hard-assignment step; counts are MAP error components."""
    rates = maximize(state, len(data), regularizer)
    return evaluate_state(_graph_for(graph, rates), data,
                          state.iteration + 1, True, start)


def run_estimator(init, data, graph, estimator=None, n_iter=None, tol=None,
                  regularizer=None, seeds=None):
    """Iterate an estimator from initial rates.

    Args:
        init (:class:`noise.SingleQubitPauliRates`): Initial rates, clamped
            to the interior before use.
        data (:class:`SyndromeDataset`): Dataset.
        graph: Graph or tree for the code.
        estimator (:class:`config.Estimators`): EM or HEM; defaults to
            None for EM.
        n_iter (int): Maximum steps; defaults to :const:`config.EM_N_ITER`.
        tol (float): Stop when the maximum absolute rate change falls
            below; defaults to :const:`config.EM_TOL`.
        regularizer (:class:`RegularizerConfig`): Prior; defaults to None.
        seeds (dict): Provenance seeds.

    Returns:
        :class:`EstimationRun`: Trajectory.

    """
    if estimator is None:
        estimator = config.Estimators.EM
    if estimator not in (config.Estimators.EM, config.Estimators.HEM):
        raise libsyn.ConfigError(
            "run one estimator at a time, got {}".format(estimator))
    n_iter = config.EM_N_ITER if n_iter is None else int(n_iter)
    tol = config.EM_TOL if tol is None else tol
    if n_iter < 1:
        raise libsyn.ConfigError("n_iter must be at least 1")
    hard = estimator is config.Estimators.HEM
    step = hem_step if hard else em_step
    start = time.perf_counter()
    state = evaluate_state(_graph_for(graph, init.clamp()), data, 0, hard,
                           start)
    states = [state]
    converged = False
    for _ in range(n_iter):
        new = step(state, data, graph, regularizer, start)
        delta = np.max(np.abs(
            new.rates.param_vector() - state.rates.param_vector()))
        states.append(new)
        libsyn.printv("{} iteration {}: loglik {:.6f}, max change {:.3g}"
                      .format(estimator.name, new.iteration, new.loglik,
                              delta))
        state = new
        if delta < tol:
            converged = True
            break
    return EstimationRun(estimator, states, converged, dict(seeds or {}))


def run_em(init, data, graph, n_iter=None, tol=None, regularizer=None,
           seeds=None):
    """Run soft EM; see :func:`run_estimator`."""
    return run_estimator(init, data, graph, config.Estimators.EM, n_iter,
                         tol, regularizer, seeds)


def run_hem(init, data, graph, n_iter=None, tol=None, regularizer=None,
            seeds=None):
    """Run hard-assignment EM; see :func:`run_estimator`."""
    return run_estimator(init, data, graph, config.Estimators.HEM, n_iter,
                         tol, regularizer, seeds)
