# Sum-product and max-sum inference on concatenated code trees
"""Exact inference on the factor tree of a concatenated code.

Each block of the tree is a factor over its ``n`` child variables (leaf
qubit errors at the lowest level, child logical classes above), its
logical class, and its observed syndrome bits. Measurement flips enter
as one extra binary variable per syndrome bit attached to its block, so
the graph stays a tree and message passing is exact.

Messages are kept in the linear domain and renormalized at every block;
the log normalizers add up to the log-likelihood ``log P[S]``. Batches
of syndromes are processed together, one block at a time.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import stats

from syndromest.infer import chunking
from syndromest.io import libsyn
from syndromest.qec import codes, noise, pauli


@dataclass(frozen=True, eq=False)
class BlockFactorTable:
    """Assignments of a base-code block grouped by syndrome and class.

    Assignments are indexed lexicographically over the child Pauli indices
    with child 1 most significant. Sorting them by ``(syndrome, class)``
    gives equal-sized groups, each a coset of the stabilizer group.

    Attributes:
        n (int): Children per block.
        l (int): Syndrome bits per block.
        syndromes (:obj:`np.ndarray`): Syndrome value per assignment.
        classes (:obj:`np.ndarray`): Class index per assignment.
        digits (:obj:`np.ndarray`): ``(4**n, n)`` child indices.
        order (:obj:`np.ndarray`): Assignment indices sorted by syndrome,
            class, then index.
        inverse (:obj:`np.ndarray`): Position of each assignment in
            ``order``.
        group_size (int): Assignments per ``(syndrome, class)`` group.
        class_members (:obj:`np.ndarray`): ``(4, 4**n / 4)`` ascending
            assignment indices of each class.

    """
    n: int
    l: int
    syndromes: np.ndarray
    classes: np.ndarray
    digits: np.ndarray
    order: np.ndarray
    inverse: np.ndarray
    group_size: int
    class_members: np.ndarray

    @classmethod
    def from_tree(cls, tree):
        n, l = tree.base.n, tree.base.l
        synds = tree.assignment_syndromes
        classes = tree.assignment_classes
        size = 4 ** n
        order = np.lexsort((np.arange(size), classes, synds))
        group_size = size // (2 ** l * 4)
        counts = np.bincount(synds * 4 + classes, minlength=2 ** l * 4)
        if group_size * 2 ** l * 4 != size or np.any(counts != group_size):
            raise libsyn.UnsupportedCodeError(
                "block assignments do not split into equal cosets")
        members = np.stack(
            [np.flatnonzero(classes == c) for c in range(4)])
        return cls(n, l, synds, classes, pauli.assignment_digits(n), order,
                   np.argsort(order), group_size, members)

    @property
    def n_syndromes(self):
        return 2 ** self.l

    def members(self, s, cls_index):
        """Assignment indices with syndrome ``s`` and class ``cls_index``."""
        start = (s * 4 + cls_index) * self.group_size
        return self.order[start:start + self.group_size]


@dataclass(frozen=True, eq=False)
class FactorGraph:
    """Factor tree of a concatenated code with its prior rates.

    Attributes:
        tree (:class:`codes.ConcatTree`): Block tree.
        table (:class:`BlockFactorTable`): Base-code factor table.
        rates (:class:`noise.SingleQubitPauliRates`): Leaf rates, with
            flip rates in ``rates.meas`` if measurements are noisy.

    """
    tree: codes.ConcatTree
    table: BlockFactorTable
    rates: noise.SingleQubitPauliRates

    @property
    def priors(self):
        return self.rates.table()

    @property
    def meas(self):
        return self.rates.meas

    @property
    def n_leaves(self):
        return self.tree.n_leaves

    @property
    def n_bits(self):
        return self.tree.n_bits

    @property
    def n_factors(self):
        return self.tree.n_blocks

    @property
    def n_meas_nodes(self):
        return 0 if self.meas is None else self.n_bits

    @property
    def n_variables(self):
        """Leaf errors, block classes, and measurement flips."""
        return self.n_leaves + self.n_factors + self.n_meas_nodes

    def with_rates(self, rates):
        """Same tree with new rates."""
        return build_factor_graph(self.tree, rates, table=self.table)


def build_factor_graph(tree, rates, meas_rates=None, table=None):
    """Build the factor tree for given rates.

    Args:
        tree (:class:`codes.ConcatTree`): Block tree.
        rates (Union[:class:`noise.SingleQubitPauliRates`, :obj:`np.ndarray`]):
            Per-leaf rates, as an object or an ``(n_leaves, 3)`` array.
        meas_rates (:obj:`np.ndarray`): Flip rate per syndrome bit;
            defaults to None to use ``rates.meas``.
        table (:class:`BlockFactorTable`): Precomputed table to reuse;
            defaults to None to build it.

    Returns:
        :class:`FactorGraph`: Graph.

    Raises:
        :class:`libsyn.DimensionError`: if the rates do not cover the
        leaves or the flip rates do not cover the syndrome bits.

    """
    if not isinstance(rates, noise.SingleQubitPauliRates):
        rates = noise.SingleQubitPauliRates(rates, meas_rates)
    elif meas_rates is not None:
        rates = noise.SingleQubitPauliRates(rates.rates, meas_rates)
    if rates.n != tree.n_leaves:
        raise libsyn.DimensionError(
            "{} rate rows for {} leaves".format(rates.n, tree.n_leaves))
    if rates.meas is not None and len(rates.meas) != tree.n_bits:
        raise libsyn.DimensionError(
            "{} flip rates for {} syndrome bits".format(
                len(rates.meas), tree.n_bits))
    if table is None:
        table = BlockFactorTable.from_tree(tree)
    return FactorGraph(tree, table, rates)


@dataclass(frozen=True, eq=False)
class PosteriorTable:
    """Posteriors for one observed syndrome.

    Attributes:
        leaves (:obj:`np.ndarray`): ``(n_leaves, 4)`` rows
            ``P[E_i = e | S]``.
        root (:obj:`np.ndarray`): Distribution over the logical class.
        flips (:obj:`np.ndarray`): Posterior flip probability per syndrome
            bit, or None without measurement noise.
        loglik (float): ``log P[S]``.

    """
    leaves: np.ndarray
    root: np.ndarray
    flips: np.ndarray
    loglik: float


@dataclass(frozen=True, eq=False)
class BPResult:
    """Batched sum-product results; rows of zero-support syndromes are NaN
    when not raised.

    Attributes:
        root (:obj:`np.ndarray`): ``(B, 4)`` root class marginals.
        loglik (:obj:`np.ndarray`): ``(B,)`` log-likelihoods.
        leaves (:obj:`np.ndarray`): ``(B, n_leaves, 4)`` leaf posteriors or
            None.
        flips (:obj:`np.ndarray`): ``(B, n_bits)`` flip posteriors or None.
        zero_support (:obj:`np.ndarray`): ``(B,)`` mask of syndromes with
            zero probability.

    """
    root: np.ndarray
    loglik: np.ndarray
    leaves: np.ndarray
    flips: np.ndarray
    zero_support: np.ndarray


@dataclass(frozen=True, eq=False)
class MaxSumResult:
    """Batched MAP errors.

    Attributes:
        paulis (:obj:`np.ndarray`): ``(B, n_leaves)`` Pauli indices.
        flips (:obj:`np.ndarray`): ``(B, n_bits)`` flip bits.
        root (:obj:`np.ndarray`): ``(B,)`` class of the MAP error.
        n_ties (int): Block choices decided by the tie-break.

    """
    paulis: np.ndarray
    flips: np.ndarray
    root: np.ndarray
    n_ties: int


def as_bits(graph, observed):
    """Observed syndromes as a ``(B, n_bits)`` ``uint8`` array.

    Args:
        graph (:class:`FactorGraph`): Graph.
        observed: :class:`pauli.Syndrome`, a sequence of them, or a 1- or
            2-dimensional bit array.

    """
    if isinstance(observed, pauli.Syndrome):
        observed = [observed]
    if (isinstance(observed, (list, tuple)) and observed
            and isinstance(observed[0], pauli.Syndrome)):
        if any(s.l != graph.n_bits for s in observed):
            raise libsyn.DimensionError(
                "syndromes must have {} bits".format(graph.n_bits))
        return np.array([s.bits for s in observed], dtype=np.uint8)
    bits = np.atleast_2d(np.asarray(observed, dtype=np.uint8))
    if bits.shape[1] != graph.n_bits:
        raise libsyn.DimensionError(
            "syndromes must have {} bits, got {}".format(
                graph.n_bits, bits.shape[1]))
    return bits


def _block_values(graph, bits, block):
    shifts = np.arange(graph.tree.base.l, dtype=np.int64)
    return np.sum(bits[:, graph.tree.bit_slice(block)].astype(np.int64)
                  << shifts, axis=1)


def _flip_weights(graph, bits, block):
    """Likelihood of each true block syndrome given the observed one.

    Returns:
        :obj:`np.ndarray`: ``(B, 2**l)`` weights; one-hot at the observed
        value for perfect measurements.

    """
    obs = _block_values(graph, bits, block)
    n_synd = graph.table.n_syndromes
    if graph.meas is None:
        weights = np.zeros((len(bits), n_synd))
        weights[np.arange(len(bits)), obs] = 1
        return weights
    diff = np.arange(n_synd)[None, :] ^ obs[:, None]
    q = graph.meas[graph.tree.bit_slice(block)]
    weights = np.ones((len(bits), n_synd))
    for i, qi in enumerate(q):
        weights *= np.where((diff >> i) & 1, qi, 1 - qi)
    return weights


def _outer(msgs):
    # joint weight of all child assignments in lexicographic order
    joint = msgs[0]
    for msg in msgs[1:]:
        joint = (joint[:, :, None] * msg[:, None, :]).reshape(len(joint), -1)
    return joint


def _child_messages(graph, block, ups, size):
    if block.level == 1:
        priors = graph.priors
        return [np.broadcast_to(priors[leaf], (size, 4))
                for leaf in block.children]
    return [ups[child] for child in block.children]


def _zero_support(bits, bad):
    idx = int(np.flatnonzero(bad)[0])
    synd = pauli.Syndrome.from_bits(bits[idx])
    return libsyn.ZeroSupportError(
        "syndrome {} has zero probability under the model".format(synd),
        synd)


def run_bp(graph, observed, posteriors=True, strict=True):
    """Sum-product over a batch of syndromes.

    Args:
        graph (:class:`FactorGraph`): Graph.
        observed: Observed syndromes accepted by :func:`as_bits`.
        posteriors (bool): True to run the downward pass for leaf and flip
            posteriors; defaults to True.
        strict (bool): True to raise on zero-support syndromes; False to
            mark them in the result; defaults to True.

    Returns:
        :class:`BPResult`: Results.

    Raises:
        :class:`libsyn.ZeroSupportError`: if ``strict`` and a syndrome has
        zero probability.

    """
    bits = as_bits(graph, observed)
    size = len(bits)
    table = graph.table
    tree = graph.tree
    shape = (size, table.n_syndromes, 4, table.group_size)
    ups = {}
    flip_w = {}
    masses = {}
    loglik = np.zeros(size)
    zero = np.zeros(size, dtype=bool)
    for block in tree.blocks:
        msgs = _child_messages(graph, block, ups, size)
        joint = _outer(msgs)[:, table.order].reshape(shape).sum(axis=-1)
        weights = _flip_weights(graph, bits, block)
        msg = np.einsum("bs,bsl->bl", weights, joint)
        norm = msg.sum(axis=1)
        bad = ~(norm > 0)
        if np.any(bad):
            if strict:
                raise _zero_support(bits, bad)
            zero |= bad
            norm = np.where(bad, 1.0, norm)
        ups[block.index] = msg / norm[:, None]
        flip_w[block.index] = weights
        masses[block.index] = joint
        with np.errstate(divide="ignore"):
            loglik += np.log(norm)
    loglik[zero] = -np.inf
    root = ups[tree.root.index].copy()
    root[zero] = np.nan
    leaves = flips = None
    if posteriors:
        leaves, flips = _downward(graph, bits, ups, flip_w, masses)
        leaves[zero] = np.nan
        if flips is not None:
            flips[zero] = np.nan
    return BPResult(root, loglik, leaves, flips, zero)


def _downward(graph, bits, ups, flip_w, masses):
    tree = graph.tree
    table = graph.table
    n = tree.base.n
    size = len(bits)
    leaves = np.zeros((size, graph.n_leaves, 4))
    flips = None if graph.meas is None else np.zeros((size, graph.n_bits))
    downs = {tree.root.index: np.ones((size, 4))}
    axes = list(range(1, n + 1))
    for block in reversed(tree.blocks):
        down = downs.pop(block.index)
        weights = flip_w[block.index]
        msgs = _child_messages(graph, block, ups, size)
        factor = (weights[:, :, None] * down[:, None, :]).reshape(size, -1)
        factor = np.repeat(factor, table.group_size, axis=1)[:, table.inverse]
        factor = factor.reshape((size,) + (4,) * n)
        for j, child in enumerate(block.children):
            operands = [factor, [0] + axes]
            for k, msg in enumerate(msgs):
                if k != j:
                    operands.extend((msg, [0, k + 1]))
            out = np.einsum(*operands, [0, j + 1], optimize=True)
            if block.level == 1:
                belief = out * msgs[j]
                total = belief.sum(axis=1, keepdims=True)
                leaves[:, child] = belief / np.where(total > 0, total, 1)
            else:
                total = out.sum(axis=1, keepdims=True)
                downs[child] = out / np.where(total > 0, total, 1)
        if flips is not None:
            # belief over the true block syndrome
            synd_belief = weights * np.einsum(
                "bsl,bl->bs", masses[block.index], down)
            total = synd_belief.sum(axis=1, keepdims=True)
            synd_belief /= np.where(total > 0, total, 1)
            obs = _block_values(graph, bits, block)
            diff = np.arange(table.n_syndromes)[None, :] ^ obs[:, None]
            for i in range(tree.base.l):
                flips[:, block.bit_offset + i] = np.sum(
                    synd_belief * ((diff >> i) & 1), axis=1)
    return leaves, flips


def run_max_sum(graph, observed, strict=True):
    """Max-sum over a batch of syndromes.

    Ties are broken towards the lexicographically smallest class and,
    within a class, the smallest child assignment.

    Returns:
        :class:`MaxSumResult`: MAP errors and flips.

    Raises:
        :class:`libsyn.ZeroSupportError`: if ``strict`` and a syndrome has
        zero probability.

    """
    bits = as_bits(graph, observed)
    size = len(bits)
    tree = graph.tree
    table = graph.table
    rows = np.arange(size)
    ups = {}
    pointers = {}
    ties = {}
    zero = np.zeros(size, dtype=bool)
    for block in tree.blocks:
        msgs = _child_messages(graph, block, ups, size)
        weights = _flip_weights(graph, bits, block)
        value = _outer(msgs) * weights[:, table.syndromes]
        by_class = value[:, table.class_members]
        pos = np.argmax(by_class, axis=2)
        best = np.take_along_axis(by_class, pos[..., None], axis=2)[..., 0]
        top = best.max(axis=1)
        bad = ~(top > 0)
        if np.any(bad):
            if strict:
                raise _zero_support(bits, bad)
            zero |= bad
            top = np.where(bad, 1.0, top)
        ups[block.index] = best / top[:, None]
        pointers[block.index] = table.class_members[np.arange(4), pos]
        ties[block.index] = np.sum(by_class == best[..., None], axis=2) > 1
    paulis = np.zeros((size, graph.n_leaves), dtype=np.int64)
    flips = np.zeros((size, graph.n_bits), dtype=np.uint8)
    root_msg = ups[tree.root.index]
    root = np.argmax(root_msg, axis=1)
    n_ties = int(np.sum(np.sum(root_msg == root_msg[rows, root][:, None],
                               axis=1) > 1))
    choice = {tree.root.index: root}
    shifts = np.arange(tree.base.l, dtype=np.int64)
    for block in reversed(tree.blocks):
        chosen = choice.pop(block.index)
        assign = pointers[block.index][rows, chosen]
        n_ties += int(np.sum(ties[block.index][rows, chosen]))
        digits = table.digits[assign]
        if block.level == 1:
            paulis[:, list(block.children)] = digits
        else:
            for j, child in enumerate(block.children):
                choice[child] = digits[:, j]
        flip_vals = table.syndromes[assign] ^ _block_values(graph, bits, block)
        flips[:, tree.bit_slice(block)] = (flip_vals[:, None] >> shifts) & 1
    paulis[zero] = -1
    libsyn.printv("max-sum tie-breaks:", n_ties, "over", size, "syndromes")
    return MaxSumResult(paulis, flips, root, n_ties)


def bp_root_marginal(graph, observed):
    """Logical class marginal for one observed syndrome.

    Args:
        graph (:class:`FactorGraph`): Graph.
        observed (:class:`pauli.Syndrome`): Syndrome over all tree bits.

    Returns:
        :obj:`np.ndarray`, float: Distribution over ``I, X, Y, Z`` and
        ``log P[S]``.

    Raises:
        :class:`libsyn.ZeroSupportError`: if ``P[S] = 0``.

    """
    result = run_bp(graph, observed, posteriors=False)
    return result.root[0], float(result.loglik[0])


def bp_leaf_posteriors(graph, observed):
    """Per-qubit error posteriors for one observed syndrome.

    Returns:
        :class:`PosteriorTable`: Leaf rows, root marginal, flip posteriors,
        and log-likelihood.

    """
    result = run_bp(graph, observed)
    flips = None if result.flips is None else result.flips[0]
    return PosteriorTable(result.leaves[0], result.root[0], flips,
                          float(result.loglik[0]))


def map_error(graph, observed):
    """Most likely error given one observed syndrome.

    Returns:
        :class:`noise.ErrorEvent`: Leaf Paulis with flips over all tree
        bits.

    """
    result = run_max_sum(graph, observed)
    data = pauli.PauliString.from_indices(result.paulis[0])
    flips = pauli.Syndrome.from_bits(result.flips[0]).value
    return noise.ErrorEvent(data, flips, graph.n_bits)


def sample_syndromes(tree, rates, size, rng):
    """Sample leaf errors and flips, returning their syndromes.

    Args:
        tree (:class:`codes.ConcatTree`): Block tree.
        rates (:class:`noise.SingleQubitPauliRates`): Truth rates.
        size (int): Number of samples.
        rng (:obj:`np.random.Generator`): Generator.

    Returns:
        :obj:`np.ndarray`, :obj:`np.ndarray`, :obj:`np.ndarray`: Observed
        syndrome bits ``(size, n_bits)``, true root classes, and leaf Pauli
        indices ``(size, n_leaves)``.

    """
    if rates.n != tree.n_leaves:
        raise libsyn.DimensionError("rates do not cover the leaves")
    cum = np.cumsum(rates.table(), axis=1)[:, :-1]
    draws = rng.random((size, tree.n_leaves))
    leaf_paulis = np.sum(draws[:, :, None] >= cum[None], axis=2)
    bits, root = tree.evaluate(leaf_paulis)
    if rates.meas is not None:
        if len(rates.meas) != tree.n_bits:
            raise libsyn.DimensionError("flip rates do not cover the bits")
        bits ^= (rng.random((size, tree.n_bits)) < rates.meas).astype(
            np.uint8)
    return bits, root, leaf_paulis


def decode_classes(graph, observed):
    """Most likely logical class per syndrome, or -1 for zero support."""
    result = run_bp(graph, observed, posteriors=False, strict=False)
    classes = np.argmax(np.nan_to_num(result.root, nan=-1), axis=1)
    classes[result.zero_support] = -1
    return classes


@dataclass(frozen=True)
class LogicalErrorRate:
    """Logical error rate estimate.

    Attributes:
        rate (float): Failure fraction.
        lower (float): Lower end of the interval.
        upper (float): Upper end of the interval.
        failures (int): Failures counted.
        n_trials (int): Decoding trials.
        confidence (float): Interval confidence level.

    """
    rate: float
    lower: float
    upper: float
    failures: int
    n_trials: int
    confidence: float = 0.95


def clopper_pearson(failures, n_trials, confidence=0.95):
    """Exact binomial confidence interval."""
    alpha = 1 - confidence
    lower = 0.0 if failures == 0 else stats.beta.ppf(
        alpha / 2, failures, n_trials - failures + 1)
    upper = 1.0 if failures == n_trials else stats.beta.ppf(
        1 - alpha / 2, failures + 1, n_trials - failures)
    return float(lower), float(upper)


def logical_error_rate(graph, truth, n_trials, rng, chunk_size=None):
    """Logical error rate of the decoder defined by a graph.

    Errors are sampled from ``truth`` and decoded to the most likely
    logical class under ``graph``; a trial fails if that class differs
    from the class of the sampled error.

    Args:
        graph (:class:`FactorGraph`): Decoder graph.
        truth (:class:`noise.SingleQubitPauliRates`): Rates errors are
            sampled from.
        n_trials (int): Number of trials, at least 1.
        rng (:obj:`np.random.Generator`): Generator.
        chunk_size (int): Trials per batch; defaults to None for
            :attr:`config.chunk_size`.

    Returns:
        :class:`LogicalErrorRate`: Rate with a Clopper-Pearson 95%
        interval.

    """
    if n_trials < 1:
        raise libsyn.ConfigError("n_trials must be at least 1")
    failures = 0
    n_zero = 0
    for start, stop in chunking.chunk_bounds(n_trials, chunk_size):
        bits, truth_class, _ = sample_syndromes(
            graph.tree, truth, stop - start, rng)
        decoded = decode_classes(graph, bits)
        n_zero += int(np.sum(decoded < 0))
        failures += int(np.sum(decoded != truth_class))
    if n_zero:
        libsyn.warn("{} syndromes had zero support under the decoder and "
                    "were counted as failures".format(n_zero))
    lower, upper = clopper_pearson(failures, n_trials)
    return LogicalErrorRate(failures / n_trials, lower, upper, failures,
                            n_trials)


def exact_logical_error_rate(graph, truth):
    """Exact failure probability of a single-level decoder.

    Sums the probability of every error whose syndrome decodes to a class
    different from its own.

    Raises:
        :class:`libsyn.UnsupportedCodeError`: for more than one level or
        noisy measurements.

    """
    tree = graph.tree
    if tree.levels != 1 or truth.meas is not None:
        raise libsyn.UnsupportedCodeError(
            "exact rates need one level and perfect measurements")
    table = graph.table
    probs = np.prod(truth.table()[np.arange(tree.n_leaves), table.digits],
                    axis=1)
    all_bits = (np.arange(table.n_syndromes)[:, None]
                >> np.arange(tree.base.l)) & 1
    decoded = decode_classes(graph, all_bits)
    wrong = decoded[table.syndromes] != table.classes
    return math.fsum(probs[wrong])
