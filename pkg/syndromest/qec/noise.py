# Decomposable stochastic error models
"""Decomposable error models over Pauli errors and syndrome bit flips.

An error is an element ``(e, f)`` of the group of n-qubit Pauli strings
times l-bit flip vectors. A decomposable model lists disjoint sets of
elementary errors; each set independently contributes at most one of its
elements, with the identity taking the remaining probability. Independent
single-qubit Pauli noise and phenomenological measurement flips are
special cases built by :class:`SingleQubitPauliRates`.
"""

from dataclasses import dataclass, field

import numpy as np

from syndromest.io import libsyn
from syndromest.qec import pauli
from syndromest.settings import config


@dataclass(frozen=True)
class ErrorEvent:
    """Data error together with syndrome bit flips.

    Attributes:
        data (:class:`pauli.PauliString`): Pauli error on the data qubits.
        flips (int): Bit mask of flipped syndrome bits.
        l (int): Number of syndrome bits.

    """
    data: pauli.PauliString
    flips: int = 0
    l: int = 0

    def __post_init__(self):
        if self.flips < 0 or self.flips >= (1 << self.l):
            raise libsyn.DimensionError(
                "flip mask {} does not fit {} bits".format(self.flips, self.l))

    @classmethod
    def identity(cls, n, l=0):
        return cls(pauli.PauliString.identity(n), 0, l)

    @classmethod
    def flip(cls, n, l, bit):
        """Pure measurement error flipping 1-based syndrome ``bit``."""
        if not 1 <= bit <= l:
            raise libsyn.DimensionError("bit {} outside 1..{}".format(bit, l))
        return cls(pauli.PauliString.identity(n), 1 << (bit - 1), l)

    def __mul__(self, other):
        if self.l != other.l:
            raise libsyn.DimensionError("flip lengths differ")
        return ErrorEvent(
            self.data * other.data, self.flips ^ other.flips, self.l)

    def is_identity(self):
        return self.data.is_identity() and self.flips == 0

    def observed_syndrome(self, code):
        """Syndrome of the data error XOR the flips."""
        if self.l != code.l:
            raise libsyn.DimensionError("flip length differs from code")
        return pauli.syndrome(code, self.data) ^ pauli.Syndrome(
            self.l, self.flips)

    def __str__(self):
        if not self.l:
            return self.data.label
        return "{}|{}".format(self.data.label, pauli.Syndrome(
            self.l, self.flips))


@dataclass(frozen=True)
class ErrorSet:
    """Set of elementary errors, at most one of which occurs.

    Attributes:
        elements (Tuple[:class:`ErrorEvent`]): Distinct, non-identity
            elements.

    """
    elements: tuple

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise libsyn.ModelError("error sets must be nonempty")
        if len(set(elements)) != len(elements):
            raise libsyn.ModelError("error set elements must be distinct")
        if any(e.is_identity() for e in elements):
            raise libsyn.ModelError("error sets exclude the identity")

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class DecomposableModel:
    """Decomposable error model.

    Attributes:
        sets (Tuple[:class:`ErrorSet`]): Disjoint elementary error sets.
        rates (Tuple[:obj:`np.ndarray`]): Rate vector per set, aligned with
            the set's elements.
        labels (Tuple[str]): Parameter labels in set order; generated from
            the elements if not given.

    """
    sets: tuple
    rates: tuple
    labels: tuple = field(default=None)

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise libsyn.ModelError("a model needs at least one error set")
        if len(self.rates) != len(sets):
            raise libsyn.DimensionError(
                "{} rate vectors for {} sets".format(len(self.rates), len(sets)))
        rates = []
        for err_set, theta in zip(sets, self.rates):
            theta = np.array(theta, dtype=float).ravel()
            if len(theta) != len(err_set):
                raise libsyn.DimensionError(
                    "rate vector of length {} for a set of {}".format(
                        len(theta), len(err_set)))
            if np.any(theta < 0) or np.any(theta > 1):
                raise libsyn.ModelError("rates must lie in [0, 1]")
            if np.sum(theta) > 1 + config.EXACT_TOL:
                raise libsyn.ModelError(
                    "set rates sum to {} > 1".format(np.sum(theta)))
            theta.setflags(write=False)
            rates.append(theta)
        seen = set()
        n = l = None
        for err_set in sets:
            for e in err_set.elements:
                if e in seen:
                    raise libsyn.ModelError(
                        "error {} appears in more than one set".format(e))
                seen.add(e)
                if n is None:
                    n, l = e.data.n, e.l
                elif (e.data.n, e.l) != (n, l):
                    raise libsyn.DimensionError(
                        "elements differ in qubit or flip count")
        labels = self.labels
        if labels is None:
            labels = tuple(
                str(e) for err_set in sets for e in err_set.elements)
        elif len(labels) != sum(len(s) for s in sets):
            raise libsyn.DimensionError("one label per parameter required")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "rates", tuple(rates))
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def m(self):
        return len(self.sets)

    @property
    def n(self):
        return self.sets[0].elements[0].data.n

    @property
    def l(self):
        return self.sets[0].elements[0].l

    @property
    def n_params(self):
        return sum(len(s) for s in self.sets)

    def identity_rates(self):
        """Rate ``theta_I = 1 - sum(theta)`` of each set."""
        return np.array([1 - np.sum(theta) for theta in self.rates])

    def param_vector(self):
        """All rates concatenated in set order."""
        return np.concatenate(self.rates)

    def with_rates(self, params):
        """Copy of the model with a new flat parameter vector."""
        params = np.asarray(params, dtype=float)
        if len(params) != self.n_params:
            raise libsyn.DimensionError("parameter vector length mismatch")
        rates = []
        start = 0
        for err_set in self.sets:
            rates.append(params[start:start + len(err_set)])
            start += len(err_set)
        return DecomposableModel(self.sets, tuple(rates), self.labels)

    def choice_tables(self):
        """Per-set tables of choices, identity first.

        Returns:
            List[Tuple[:obj:`np.ndarray`, ...]]: For each set, arrays of
            choice probabilities, X masks, Z masks, and flip masks, each of
            length ``|N_i| + 1``.

        """
        tables = []
        for err_set, theta in zip(self.sets, self.rates):
            probs = np.concatenate([[1 - np.sum(theta)], theta])
            xs = np.array([0] + [e.data.x for e in err_set.elements],
                          dtype=np.uint64)
            zs = np.array([0] + [e.data.z for e in err_set.elements],
                          dtype=np.uint64)
            fs = np.array([0] + [e.flips for e in err_set.elements],
                          dtype=np.uint64)
            tables.append((probs, xs, zs, fs))
        return tables


@dataclass(frozen=True, eq=False)
class SingleQubitPauliRates:
    """Independent single-qubit Pauli channel with optional syndrome bit
    flips.

    Attributes:
        rates (:obj:`np.ndarray`): Array of shape ``(n, 3)`` of
            ``(theta_X, theta_Y, theta_Z)`` per qubit.
        meas (:obj:`np.ndarray`): Flip probability per syndrome bit, or
            None for perfect measurements.

    """
    rates: np.ndarray
    meas: np.ndarray = None

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[1] != 3:
            raise libsyn.DimensionError(
                "rates must have shape (n, 3), got {}".format(rates.shape))
        if np.any(rates < 0):
            raise libsyn.ModelError("rates must be nonnegative")
        if np.any(np.sum(rates, axis=1) > 1 + config.EXACT_TOL):
            raise libsyn.ModelError("per-qubit rates sum above 1")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        if self.meas is not None:
            meas = np.array(self.meas, dtype=float).ravel()
            if np.any(meas < 0) or np.any(meas > 1):
                raise libsyn.ModelError("flip rates must lie in [0, 1]")
            meas.setflags(write=False)
            object.__setattr__(self, "meas", meas)

    @classmethod
    def depolarizing(cls, n, p, n_bits=None, p_m=None):
        """Equal rates ``p`` for X, Y, and Z on every qubit, and flip rate
        ``p_m`` on each of ``n_bits`` syndrome bits if given."""
        if not 0 <= p <= 1 / 3:
            raise libsyn.ModelError(
                "depolarizing rate must lie in [0, 1/3], got {}".format(p))
        meas = None
        if p_m is not None:
            if n_bits is None:
                raise libsyn.ConfigError("flip rates need a bit count")
            meas = np.full(n_bits, float(p_m))
        return cls(np.full((n, 3), float(p)), meas)

    @property
    def n(self):
        return self.rates.shape[0]

    @property
    def n_bits(self):
        return 0 if self.meas is None else len(self.meas)

    @property
    def n_params(self):
        return self.rates.size + self.n_bits

    def table(self):
        """Per-qubit distribution over ``I, X, Y, Z`` as an ``(n, 4)``
        array."""
        return np.concatenate(
            [1 - np.sum(self.rates, axis=1, keepdims=True), self.rates],
            axis=1)

    def param_vector(self):
        """Flat parameters: qubit-major ``X, Y, Z`` then flip rates."""
        vec = self.rates.ravel()
        if self.meas is not None:
            vec = np.concatenate([vec, self.meas])
        return vec.copy()

    def param_labels(self):
        labels = ["q{}_{}".format(i + 1, p)
                  for i in range(self.n) for p in pauli.PAULI_LABELS[1:]]
        labels += ["m{}".format(b + 1) for b in range(self.n_bits)]
        return labels

    @classmethod
    def from_param_vector(cls, vec, n, n_bits=0):
        vec = np.asarray(vec, dtype=float)
        meas = vec[3 * n:3 * n + n_bits] if n_bits else None
        return cls(vec[:3 * n].reshape(n, 3), meas)

    def clamp(self, bounds=None):
        """Copy with every rate, identity included, kept within
        ``bounds`` (defaults to :const:`config.RATE_CLAMP`)."""
        lo, hi = config.RATE_CLAMP if bounds is None else bounds
        table = np.clip(self.table(), lo, hi)
        table /= np.sum(table, axis=1, keepdims=True)
        meas = None if self.meas is None else np.clip(self.meas, lo, hi)
        return SingleQubitPauliRates(table[:, 1:], meas)

    def to_model(self, code=None):
        """Decomposable model with sets ``{X^(i), Y^(i), Z^(i)}`` per qubit
        and one set per flipped syndrome bit.

        Args:
            code (:class:`pauli.StabilizerCode`): Code providing the flip
                length when ``meas`` is None; defaults to None for no flips.

        """
        n = self.n
        l = self.n_bits if self.meas is not None else (
            code.l if code is not None else 0)
        sets = []
        rates = []
        for i in range(n):
            sets.append(ErrorSet(tuple(
                ErrorEvent(pauli.PauliString.single(n, i + 1, p), 0, l)
                for p in pauli.PAULI_LABELS[1:])))
            rates.append(self.rates[i])
        if self.meas is not None:
            for b in range(l):
                sets.append(ErrorSet((ErrorEvent.flip(n, l, b + 1),)))
                rates.append([self.meas[b]])
        return DecomposableModel(
            tuple(sets), tuple(rates), tuple(self.param_labels()))


def assignment_count(model):
    """Number of joint set choices, ``prod(|N_i| + 1)``."""
    count = 1
    for err_set in model.sets:
        count *= len(err_set) + 1
    return count


def _check_budget(model):
    count = assignment_count(model)
    if count > config.ENUM_MAX_ASSIGNMENTS:
        raise libsyn.BudgetError(
            "exact enumeration needs {} assignments; the budget is {}".format(
                count, config.ENUM_MAX_ASSIGNMENTS), count)
    return count


def _choice_index(err_set, choice):
    # choice as None/identity, element, or 0-based index with 0 = identity
    if choice is None:
        return 0
    if isinstance(choice, ErrorEvent):
        if choice.is_identity():
            return 0
        try:
            return err_set.elements.index(choice) + 1
        except ValueError:
            raise libsyn.ModelError("{} is not in the set".format(choice))
    idx = int(choice)
    if not 0 <= idx <= len(err_set):
        raise libsyn.ModelError("choice index {} out of range".format(idx))
    return idx


def event_probability(model, assignment):
    """Probability of a joint choice over all sets.

    Args:
        model (:class:`DecomposableModel`): Model.
        assignment (Sequence): Per-set choice, given as an element of the
            set, None or an identity event, or an index where 0 is the
            identity and ``j`` the ``j``-th element.

    Returns:
        float: ``prod_i theta^i_{X_i}``, with ``theta^i_I`` for identity
        choices.

    """
    if len(assignment) != model.m:
        raise libsyn.DimensionError(
            "assignment of length {} for {} sets".format(
                len(assignment), model.m))
    prob = 1.0
    for err_set, theta, choice in zip(model.sets, model.rates, assignment):
        idx = _choice_index(err_set, choice)
        prob *= (1 - np.sum(theta)) if idx == 0 else theta[idx - 1]
    return prob


@dataclass(frozen=True, eq=False)
class AssignmentTable:
    """Exhaustive table of joint set choices.

    Attributes:
        choices (:obj:`np.ndarray`): ``(K, m)`` choice indices, 0 for the
            identity.
        probs (:obj:`np.ndarray`): Probability of each row.
        x, z (:obj:`np.ndarray`): Bit masks of the product data error.
        flips (:obj:`np.ndarray`): Flip mask of the product.

    """
    choices: np.ndarray
    probs: np.ndarray
    x: np.ndarray
    z: np.ndarray
    flips: np.ndarray

    def observed_syndromes(self, code):
        """Observed syndrome value of each row."""
        return code.syndrome_values(self.x, self.z) ^ self.flips.astype(
            np.int64)


def enumerate_assignments(model):
    """Enumerate every joint choice of a model.

    Raises:
        :class:`libsyn.BudgetError`: if the count exceeds
        :const:`config.ENUM_MAX_ASSIGNMENTS`.

    """
    count = _check_budget(model)
    tables = model.choice_tables()
    dims = tuple(len(t[0]) for t in tables)
    choices = np.stack(
        np.unravel_index(np.arange(count), dims), axis=1).astype(np.int64)
    probs = np.ones(count)
    x = np.zeros(count, dtype=np.uint64)
    z = np.zeros(count, dtype=np.uint64)
    flips = np.zeros(count, dtype=np.uint64)
    for i, (p, xs, zs, fs) in enumerate(tables):
        col = choices[:, i]
        probs *= p[col]
        x ^= xs[col]
        z ^= zs[col]
        flips ^= fs[col]
    return AssignmentTable(choices, probs, x, z, flips)


def sample(model, rng):
    """Sample one error.

    Args:
        model (:class:`DecomposableModel`): Model.
        rng (:obj:`np.random.Generator`): Seeded generator.

    Returns:
        :class:`ErrorEvent`: Product of the per-set draws.

    """
    x, z, flips = sample_batch(model, 1, rng)
    return ErrorEvent(
        pauli.PauliString(model.n, int(x[0]), int(z[0])), int(flips[0]),
        model.l)


def sample_batch(model, size, rng):
    """Sample ``size`` errors as bit mask arrays.

    Returns:
        :obj:`np.ndarray`, :obj:`np.ndarray`, :obj:`np.ndarray`: X, Z, and
        flip masks.

    """
    x = np.zeros(size, dtype=np.uint64)
    z = np.zeros(size, dtype=np.uint64)
    flips = np.zeros(size, dtype=np.uint64)
    for p, xs, zs, fs in model.choice_tables():
        cum = np.cumsum(p[1:])
        # draw the element index; values beyond the cumulative rate give I
        idx = np.searchsorted(cum, rng.random(size), side="right") + 1
        idx[idx > len(cum)] = 0
        x ^= xs[idx]
        z ^= zs[idx]
        flips ^= fs[idx]
    return x, z, flips


def total_error_distribution(model, code=None):
    """Exact distribution of the product error.

    Args:
        model (:class:`DecomposableModel`): Model.
        code (:class:`pauli.StabilizerCode`): Unused beyond a dimension
            check; defaults to None.

    Returns:
        Dict[:class:`ErrorEvent`, float]: Probability of each product with
        nonzero mass, summing over assignments with equal products.

    """
    if code is not None and code.n != model.n:
        raise libsyn.DimensionError("model and code differ in qubit count")
    table = enumerate_assignments(model)
    keys = np.stack([table.x, table.z, table.flips], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    probs = np.bincount(inverse.ravel(), weights=table.probs,
                        minlength=len(uniq))
    dist = {}
    for (x, z, f), prob in zip(uniq, probs):
        if prob > 0:
            dist[ErrorEvent(pauli.PauliString(model.n, int(x), int(z)),
                            int(f), model.l)] = float(prob)
    return dist


def syndrome_probabilities(model, code):
    """Exact observed syndrome distribution as an array over syndrome
    values ``0..2**l - 1``."""
    if code.n != model.n:
        raise libsyn.DimensionError("model and code differ in qubit count")
    if model.l not in (0, code.l):
        raise libsyn.DimensionError("model flip length differs from code")
    table = enumerate_assignments(model)
    return np.bincount(table.observed_syndromes(code), weights=table.probs,
                       minlength=2 ** code.l)


def syndrome_distribution(model, code):
    """Exact observed syndrome distribution.

    Returns:
        Dict[:class:`pauli.Syndrome`, float]: ``P[S]`` for every syndrome.

    """
    probs = syndrome_probabilities(model, code)
    return {pauli.Syndrome(code.l, s): float(prob)
            for s, prob in enumerate(probs)}


def set_posteriors(model, code):
    """Exact joint probabilities of set choices and syndromes.

    Returns:
        :obj:`np.ndarray`, List[:obj:`np.ndarray`]: ``P[S]`` over syndrome
        values, and for each set an array of shape ``(|N_i| + 1, 2**l)``
        holding ``P[X_i = choice, S]``, identity first.

    """
    table = enumerate_assignments(model)
    synds = table.observed_syndromes(code)
    n_synd = 2 ** code.l
    p_s = np.bincount(synds, weights=table.probs, minlength=n_synd)
    joints = []
    for i, err_set in enumerate(model.sets):
        key = table.choices[:, i] * n_synd + synds
        joint = np.bincount(key, weights=table.probs,
                            minlength=(len(err_set) + 1) * n_synd)
        joints.append(joint.reshape(len(err_set) + 1, n_synd))
    return p_s, joints


def single_error_model(code, rates=None, kinds=("X", "Y", "Z")):
    """Model with one set per qubit holding the given single-qubit Paulis.

    Args:
        code (:class:`pauli.StabilizerCode`): Code.
        rates (:obj:`np.ndarray`): ``(n, len(kinds))`` rates; defaults to
            zeros.
        kinds (Sequence[str]): Pauli letters per set; ``("X",)`` gives
            bit-flip noise.

    """
    n = code.n
    if rates is None:
        rates = np.zeros((n, len(kinds)))
    sets = [ErrorSet(tuple(
        ErrorEvent(pauli.PauliString.single(n, i + 1, k)) for k in kinds))
        for i in range(n)]
    labels = ["q{}_{}".format(i + 1, k) for i in range(n) for k in kinds]
    return DecomposableModel(
        tuple(sets), tuple(np.asarray(rates, dtype=float)), tuple(labels))


def model_from_sets(n, l, sets_spec):
    """Model from letter-string set definitions.

    Args:
        n (int): Qubits.
        l (int): Syndrome bits flippable by elements.
        sets_spec (List[dict]): Each ``{"elements": [...], "rates": [...]}``
            where an element is a Pauli letter string, optionally followed
            by ``|`` and a flip bit string such as ``"XII|10"``.

    """
    sets = []
    rates = []
    for spec in sets_spec:
        elements = []
        for label in spec["elements"]:
            data, _, flip_bits = str(label).partition("|")
            data = data or "I" * n
            flips = 0
            if flip_bits:
                if len(flip_bits) != l:
                    raise libsyn.DimensionError(
                        "flip string {!r} needs {} bits".format(flip_bits, l))
                flips = pauli.Syndrome.from_bits(flip_bits).value
            string = pauli.PauliString.from_label(data)
            if string.n != n:
                raise libsyn.DimensionError(
                    "element {!r} is not on {} qubits".format(label, n))
            elements.append(ErrorEvent(string, flips, l))
        sets.append(ErrorSet(tuple(elements)))
        rates.append(spec["rates"])
    return DecomposableModel(tuple(sets), tuple(rates))
