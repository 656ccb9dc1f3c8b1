# Effective Pauli group algebra
"""Effective Pauli group, stabilizer codes, syndromes, and logical classes.

Pauli strings are stored in the phase-free symplectic representation as
a pair of bit masks ``(x, z)``, where bit ``i`` refers to qubit ``i + 1``
and the letter string representation lists qubit 1 first. Single-qubit
Paulis are indexed ``I, X, Y, Z = 0, 1, 2, 3`` throughout the package.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
import itertools

import numpy as np

from syndromest.io import libsyn
from syndromest.settings import config

#: Tuple[str]: Single-qubit Pauli labels by index.
PAULI_LABELS = ("I", "X", "Y", "Z")
#: :obj:`np.ndarray`: X bit of each single-qubit Pauli index.
X_BITS = np.array([0, 1, 1, 0], dtype=np.uint8)
#: :obj:`np.ndarray`: Z bit of each single-qubit Pauli index.
Z_BITS = np.array([0, 0, 1, 1], dtype=np.uint8)
#: :obj:`np.ndarray`: Pauli index given as ``_XZ_TO_INDEX[x, z]``.
_XZ_TO_INDEX = np.array([[0, 3], [1, 2]], dtype=np.uint8)
#: :obj:`np.ndarray`: Multiplication table of single-qubit Pauli indices
# modulo phase.
PRODUCT_TABLE = _XZ_TO_INDEX[
    X_BITS[:, None] ^ X_BITS[None, :], Z_BITS[:, None] ^ Z_BITS[None, :]]


class Pauli(Enum):
    """Single-qubit Pauli operator modulo phase."""
    I = 0
    X = 1
    Y = 2
    Z = 3

    @property
    def x(self):
        return int(X_BITS[self.value])

    @property
    def z(self):
        return int(Z_BITS[self.value])

    @classmethod
    def from_xz(cls, x, z):
        return cls(int(_XZ_TO_INDEX[int(x), int(z)]))

    def __mul__(self, other):
        return Pauli(int(PRODUCT_TABLE[self.value, other.value]))


def _popcount(val):
    return bin(val).count("1")


def parity(vals):
    """Parity of the set bits of each element of an integer array.

    Args:
        vals (:obj:`np.ndarray`): Non-negative integers below ``2**64``.

    Returns:
        :obj:`np.ndarray`: Array of 0/1 values as ``uint8``.

    """
    v = np.asarray(vals, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.uint8)


def popcount(vals):
    """Number of set bits of each element of an integer array."""
    v = np.asarray(vals, dtype=np.uint64)
    counts = np.zeros(v.shape, dtype=np.int64)
    while np.any(v):
        counts += (v & np.uint64(1)).astype(np.int64)
        v = v >> np.uint64(1)
    return counts


@dataclass(frozen=True)
class PauliString:
    """Phase-free n-qubit Pauli string.

    Attributes:
        n (int): Number of qubits.
        x (int): X bit mask, bit ``i`` for qubit ``i + 1``.
        z (int): Z bit mask.

    """
    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise libsyn.DimensionError(
                "Pauli strings need at least 1 qubit, got {}".format(self.n))
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise libsyn.DimensionError(
                "bit masks exceed {} qubits".format(self.n))

    @classmethod
    def identity(cls, n):
        return cls(n)

    @classmethod
    def from_label(cls, label):
        """Parse a letter string such as ``"XZZXI"``, qubit 1 first."""
        x = z = 0
        for i, char in enumerate(label.strip().upper()):
            try:
                pauli = Pauli[char]
            except KeyError:
                raise libsyn.ConfigError(
                    "invalid Pauli letter {!r} in {!r}".format(char, label))
            x |= pauli.x << i
            z |= pauli.z << i
        return cls(len(label.strip()), x, z)

    @classmethod
    def single(cls, n, qubit, pauli):
        """Weight-one string with ``pauli`` on 1-based ``qubit``."""
        if not 1 <= qubit <= n:
            raise libsyn.DimensionError(
                "qubit {} outside 1..{}".format(qubit, n))
        pauli = pauli if isinstance(pauli, Pauli) else Pauli[pauli]
        return cls(n, pauli.x << (qubit - 1), pauli.z << (qubit - 1))

    @classmethod
    def from_indices(cls, indices):
        """Build a string from a sequence of single-qubit Pauli indices."""
        indices = np.asarray(indices, dtype=np.int64)
        x = z = 0
        for i, idx in enumerate(indices):
            x |= int(X_BITS[idx]) << i
            z |= int(Z_BITS[idx]) << i
        return cls(len(indices), x, z)

    def __getitem__(self, qubit):
        # 1-based qubit access, following the letter string convention
        if not 1 <= qubit <= self.n:
            raise IndexError("qubit {} outside 1..{}".format(qubit, self.n))
        shift = qubit - 1
        return Pauli.from_xz((self.x >> shift) & 1, (self.z >> shift) & 1)

    def __mul__(self, other):
        _check_dims(self, other)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z)

    @property
    def weight(self):
        return _popcount(self.x | self.z)

    @property
    def label(self):
        return "".join(self[i].name for i in range(1, self.n + 1))

    def indices(self):
        """Single-qubit Pauli indices, qubit 1 first."""
        return np.array([self[i].value for i in range(1, self.n + 1)])

    def is_identity(self):
        return self.x == 0 and self.z == 0

    def __str__(self):
        return self.label


def _check_dims(a, b):
    if a.n != b.n:
        raise libsyn.DimensionError(
            "qubit counts differ: {} and {}".format(a.n, b.n))


def commutes(a, b):
    """Check whether two Pauli strings commute.

    Args:
        a (:class:`PauliString`): First string.
        b (:class:`PauliString`): Second string.

    Returns:
        bool: True if the symplectic product ``a.x . b.z + a.z . b.x``
        vanishes modulo 2.

    Raises:
        :class:`libsyn.DimensionError`: if the qubit counts differ.

    """
    _check_dims(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


@dataclass(frozen=True)
class Syndrome:
    """Syndrome bit vector.

    Attributes:
        l (int): Number of bits.
        value (int): Bit mask, bit ``i`` for generator ``i + 1``.

    """
    l: int
    value: int = 0

    def __post_init__(self):
        if self.value < 0 or self.value >= (1 << self.l):
            raise libsyn.DimensionError(
                "syndrome value {} does not fit {} bits".format(
                    self.value, self.l))

    @classmethod
    def from_bits(cls, bits):
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise libsyn.ConfigError("syndrome bits must be 0 or 1")
        return cls(len(bits), sum(b << i for i, b in enumerate(bits)))

    @property
    def bits(self):
        return tuple((self.value >> i) & 1 for i in range(self.l))

    def is_zero(self):
        return self.value == 0

    def __xor__(self, other):
        if self.l != other.l:
            raise libsyn.DimensionError(
                "syndrome lengths differ: {} and {}".format(self.l, other.l))
        return Syndrome(self.l, self.value ^ other.value)

    def __str__(self):
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class LogicalClass:
    """Logical equivalence class, one single-qubit Pauli per logical qubit.

    Attributes:
        paulis (Tuple[:class:`Pauli`]): Class components.

    """
    paulis: tuple

    @property
    def value(self):
        """The single component for codes encoding one qubit."""
        if len(self.paulis) != 1:
            raise libsyn.UnsupportedCodeError(
                "class of a {}-logical code has no single value".format(
                    len(self.paulis)))
        return self.paulis[0]

    def is_trivial(self):
        return all(p is Pauli.I for p in self.paulis)

    def __mul__(self, other):
        return LogicalClass(
            tuple(a * b for a, b in zip(self.paulis, other.paulis)))


def _gf2_solve(a, b):
    """Solve ``a @ t = b`` over GF(2), returning one solution or None."""
    a = np.array(a, dtype=np.uint8) % 2
    b = np.array(b, dtype=np.uint8) % 2
    rows, cols = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    pivots = []
    row = 0
    for col in range(cols):
        hits = np.nonzero(aug[row:, col])[0]
        if len(hits) == 0:
            continue
        pivot = row + hits[0]
        aug[[row, pivot]] = aug[[pivot, row]]
        for r in range(rows):
            if r != row and aug[r, col]:
                aug[r] ^= aug[row]
        pivots.append(col)
        row += 1
        if row == rows:
            break
    if np.any(aug[row:, -1]):
        return None
    sol = np.zeros(cols, dtype=np.uint8)
    for r, col in enumerate(pivots):
        sol[col] = aug[r, -1]
    return sol


@dataclass(frozen=True)
class StabilizerCode:
    """Stabilizer code given by its generators and logical operators.

    The constructor checks that the generators commute, that each logical
    commutes with every generator and with the other pairs, and that each
    ``X_L`` anti-commutes with its paired ``Z_L``. Perfectness as a
    single-error-correcting code is established by enumeration.

    Attributes:
        generators (Tuple[:class:`PauliString`]): Generators ``g_1..g_l``.
        logicals (Tuple[Tuple[:class:`PauliString`, :class:`PauliString`]]):
            ``(X_L, Z_L)`` pairs; may be empty.
        name (str): Display name.

    """
    generators: tuple
    logicals: tuple = ()
    name: str = "code"
    _gx: np.ndarray = field(init=False, repr=False, compare=False)
    _gz: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise libsyn.ConfigError("a code needs at least one generator")
        logicals = tuple(tuple(pair) for pair in self.logicals)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "logicals", logicals)
        n = gens[0].n
        if n > 64:
            raise libsyn.UnsupportedCodeError(
                "codes support at most 64 qubits, got {}".format(n))
        for g in gens:
            if g.n != n:
                raise libsyn.DimensionError("generators differ in length")
        for g1, g2 in itertools.combinations(gens, 2):
            if not commutes(g1, g2):
                raise libsyn.ConfigError(
                    "generators {} and {} anti-commute".format(g1, g2))
        for i, pair in enumerate(logicals):
            if len(pair) != 2:
                raise libsyn.ConfigError("logicals are (X_L, Z_L) pairs")
            x_l, z_l = pair
            for op in pair:
                if op.n != n:
                    raise libsyn.DimensionError("logical length mismatch")
                if not all(commutes(op, g) for g in gens):
                    raise libsyn.ConfigError(
                        "logical {} anti-commutes with a generator".format(op))
            if commutes(x_l, z_l):
                raise libsyn.ConfigError(
                    "paired logicals {} and {} commute".format(x_l, z_l))
            for j, other in enumerate(logicals):
                if j == i:
                    continue
                if not (commutes(x_l, other[0]) and commutes(x_l, other[1])
                        and commutes(z_l, other[0])
                        and commutes(z_l, other[1])):
                    raise libsyn.ConfigError(
                        "logical pairs {} and {} do not commute".format(i, j))
        object.__setattr__(self, "_gx", np.array(
            [g.x for g in gens], dtype=np.uint64))
        object.__setattr__(self, "_gz", np.array(
            [g.z for g in gens], dtype=np.uint64))

    @property
    def n(self):
        return self.generators[0].n

    @property
    def l(self):
        return len(self.generators)

    @property
    def k(self):
        return self.n - self.l

    def syndrome_values(self, x, z):
        """Vectorized syndromes of strings given as bit mask arrays.

        Args:
            x (:obj:`np.ndarray`): X bit masks.
            z (:obj:`np.ndarray`): Z bit masks, same shape as ``x``.

        Returns:
            :obj:`np.ndarray`: Syndrome values as ``int64`` bit masks.

        """
        x = np.asarray(x, dtype=np.uint64)[..., None]
        z = np.asarray(z, dtype=np.uint64)[..., None]
        bits = parity((x & self._gz) ^ (z & self._gx)).astype(np.int64)
        return np.sum(bits << np.arange(self.l, dtype=np.int64), axis=-1)

    @cached_property
    def single_error_syndromes(self):
        """Syndrome value of each single-qubit error.

        Returns:
            :obj:`np.ndarray`: Array of shape ``(n, 4)`` indexed by 0-based
            qubit and Pauli index.

        """
        qubits = np.arange(self.n, dtype=np.uint64)
        x = X_BITS[None, :].astype(np.uint64) << qubits[:, None]
        z = Z_BITS[None, :].astype(np.uint64) << qubits[:, None]
        return self.syndrome_values(x, z)

    @cached_property
    def is_perfect(self):
        """True if the 3n weight-one errors map bijectively onto the
        nonzero syndromes."""
        synds = self.single_error_syndromes[:, 1:].ravel()
        return (len(synds) == 2 ** self.l - 1 and np.all(synds != 0)
                and len(np.unique(synds)) == len(synds))

    @cached_property
    def destabilizers(self):
        """Pure errors ``t_i`` anti-commuting with ``g_i`` only and
        commuting with all logicals, such that ``T(s) = prod t_i^{s_i}``
        is a homomorphism."""
        checks = list(self.generators)
        for x_l, z_l in self.logicals:
            checks.extend((x_l, z_l))
        n = self.n
        # symplectic product with t = (tx, tz) is c.z . tx + c.x . tz
        rows = []
        for c in checks:
            row = [(c.z >> q) & 1 for q in range(n)]
            row += [(c.x >> q) & 1 for q in range(n)]
            rows.append(row)
        out = []
        for i in range(self.l):
            rhs = np.zeros(len(checks), dtype=np.uint8)
            rhs[i] = 1
            sol = _gf2_solve(rows, rhs)
            if sol is None:
                raise libsyn.UnsupportedCodeError(
                    "no pure error found for generator {}".format(i + 1))
            x = sum(int(b) << q for q, b in enumerate(sol[:n]))
            z = sum(int(b) << q for q, b in enumerate(sol[n:]))
            out.append(PauliString(n, x, z))
        return tuple(out)

    def pure_error(self, s):
        """Representative ``T(s)`` of the coset of syndrome ``s``."""
        rep = PauliString.identity(self.n)
        for i, bit in enumerate(s.bits):
            if bit:
                rep = rep * self.destabilizers[i]
        return rep

    def class_values(self, x, z):
        """Vectorized logical class of strings given as bit mask arrays.

        Only for codes encoding one qubit. Because the pure errors commute
        with the logicals, multiplying out the syndrome representative
        leaves the commutation pattern unchanged.

        Returns:
            :obj:`np.ndarray`: Pauli indices of the classes.

        """
        if len(self.logicals) != 1:
            raise libsyn.UnsupportedCodeError(
                "vectorized classes need exactly one logical pair")
        x_l, z_l = self.logicals[0]
        x = np.asarray(x, dtype=np.uint64)
        z = np.asarray(z, dtype=np.uint64)
        # X component from anti-commuting with Z_L, Z component with X_L
        cx = parity((x & np.uint64(z_l.z)) ^ (z & np.uint64(z_l.x)))
        cz = parity((x & np.uint64(x_l.z)) ^ (z & np.uint64(x_l.x)))
        return _XZ_TO_INDEX[cx, cz]

    def __str__(self):
        return "{} [[{},{}]]".format(self.name, self.n, self.k)


def syndrome(code, e):
    """Syndrome of an error.

    Args:
        code (:class:`StabilizerCode`): Code.
        e (:class:`PauliString`): Error.

    Returns:
        :class:`Syndrome`: Bit ``i`` is 1 iff ``e`` anti-commutes with
        generator ``g_{i+1}``.

    """
    if e.n != code.n:
        raise libsyn.DimensionError(
            "error on {} qubits for a {}-qubit code".format(e.n, code.n))
    return Syndrome(code.l, int(code.syndrome_values(e.x, e.z)))


def syndrome_inverse(code, s):
    """Unique weight-one error with the given syndrome on a perfect code.

    Raises:
        :class:`libsyn.UnsupportedCodeError`: if the code is not perfect.
        :class:`libsyn.ConfigError`: if ``s`` is zero.

    """
    if not code.is_perfect:
        raise libsyn.UnsupportedCodeError(
            "{} is not a perfect code".format(code))
    if s.l != code.l:
        raise libsyn.DimensionError("syndrome length mismatch")
    if s.is_zero():
        raise libsyn.ConfigError("the zero syndrome has no weight-one error")
    qubit, pauli = np.argwhere(code.single_error_syndromes == s.value)[0]
    return PauliString.single(code.n, int(qubit) + 1, Pauli(int(pauli)))


def logical_class(code, e):
    """Logical class of an error.

    The syndrome-matching pure error is multiplied out, leaving an element
    of the normalizer whose commutation with each ``(X_L, Z_L)`` pair gives
    the class components.

    Raises:
        :class:`libsyn.UnsupportedCodeError`: if the code has no logicals.

    """
    if not code.logicals:
        raise libsyn.UnsupportedCodeError(
            "{} has no logical operators".format(code))
    if e.n != code.n:
        raise libsyn.DimensionError("error length mismatch")
    rest = e * code.pure_error(syndrome(code, e))
    paulis = []
    for x_l, z_l in code.logicals:
        paulis.append(Pauli.from_xz(
            not commutes(rest, z_l), not commutes(rest, x_l)))
    return LogicalClass(tuple(paulis))


def all_strings(n):
    """Bit masks of all ``4**n`` strings in lexicographic letter order.

    The ordering treats qubit 1 as the most significant base-4 digit of
    the Pauli indices ``I, X, Y, Z``.

    Returns:
        :obj:`np.ndarray`, :obj:`np.ndarray`: X and Z bit mask arrays.

    """
    if n > config.ENUM_MAX_QUBITS:
        raise libsyn.BudgetError(
            "enumerating {} qubits needs 4**{} = {} strings; the limit is "
            "{} qubits".format(n, n, 4 ** n, config.ENUM_MAX_QUBITS), 4 ** n)
    digits = assignment_digits(n)
    shifts = np.arange(n, dtype=np.uint64)
    x = np.sum(X_BITS[digits].astype(np.uint64) << shifts, axis=1)
    z = np.sum(Z_BITS[digits].astype(np.uint64) << shifts, axis=1)
    return x.astype(np.uint64), z.astype(np.uint64)


def assignment_digits(n):
    """Pauli index digits of all ``4**n`` assignments, qubit 1 first.

    Returns:
        :obj:`np.ndarray`: Array of shape ``(4**n, n)``, row ``a`` holding
        the base-4 digits of ``a`` with the most significant first.

    """
    idx = np.arange(4 ** n, dtype=np.int64)
    powers = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % 4


def enumerate_coset(code, s):
    """All errors with a given syndrome.

    Args:
        code (:class:`StabilizerCode`): Code with at most
            :const:`config.ENUM_MAX_QUBITS` qubits.
        s (:class:`Syndrome`): Target syndrome.

    Returns:
        List[:class:`PauliString`]: The ``4**n / 2**l`` coset members in
        lexicographic letter order.

    """
    if s.l != code.l:
        raise libsyn.DimensionError("syndrome length mismatch")
    x, z = all_strings(code.n)
    mask = code.syndrome_values(x, z) == s.value
    return [PauliString(code.n, int(xi), int(zi))
            for xi, zi in zip(x[mask], z[mask])]
