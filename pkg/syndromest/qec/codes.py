# Built-in codes and concatenation trees
"""Built-in stabilizer codes and trees of concatenated blocks.

A concatenated code encodes every qubit of a block again in the base
code. The blocks form a tree whose leaves are the physical qubits;
each block measures its own group of syndrome bits. Blocks are stored
in post-order, so the lowest level comes first and the root is last,
and each block's bits follow those of the blocks before it.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from syndromest.io import libsyn
from syndromest.qec import pauli
from syndromest.settings import config

#: Tuple[str]: Generators of the 5-qubit perfect code.
FIVE_QUBIT_GENERATORS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def _hamming_checks(r=3):
    # column j (1-based) of the parity check matrix is j in binary
    n = 2 ** r - 1
    return np.array([[(j >> i) & 1 for j in range(1, n + 1)]
                     for i in range(r)], dtype=np.uint8)


def _mask(bits):
    return sum(int(b) << i for i, b in enumerate(bits))


def _verified_logicals(gens, x_l, z_l, name):
    # construct the code to run the commutation checks on the candidates
    try:
        return pauli.StabilizerCode(gens, ((x_l, z_l),), name)
    except libsyn.ConfigError as e:
        raise libsyn.UnsupportedCodeError(
            "logical candidates for {} failed: {}".format(name, e))


def five_qubit_code():
    """The [[5,1,3]] perfect code with transversal logicals.

    Returns:
        :class:`pauli.StabilizerCode`: Code verified as perfect.

    """
    gens = tuple(pauli.PauliString.from_label(g)
                 for g in FIVE_QUBIT_GENERATORS)
    code = _verified_logicals(
        gens, pauli.PauliString.from_label("XXXXX"),
        pauli.PauliString.from_label("ZZZZZ"), "five_qubit")
    if not code.is_perfect:
        raise libsyn.UnsupportedCodeError("5-qubit code failed perfectness")
    return code


def steane_code():
    """The [[7,1,3]] Steane code from the [7,4] Hamming code.

    X-type generators come first, then Z-type generators, both from the
    rows of the Hamming parity check matrix. The logicals are supported
    on the lowest-weight odd Hamming codeword.

    Returns:
        :class:`pauli.StabilizerCode`: The CSS code.

    """
    checks = _hamming_checks()
    n = checks.shape[1]
    row_masks = [_mask(row) for row in checks]
    gens = tuple(pauli.PauliString(n, x=m) for m in row_masks)
    gens += tuple(pauli.PauliString(n, z=m) for m in row_masks)
    # odd-weight codewords are not in the row space, so they are logical
    words = np.arange(1, 2 ** n, dtype=np.uint64)
    synd = np.zeros(len(words), dtype=np.int64)
    for i, m in enumerate(row_masks):
        synd |= pauli.parity(words & np.uint64(m)).astype(np.int64) << i
    weights = pauli.popcount(words)
    valid = (synd == 0) & (weights % 2 == 1)
    cands, cand_weights = words[valid], weights[valid]
    word = int(cands[np.lexsort((cands, cand_weights))][0])
    return _verified_logicals(
        gens, pauli.PauliString(n, x=word), pauli.PauliString(n, z=word),
        "steane")


def repetition_code(n=3):
    """Bit-flip repetition code with checks ``Z_i Z_{i+1}``.

    Args:
        n (int): Number of qubits, at least 2.

    Returns:
        :class:`pauli.StabilizerCode`: Code with logicals ``X^n`` and
        ``Z_1``.

    """
    if n < 2:
        raise libsyn.ConfigError(
            "repetition codes need at least 2 qubits, got {}".format(n))
    gens = tuple(pauli.PauliString(n, z=0b11 << i) for i in range(n - 1))
    return _verified_logicals(
        gens, pauli.PauliString(n, x=(1 << n) - 1),
        pauli.PauliString.single(n, 1, pauli.Pauli.Z),
        "repetition{}".format(n))


def build_code(name, n=None):
    """Build a code by its :class:`config.CodeNames` value.

    Args:
        name (Union[str, :class:`config.CodeNames`]): Code name.
        n (int): Qubit count for repetition codes; defaults to None for 3.

    """
    if not isinstance(name, config.CodeNames):
        try:
            name = config.CodeNames(str(name).lower())
        except ValueError:
            raise libsyn.ConfigError("unknown code {!r}; choose from {}".format(
                name, [c.value for c in config.CodeNames]))
    if name is config.CodeNames.FIVE_QUBIT:
        return five_qubit_code()
    if name is config.CodeNames.STEANE:
        return steane_code()
    return repetition_code(3 if n is None else n)


@dataclass(frozen=True)
class ConcatSpec:
    """Concatenation of a base code with itself.

    Attributes:
        base (:class:`pauli.StabilizerCode`): Base code encoding one qubit.
        levels (int): Number of levels, at least 1.

    """
    base: pauli.StabilizerCode
    levels: int = 1

    def __post_init__(self):
        if self.levels < 1:
            raise libsyn.ConfigError(
                "levels must be at least 1, got {}".format(self.levels))
        if self.base.k != 1 or len(self.base.logicals) != 1:
            raise libsyn.UnsupportedCodeError(
                "concatenation needs a base code with one logical qubit")


@dataclass(frozen=True)
class Block:
    """Block of a concatenation tree.

    Attributes:
        index (int): Post-order index.
        level (int): 1 for blocks acting on physical qubits.
        children (Tuple[int]): Leaf qubit indices (0-based) at level 1,
            otherwise child block indices.
        parent (int): Parent block index, or -1 for the root.
        bit_offset (int): Index of the block's first syndrome bit.

    """
    index: int
    level: int
    children: tuple
    parent: int
    bit_offset: int


class ConcatTree:
    """Tree of blocks of a concatenated code.

    Attributes:
        spec (:class:`ConcatSpec`): Base code and level count.
        blocks (List[:class:`Block`]): Blocks in post-order.

    """

    def __init__(self, spec):
        self.spec = spec
        self.blocks = []
        self._next_leaf = 0
        self._build(spec.levels, -1)
        del self._next_leaf

    def _build(self, level, parent):
        base = self.spec.base
        if level == 1:
            children = range(self._next_leaf, self._next_leaf + base.n)
            self._next_leaf += base.n
        else:
            children = [self._build(level - 1, None) for _ in range(base.n)]
        # children come first to keep post-order
        index = len(self.blocks)
        self.blocks.append(
            Block(index, level, tuple(children), parent, index * base.l))
        if level > 1:
            for child in children:
                old = self.blocks[child]
                self.blocks[child] = Block(
                    old.index, old.level, old.children, index, old.bit_offset)
        return index

    @property
    def base(self):
        return self.spec.base

    @property
    def levels(self):
        return self.spec.levels

    @property
    def n_leaves(self):
        return self.base.n ** self.levels

    @property
    def n_blocks(self):
        return len(self.blocks)

    @property
    def n_bits(self):
        return self.n_blocks * self.base.l

    @property
    def root(self):
        return self.blocks[-1]

    def bit_slice(self, block):
        return slice(block.bit_offset, block.bit_offset + self.base.l)

    @cached_property
    def assignment_syndromes(self):
        """Syndrome value of every base-code assignment in lexicographic
        order, qubit 1 most significant."""
        x, z = pauli.all_strings(self.base.n)
        return self.base.syndrome_values(x, z)

    @cached_property
    def assignment_classes(self):
        """Logical class index of every base-code assignment."""
        x, z = pauli.all_strings(self.base.n)
        return self.base.class_values(x, z).astype(np.int64)

    def assignment_index(self, digits):
        """Lexicographic index of assignments given as ``(..., n)`` digit
        arrays."""
        powers = 4 ** np.arange(self.base.n - 1, -1, -1, dtype=np.int64)
        return np.asarray(digits, dtype=np.int64) @ powers

    def evaluate(self, leaf_paulis):
        """True syndrome bits and logical classes of leaf errors.

        Args:
            leaf_paulis (:obj:`np.ndarray`): ``(B, n_leaves)`` Pauli
                indices.

        Returns:
            :obj:`np.ndarray`, :obj:`np.ndarray`: ``(B, n_bits)`` syndrome
            bits as ``uint8`` and ``(B,)`` root class indices.

        """
        leaf_paulis = np.asarray(leaf_paulis, dtype=np.int64)
        if leaf_paulis.ndim != 2 or leaf_paulis.shape[1] != self.n_leaves:
            raise libsyn.DimensionError(
                "expected leaf errors of shape (B, {})".format(self.n_leaves))
        size = len(leaf_paulis)
        bits = np.zeros((size, self.n_bits), dtype=np.uint8)
        classes = np.zeros((size, self.n_blocks), dtype=np.int64)
        shifts = np.arange(self.base.l, dtype=np.int64)
        for block in self.blocks:
            if block.level == 1:
                digits = leaf_paulis[:, list(block.children)]
            else:
                digits = classes[:, list(block.children)]
            idx = self.assignment_index(digits)
            synd = self.assignment_syndromes[idx]
            bits[:, self.bit_slice(block)] = (synd[:, None] >> shifts) & 1
            classes[:, block.index] = self.assignment_classes[idx]
        return bits, classes[:, self.root.index]

    def __repr__(self):
        return "ConcatTree({}, levels={}, leaves={}, blocks={})".format(
            self.base.name, self.levels, self.n_leaves, self.n_blocks)


def concatenate(spec):
    """Build the block tree of a concatenated code.

    Args:
        spec (:class:`ConcatSpec`): Base code and level count.

    Returns:
        :class:`ConcatTree`: Tree with ``n**levels`` leaves and
        ``(n**levels - 1) / (n - 1)`` blocks.

    """
    tree = ConcatTree(spec)
    libsyn.printv("built", tree)
    return tree
