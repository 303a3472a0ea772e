"""Binary-symplectic Pauli algebra.

An n-qubit Pauli (global phase deliberately untracked) is a pair of n-bit
masks: bit i of ``x_bits``/``z_bits`` is the X/Z component on qubit i.
Clifford maps from the gate set {H, S, CNOT, PERM} are compiled to a
2n x 2n GF(2) action on the stacked vector (x || z); conjugating a Pauli by
a circuit is one mat-vec over GF(2).

Index convention: little-endian, 0-based.  Bit i == qubit i; label strings
are written qubit 0 first ("XIZ" has X on qubit 0, Z on qubit 2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Literal

import numpy as np

from ._bits import int_to_words, pack_bit_rows, parity, words_needed


class DimensionMismatch(ValueError):
    """Operands act on different qubit counts."""


class DetectionClass(enum.IntEnum):
    REJECTED = 0
    ACCEPTED_IDENTITY = 1
    ACCEPTED_FORGED = 2


_KIND_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_KIND = {v: k for k, v in _KIND_TO_XZ.items()}


@dataclass(frozen=True)
class PauliOp:
    """n-qubit Pauli as (x_bits, z_bits) masks, phase dropped."""

    n: int
    x_bits: int
    z_bits: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative qubit count")
        full = (1 << self.n) - 1
        if self.x_bits & ~full or self.z_bits & ~full or self.x_bits < 0 or self.z_bits < 0:
            raise ValueError("bit masks exceed qubit count")

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, pos: int, kind: str) -> "PauliOp":
        if not 0 <= pos < n:
            raise ValueError(f"position {pos} out of range for n={n}")
        x, z = _KIND_TO_XZ[kind]
        return cls(n, x << pos, z << pos)

    @classmethod
    def from_label(cls, label: str) -> "PauliOp":
        x = z = 0
        for i, ch in enumerate(label):
            xb, zb = _KIND_TO_XZ[ch]
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    def label(self) -> str:
        return "".join(
            _XZ_TO_KIND[((self.x_bits >> i) & 1, (self.z_bits >> i) & 1)]
            for i in range(self.n)
        )

    def kind_at(self, pos: int) -> str:
        return _XZ_TO_KIND[((self.x_bits >> pos) & 1, (self.z_bits >> pos) & 1)]

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def compose(self, other: "PauliOp") -> "PauliOp":
        """Pauli product up to phase (bitwise xor)."""
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n} != {other.n}")
        return PauliOp(self.n, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits)

    def to_json(self) -> dict:
        return {"n": self.n, "x_hex": format(self.x_bits, "x"), "z_hex": format(self.z_bits, "x")}

    @classmethod
    def from_json(cls, obj: dict) -> "PauliOp":
        return cls(int(obj["n"]), int(obj["x_hex"], 16), int(obj["z_hex"], 16))


class PauliWeights(tuple):
    """(x, y, z, total) weight split plus the pure-factor part weights.

    ``x_part`` = |supp(x_bits)| (X-weight + Y-weight) and ``z_part`` =
    |supp(z_bits)|, the weights of the pure-X / pure-Z factors.
    """

    __slots__ = ()

    def __new__(cls, x, y, z, total, x_part, z_part):
        return super().__new__(cls, (x, y, z, total, x_part, z_part))

    x = property(lambda s: s[0])
    y = property(lambda s: s[1])
    z = property(lambda s: s[2])
    total = property(lambda s: s[3])
    x_part = property(lambda s: s[4])
    z_part = property(lambda s: s[5])


def weights(p: PauliOp) -> PauliWeights:
    y = (p.x_bits & p.z_bits).bit_count()
    xw = p.x_bits.bit_count() - y
    zw = p.z_bits.bit_count() - y
    return PauliWeights(xw, y, zw, xw + y + zw, xw + y, zw + y)


def sip(a: PauliOp, b: PauliOp) -> int:
    """Symplectic inner product: 0 iff the Paulis commute."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} != {b.n}")
    return parity(a.x_bits & b.z_bits) ^ parity(b.x_bits & a.z_bits)


def all_paulis(n: int) -> Iterator[PauliOp]:
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliOp(n, x, z)


# ---------------------------------------------------------------------------
# Gates and circuits
# ---------------------------------------------------------------------------

Gate = tuple  # ("H", i) | ("S", i) | ("CNOT", c, t) | ("PERM", (p0, p1, ...))


def h(i: int) -> Gate:
    return ("H", i)


def s(i: int) -> Gate:
    return ("S", i)


def cnot(control: int, target: int) -> Gate:
    return ("CNOT", control, target)


def perm(mapping: Iterable[int]) -> Gate:
    """Qubit relabeling: qubit i moves to position mapping[i]."""
    return ("PERM", tuple(mapping))


def offset_gate(gate: Gate, off: int) -> Gate:
    kind = gate[0]
    if kind in ("H", "S"):
        return (kind, gate[1] + off)
    if kind == "CNOT":
        return (kind, gate[1] + off, gate[2] + off)
    raise ValueError(f"cannot offset gate {gate!r}")


def _validate_gate(gate: Gate, n: int) -> None:
    kind = gate[0]
    if kind in ("H", "S"):
        if not 0 <= gate[1] < n:
            raise ValueError(f"{gate!r} out of range for n={n}")
    elif kind == "CNOT":
        c, t = gate[1], gate[2]
        if c == t or not (0 <= c < n and 0 <= t < n):
            raise ValueError(f"{gate!r} invalid for n={n}")
    elif kind == "PERM":
        p = gate[1]
        if sorted(p) != list(range(n)):
            raise ValueError(f"{gate!r} is not a permutation of 0..{n - 1}")
    else:
        raise ValueError(f"unknown gate {gate!r}")


def _invert_gate(gate: Gate) -> Gate:
    if gate[0] == "PERM":
        p = gate[1]
        inv = [0] * len(p)
        for i, q in enumerate(p):
            inv[q] = i
        return ("PERM", tuple(inv))
    return gate  # H, S, CNOT are involutions at the symplectic level


def _apply_gate_rows(rows: list[int], gate: Gate, n: int) -> None:
    """Left-multiply the compiled action by one gate (in place)."""
    kind = gate[0]
    if kind == "H":
        i = gate[1]
        rows[i], rows[n + i] = rows[n + i], rows[i]
    elif kind == "S":
        i = gate[1]
        rows[n + i] ^= rows[i]
    elif kind == "CNOT":
        c, t = gate[1], gate[2]
        rows[t] ^= rows[c]
        rows[n + c] ^= rows[n + t]
    elif kind == "PERM":
        p = gate[1]
        old = rows[:]
        for i, q in enumerate(p):
            rows[q] = old[i]
            rows[n + q] = old[n + i]
    else:  # pragma: no cover - guarded at construction
        raise ValueError(f"unknown gate {gate!r}")


def _compile(gates: Iterable[Gate], n: int) -> tuple[int, ...]:
    rows = [1 << r for r in range(2 * n)]
    for g in gates:
        _apply_gate_rows(rows, g, n)
    return tuple(rows)


@dataclass(frozen=True)
class SymplecticCircuit:
    """Clifford map as a gate list compiled to a GF(2) symplectic action.

    The forward action sends the index vector of P to that of V P V†;
    the inverse action computes V† P V.
    """

    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _validate_gate(g, self.n)

    @classmethod
    def identity(cls, n: int) -> "SymplecticCircuit":
        return cls(n, ())

    @cached_property
    def rows(self) -> tuple[int, ...]:
        return _compile(self.gates, self.n)

    @cached_property
    def rows_inv(self) -> tuple[int, ...]:
        inverted = [_invert_gate(g) for g in reversed(self.gates)]
        return _compile(inverted, self.n)

    def action_matrix(self, inverse: bool = False) -> np.ndarray:
        rows = self.rows_inv if inverse else self.rows
        nn = 2 * self.n
        out = np.zeros((nn, nn), dtype=np.uint8)
        for r in range(nn):
            m = rows[r]
            for c in range(nn):
                out[r, c] = (m >> c) & 1
        return out

    def packed_rows(self, inverse: bool = False) -> np.ndarray:
        rows = self.rows_inv if inverse else self.rows
        nn = 2 * self.n
        w = words_needed(nn)
        out = np.zeros((nn, w), dtype=np.uint64)
        for r in range(nn):
            out[r] = int_to_words(rows[r], w)
        return out

    def then(self, other: "SymplecticCircuit") -> "SymplecticCircuit":
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n} != {other.n}")
        return SymplecticCircuit(self.n, self.gates + other.gates)


def apply_rows(rows: tuple[int, ...], v: int) -> int:
    out = 0
    for r, row in enumerate(rows):
        if (row & v).bit_count() & 1:
            out |= 1 << r
    return out


def conjugate(
    p: PauliOp,
    circuit: SymplecticCircuit,
    direction: Literal["forward", "inverse"] = "forward",
) -> PauliOp:
    """Image of P under conjugation: forward gives V P V†, inverse V† P V."""
    if p.n != circuit.n:
        raise DimensionMismatch(f"Pauli on {p.n} qubits, circuit on {circuit.n}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"bad direction {direction!r}")
    rows = circuit.rows if direction == "forward" else circuit.rows_inv
    v = p.x_bits | (p.z_bits << p.n)
    out = apply_rows(rows, v)
    mask = (1 << p.n) - 1
    return PauliOp(p.n, out & mask, out >> p.n)


# ---------------------------------------------------------------------------
# Tag layout and detection classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TagLayout:
    """Partition of the circuit's input wires into message and tag positions."""

    n_total: int
    message_positions: tuple[int, ...]
    tag_positions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "message_positions", tuple(self.message_positions))
        object.__setattr__(self, "tag_positions", tuple(self.tag_positions))
        combined = sorted(self.message_positions + self.tag_positions)
        if combined != list(range(self.n_total)):
            raise ValueError("message/tag positions must partition 0..n_total-1")

    @classmethod
    def message_first(cls, n_total: int, m: int) -> "TagLayout":
        return cls(n_total, tuple(range(m)), tuple(range(m, n_total)))

    @cached_property
    def message_mask(self) -> int:
        out = 0
        for i in self.message_positions:
            out |= 1 << i
        return out

    @cached_property
    def tag_mask(self) -> int:
        out = 0
        for i in self.tag_positions:
            out |= 1 << i
        return out


def classify(p: PauliOp, layout: TagLayout) -> DetectionClass:
    """Detection class of a Pauli already conjugated back to the input frame.

    REJECTED: some tag carries an X/Y component (the 0-tag measurement trips).
    ACCEPTED_IDENTITY: accepted and the message component is identity.
    ACCEPTED_FORGED: accepted with a non-identity message component.
    """
    if p.n != layout.n_total:
        raise DimensionMismatch(f"Pauli on {p.n} qubits, layout on {layout.n_total}")
    if p.x_bits & layout.tag_mask:
        return DetectionClass.REJECTED
    if (p.x_bits | p.z_bits) & layout.message_mask:
        return DetectionClass.ACCEPTED_FORGED
    return DetectionClass.ACCEPTED_IDENTITY


def message_component(p: PauliOp, layout: TagLayout) -> str:
    """Single-qubit message Pauli of an accepted frame (m = 1 layouts)."""
    if len(layout.message_positions) != 1:
        raise ValueError("message_component requires a single message position")
    pos = layout.message_positions[0]
    return _XZ_TO_KIND[((p.x_bits >> pos) & 1, (p.z_bits >> pos) & 1)]


def pack_pauli_batch(x_bits: np.ndarray, z_bits: np.ndarray, n: int) -> np.ndarray:
    """Pack (B, n) x/z bit arrays into (B, W) uint64 stacked (x || z) vectors."""
    stacked = np.concatenate([x_bits, z_bits], axis=1).astype(np.uint8)
    return pack_bit_rows(stacked, 2 * n)
