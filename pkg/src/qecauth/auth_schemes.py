"""The three keyed authentication code families and their verdicts.

trap:        V_k = perm_k (E x I^n x H^n)  on 3n wires, message at wire 0
strong trap: V_k = perm_k E^x3 H_(2n)      (H on wire 2n, applied before E)
clifford:    V_k a uniformly random Clifford on m+t wires

A Pauli attack's verdict is classify(V_k† P V_k) against the family layout.
The quantum one-time pad of the encode-encrypt construction is carried on
keys as an optional field but never enters verdicts: conjugating a Pauli by
a Pauli only flips a sign, which this representation drops (the twirl
argument; see the OTP-independence test).

Clifford keys are sampled exactly uniformly (any 2-design would do); their
gate lists come from the recorded sampling transvections, each compiled to
an {H, S, CNOT} Pauli-root circuit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import kernels
from ._bits import pack_bit_rows, support
from .codes import CssCode
from .symplectic import (
    DetectionClass,
    DimensionMismatch,
    Gate,
    PauliOp,
    SymplecticCircuit,
    TagLayout,
    classify,
    conjugate,
    message_component,
)


class KindMismatch(ValueError):
    """Key kind does not match the family kind."""


class FamilyKind(enum.Enum):
    TRAP = "trap"
    STRONG_TRAP = "strong-trap"
    CLIFFORD = "clifford"


def _embed_gates(gates, n_inner: int, offset: int, n_total: int) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        if g[0] == "PERM":
            mapping = list(range(n_total))
            for i, q in enumerate(g[1]):
                mapping[offset + i] = offset + q
            out.append(("PERM", tuple(mapping)))
        elif g[0] == "CNOT":
            out.append(("CNOT", g[1] + offset, g[2] + offset))
        else:
            out.append((g[0], g[1] + offset))
    return out


@dataclass(frozen=True)
class AuthFamily:
    """Descriptor of a keyed code family; immutable, shareable."""

    kind: FamilyKind
    inner: CssCode | None
    m: int
    t: int

    @property
    def n_total(self) -> int:
        return self.m + self.t

    @cached_property
    def layout(self) -> TagLayout:
        return TagLayout.message_first(self.n_total, self.m)

    @cached_property
    def fixed_gates(self) -> tuple[Gate, ...]:
        """Key-independent part of the encoder (trap kinds)."""
        if self.kind is FamilyKind.CLIFFORD:
            return ()
        inner = self.inner
        n = inner.n
        gates: list[Gate] = []
        if self.kind is FamilyKind.TRAP:
            gates += _embed_gates(inner.encoder.gates, n, 0, 3 * n)
            gates += [("H", q) for q in range(2 * n, 3 * n)]
        else:
            gates.append(("H", 2 * n))
            for block in range(3):
                gates += _embed_gates(inner.encoder.gates, n, block * n, 3 * n)
        return tuple(gates)

    @cached_property
    def fixed_circuit(self) -> SymplecticCircuit:
        return SymplecticCircuit(self.n_total, self.fixed_gates)

    @cached_property
    def fixed_inv_packed(self) -> np.ndarray:
        return self.fixed_circuit.packed_rows(inverse=True)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "inner_code_ref": None
            if self.inner is None
            else {"n": self.inner.n, "d": self.inner.distance, "benign_d": self.inner.benign_dist},
            "n": self.n_total,
            "m": self.m,
            "t": self.t,
        }


def trap_family(inner: CssCode) -> AuthFamily:
    return AuthFamily(FamilyKind.TRAP, inner, 1, 3 * inner.n - 1)


def strong_trap_family(inner: CssCode) -> AuthFamily:
    return AuthFamily(FamilyKind.STRONG_TRAP, inner, 1, 3 * inner.n - 1)


def clifford_family(m: int = 1, t: int = 6) -> AuthFamily:
    if m < 1 or t < 1 or m + t > 16:
        raise ValueError("clifford family needs m >= 1, t >= 1, m + t <= 16")
    return AuthFamily(FamilyKind.CLIFFORD, None, m, t)


# ---------------------------------------------------------------------------
# Keys
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Key:
    """Per-encryption key material.

    ``otp`` is the quantum one-time-pad key (x_mask, z_mask) of the
    encode-encrypt construction; it is carried for completeness but is
    provably irrelevant to detection verdicts.
    """

    kind: FamilyKind
    perm: tuple[int, ...] | None = None
    transvections: tuple[int, ...] | None = None
    otp: tuple[int, int] | None = None
    seed_info: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.perm is not None:
            out["perm"] = list(self.perm)
        if self.transvections is not None:
            out["transvections_hex"] = [format(h, "x") for h in self.transvections]
        if self.otp is not None:
            out["otp"] = {"x_hex": format(self.otp[0], "x"), "z_hex": format(self.otp[1], "x")}
        return out


def sample_key(
    family: AuthFamily,
    rng: np.random.Generator,
    with_otp: bool = False,
    seed_info: str = "",
) -> Key:
    """Uniform key: Fisher–Yates permutation or uniform Clifford element."""
    otp = None
    if with_otp:
        nn = family.n_total
        xm = int.from_bytes(rng.bytes((nn + 7) // 8), "little") & ((1 << nn) - 1)
        zm = int.from_bytes(rng.bytes((nn + 7) // 8), "little") & ((1 << nn) - 1)
        otp = (xm, zm)
    if family.kind is FamilyKind.CLIFFORD:
        n = family.n_total
        ks = np.empty((1, n), dtype=np.int64)
        for j in range(1, n + 1):
            ks[0, j - 1] = rng.integers(1, 1 << (2 * j), dtype=np.int64)
        bits = rng.integers(0, 2, size=(1, n * n), dtype=np.uint8)
        trans = kernels.transvections_for_sample(n, ks[0], bits[0])
        return Key(family.kind, transvections=tuple(trans), otp=otp, seed_info=seed_info)
    perm = tuple(int(x) for x in rng.permutation(family.n_total))
    return Key(family.kind, perm=perm, otp=otp, seed_info=seed_info)


@dataclass(frozen=True)
class KeyBatch:
    """Vectorized key material for Monte-Carlo sweeps."""

    kind: FamilyKind
    n_total: int
    perms: np.ndarray | None = None  # (B, N) int64
    inv_actions: np.ndarray | None = None  # (B, 2n, 2n) uint8

    @property
    def count(self) -> int:
        arr = self.perms if self.perms is not None else self.inv_actions
        return arr.shape[0]


def sample_key_batch(family: AuthFamily, count: int, rng: np.random.Generator) -> KeyBatch:
    if family.kind is FamilyKind.CLIFFORD:
        n = family.n_total
        mats = kernels.sample_symplectic_batch(n, count, rng)
        # symplectic inverse: M^-1 = Omega M^T Omega
        sw = np.concatenate([np.arange(n, 2 * n), np.arange(0, n)])
        inv = mats.transpose(0, 2, 1)[:, sw][:, :, sw]
        return KeyBatch(family.kind, n, inv_actions=np.ascontiguousarray(inv))
    base = np.tile(np.arange(family.n_total, dtype=np.int64), (count, 1))
    perms = rng.permuted(base, axis=1)
    return KeyBatch(family.kind, family.n_total, perms=perms)


# ---------------------------------------------------------------------------
# Transvection -> gate synthesis (Clifford keys)
# ---------------------------------------------------------------------------


def transvection_circuit_gates(mask: int, n: int) -> tuple[Gate, ...]:
    """Gates whose symplectic action is the transvection v -> v + <h, v> h.

    Realizes the square root of the Pauli P_h: reduce P_h to a single Z by
    local maps and a CNOT ladder, apply S there, and undo the reduction.
    """
    x = mask & ((1 << n) - 1)
    z = mask >> n
    if x == 0 and z == 0:
        return ()
    supp = sorted(set(support(x)) | set(support(z)))
    pre: list[Gate] = []
    for q in supp:
        xq = (x >> q) & 1
        zq = (z >> q) & 1
        if xq and zq:
            pre += [("S", q), ("H", q)]  # Y -> Z
        elif xq:
            pre.append(("H", q))  # X -> Z
    pivot = supp[0]
    for q in supp[1:]:
        pre.append(("CNOT", q, pivot))
    return tuple(pre) + (("S", pivot),) + tuple(reversed(pre))


def clifford_gates_from_transvections(transvections, n: int) -> tuple[Gate, ...]:
    gates: list[Gate] = []
    for h in transvections:
        gates.extend(transvection_circuit_gates(int(h), n))
    return tuple(gates)


def key_gate_list(family: AuthFamily, key: Key) -> list[list]:
    """JSON-friendly gate list of the per-key encoder circuit."""
    circ = encoder(family, key)
    out = []
    for g in circ.gates:
        if g[0] == "PERM":
            out.append(["PERM", list(g[1])])
        else:
            out.append(list(g))
    return out


# ---------------------------------------------------------------------------
# Encoders and verdicts
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def encoder(family: AuthFamily, key: Key) -> SymplecticCircuit:
    """The per-key encoding circuit V_k."""
    if key.kind is not family.kind:
        raise KindMismatch(f"key kind {key.kind} != family kind {family.kind}")
    if family.kind is FamilyKind.CLIFFORD:
        gates = clifford_gates_from_transvections(key.transvections, family.n_total)
        return SymplecticCircuit(family.n_total, gates)
    return SymplecticCircuit(family.n_total, family.fixed_gates + (("PERM", key.perm),))


def verdict(family: AuthFamily, key: Key, attack: PauliOp) -> DetectionClass:
    """Detection class of V_k† P V_k against the family layout."""
    if attack.n != family.n_total:
        raise DimensionMismatch(f"attack on {attack.n} qubits, family on {family.n_total}")
    return classify(conjugate(attack, encoder(family, key), "inverse"), family.layout)


def logical_action(family: AuthFamily, key: Key, attack: PauliOp) -> str:
    """Effective message Pauli of an accepted attack ('I', 'X', 'Y' or 'Z')."""
    conj = conjugate(attack, encoder(family, key), "inverse")
    if classify(conj, family.layout) is DetectionClass.REJECTED:
        raise ValueError("logical_action is undefined on REJECTED attacks")
    return message_component(conj, family.layout)


def paulis_to_bits(paulis, n: int) -> tuple[np.ndarray, np.ndarray]:
    a = len(paulis)
    x = np.zeros((a, n), dtype=np.uint8)
    z = np.zeros((a, n), dtype=np.uint8)
    for i, p in enumerate(paulis):
        if p.n != n:
            raise DimensionMismatch(f"attack on {p.n} qubits, expected {n}")
        for q in range(n):
            x[i, q] = (p.x_bits >> q) & 1
            z[i, q] = (p.z_bits >> q) & 1
    return x, z


def _classify_bits(conj_bits: np.ndarray, n: int, m: int) -> np.ndarray:
    """Vectorized classify on (..., 2n) conjugated bit arrays (message first)."""
    x_part = conj_bits[..., :n]
    z_part = conj_bits[..., n:]
    rejected = x_part[..., m:].any(axis=-1)
    touched = x_part[..., :m].any(axis=-1) | z_part[..., :m].any(axis=-1)
    out = np.where(
        rejected,
        np.uint8(DetectionClass.REJECTED),
        np.where(
            touched,
            np.uint8(DetectionClass.ACCEPTED_FORGED),
            np.uint8(DetectionClass.ACCEPTED_IDENTITY),
        ),
    )
    return out.astype(np.uint8)


_CHUNK_PAIRS = 1 << 20


def verdict_batch(family: AuthFamily, batch: KeyBatch, attacks) -> np.ndarray:
    """(B, A) verdict codes for every key in the batch against every attack.

    Same semantics as ``verdict`` (the trap-kind path factorizes the
    encoder's inverse action as fixed-part x permutation; the tests pin the
    equality against per-key circuits).
    """
    if batch.kind is not family.kind:
        raise KindMismatch(f"batch kind {batch.kind} != family kind {family.kind}")
    n = family.n_total
    ax, az = paulis_to_bits(attacks, n)
    a_count = ax.shape[0]
    b_count = batch.count
    out = np.empty((b_count, a_count), dtype=np.uint8)
    if family.kind is FamilyKind.CLIFFORD:
        v = np.concatenate([ax, az], axis=1)  # (A, 2n)
        step = max(1, _CHUNK_PAIRS // max(1, a_count))
        for start in range(0, b_count, step):
            stop = min(start + step, b_count)
            inv = batch.inv_actions[start:stop]
            conj = np.matmul(inv, v.T[None, :, :].astype(np.uint8)) & 1  # (Bc, 2n, A)
            out[start:stop] = _classify_bits(conj.transpose(0, 2, 1), n, family.m)
        return out
    inv_packed = family.fixed_inv_packed
    step = max(1, _CHUNK_PAIRS // max(1, a_count))
    for start in range(0, b_count, step):
        stop = min(start + step, b_count)
        perms = batch.perms[start:stop]
        px = ax[:, perms].transpose(1, 0, 2)  # (Bc, A, N): attack bit at perm[i]
        pz = az[:, perms].transpose(1, 0, 2)
        stacked = np.concatenate([px, pz], axis=2).reshape(-1, 2 * n)
        packed = pack_bit_rows(stacked, 2 * n)
        conj = kernels.parity_matvec(inv_packed, packed)  # (Bc*A, 2N)
        out[start:stop] = _classify_bits(conj, n, family.m).reshape(stop - start, a_count)
    return out
