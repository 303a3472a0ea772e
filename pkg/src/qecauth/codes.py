"""Classical GF(2) linear codes and weakly self-dual CSS codes.

Codewords and generator rows are int bitmasks (bit i = coordinate i).
The pipeline of interest: a self-dual Reed–Muller code R(i, 2i+1) is
punctured at its last coordinate, C1 is the punctured code, C2 := dual(C1),
and CSS(C1, C2) gives a [[2^(2i+1)-1, 1]] code together with an
{H, CNOT, PERM} encoder circuit, its conventional distance, benign
distance, and weight-sparsity ratio table.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ContainmentError, PunctureError, RankGuardError, SelfDualityError
from .symplectic import Gate, SymplecticCircuit, TagLayout

MAX_EXHAUSTIVE_RANK = 24


def rref(rows, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Reduced row echelon form over GF(2); returns (rows, pivot columns).

    Pivots are chosen lowest column first; zero rows are dropped, so the
    result is the canonical basis of the row space.
    """
    mat = [int(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        bit = 1 << c
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i] & bit:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i] & bit:
                mat[i] ^= mat[r]
        pivots.append(c)
        r += 1
    return tuple(mat[:r]), tuple(pivots)


@dataclass(frozen=True)
class LinearCode:
    """Binary linear code given by its RREF generator matrix (row bitmasks)."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        full = (1 << self.n) - 1
        for r in self.rows:
            if r & ~full:
                raise ValueError("generator row exceeds block length")

    @classmethod
    def from_generators(cls, n: int, rows) -> "LinearCode":
        reduced, _ = rref(rows, n)
        return cls(n, reduced)

    @property
    def k(self) -> int:
        return len(self.rows)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        _, piv = rref(self.rows, self.n)
        return piv

    def contains(self, word: int) -> bool:
        w = int(word)
        for row, p in zip(self.rows, self.pivots):
            if (w >> p) & 1:
                w ^= row
        return w == 0

    def contains_code(self, other: "LinearCode") -> bool:
        return all(self.contains(r) for r in other.rows)

    def codewords(self):
        for r in range(1 << self.k):
            w = 0
            for j in range(self.k):
                if (r >> j) & 1:
                    w ^= self.rows[j]
            yield w


def dual(c: LinearCode) -> LinearCode:
    """Dual code: kernel of the generator matrix, rank n - k."""
    rows, pivots = rref(c.rows, c.n)
    pivot_set = set(pivots)
    basis = []
    for f in range(c.n):
        if f in pivot_set:
            continue
        v = 1 << f
        for row, p in zip(rows, pivots):
            if (row >> f) & 1:
                v |= 1 << p
        basis.append(v)
    reduced, _ = rref(basis, c.n)
    return LinearCode(c.n, reduced)


def reed_muller(r: int, a: int) -> LinearCode:
    """Reed–Muller code R(r, a): evaluation vectors of monomials of degree <= r.

    Coordinate p in 0..2^a-1 is the evaluation point whose j-th variable is
    bit j of p.
    """
    if not 0 <= r <= a:
        raise ValueError(f"need 0 <= r <= a, got r={r}, a={a}")
    if a > 16:
        raise ValueError("enumeration guard: a <= 16")
    n = 1 << a
    ones = (1 << n) - 1
    variables = []
    for j in range(a):
        v = 0
        for p in range(n):
            if (p >> j) & 1:
                v |= 1 << p
        variables.append(v)
    rows = [ones]
    for deg in range(1, r + 1):
        for combo in itertools.combinations(range(a), deg):
            v = ones
            for j in combo:
                v &= variables[j]
            rows.append(v)
    return LinearCode.from_generators(n, rows)


def weight_counts(c: LinearCode, init: int = 0) -> np.ndarray:
    if c.k > MAX_EXHAUSTIVE_RANK:
        raise RankGuardError(f"rank {c.k} exceeds exhaustive guard {MAX_EXHAUSTIVE_RANK}")
    return kernels.gray_weight_counts(c.rows, c.n, init)


@dataclass(frozen=True)
class WeightDistribution:
    """counts[w] = number of codewords of Hamming weight w."""

    n: int
    rank: int
    counts: tuple[int, ...]

    @classmethod
    def of_code(cls, c: LinearCode) -> "WeightDistribution":
        return cls(c.n, c.k, tuple(int(x) for x in weight_counts(c)))

    def min_nonzero_weight(self) -> int | None:
        for w in range(1, self.n + 1):
            if self.counts[w]:
                return w
        return None


def min_distance(c: LinearCode) -> int | None:
    """Minimum nonzero codeword weight by full enumeration of 2^k codewords.

    Returns None for the zero code (no nonzero codeword; distance infinite).
    Raises RankGuardError beyond rank 24; see distance_estimate for larger
    codes.
    """
    if c.k == 0:
        return None
    return WeightDistribution.of_code(c).min_nonzero_weight()


@dataclass(frozen=True)
class DistanceInfo:
    value: int | None
    exact: bool
    method: str


def distance_estimate(c: LinearCode, samples: int = 20000, seed: int = 0) -> DistanceInfo:
    """Exact distance when the rank guard allows, sampled upper bound otherwise."""
    if c.k == 0:
        return DistanceInfo(None, True, "trivial")
    if c.k <= MAX_EXHAUSTIVE_RANK:
        return DistanceInfo(min_distance(c), True, "exhaustive")
    rng = np.random.default_rng(seed)
    best = c.n + 1
    for row in c.rows:
        best = min(best, row.bit_count())
    for _ in range(samples):
        r = int(rng.integers(1, 1 << c.k))
        w = 0
        for j in range(c.k):
            if (r >> j) & 1:
                w ^= c.rows[j]
        if w:
            best = min(best, w.bit_count())
    return DistanceInfo(best, False, "sampled-bound")


def puncture_last(c: LinearCode) -> LinearCode:
    """Drop the last coordinate: C1 = {v : v0 in C or v1 in C}.

    Preconditions: d(C) > 1 (so distinct codewords stay distinct), some
    codeword ends in 1 (else the rank would drop; puncture elsewhere), and
    the punctured distance stays above 1 (degenerate-output guard).
    """
    d = min_distance(c)
    if d is None or d <= 1:
        raise PunctureError(f"distance must exceed 1, got {d}")
    last = 1 << (c.n - 1)
    if not any(row & last for row in c.rows):
        raise PunctureError("all codewords end in 0; pick a different position to puncture")
    strip = last - 1
    punctured = LinearCode.from_generators(c.n - 1, [row & strip for row in c.rows])
    if punctured.k != c.k:
        raise PunctureError("rank dropped under puncturing")
    d_new = min_distance(punctured)
    if d_new is None or d_new <= 1:
        raise PunctureError(f"punctured distance {d_new} is degenerate (needs > 1)")
    assert d_new in (d - 1, d)
    return punctured


# ---------------------------------------------------------------------------
# CSS construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CssCode:
    """Weakly self-dual CSS code: C2 = dual(C1), C2 a subset of C1, m = 1.

    ``encoder`` maps input wire 0 (message) plus n-1 zero tags to the
    codeword space; ``layout`` records that wire split.
    """

    c1: LinearCode
    c2: LinearCode
    n: int
    m: int
    distance: int
    benign_dist: int | None
    logical_x: int
    encoder: SymplecticCircuit
    layout: TagLayout

    def to_descriptor(self, family: str = "rm-css", index: int | None = None) -> dict:
        out = {
            "family": family,
            "n": self.n,
            "m": self.m,
            "d": self.distance,
            "benign_d": self.benign_dist,
            "generator_rows_hex": [format(r, "x") for r in self.c1.rows],
        }
        if index is not None:
            out["index"] = index
        return out


def _complete_basis(cols: list[int], n: int) -> list[int]:
    """Extend independent column masks to a basis of F_2^n with unit vectors."""
    out = list(cols)
    basis_rows, _ = rref(out, n)
    basis_rows = list(basis_rows)
    for j in range(n):
        if len(out) == n:
            break
        candidate = 1 << j
        reduced, _ = rref(basis_rows + [candidate], n)
        if len(reduced) > len(basis_rows):
            out.append(candidate)
            basis_rows = list(reduced)
    if len(out) != n:
        raise AssertionError("failed to complete basis")
    return out


def linear_circuit_from_matrix(cols: list[int], n: int) -> tuple[Gate, ...]:
    """Synthesize CNOT/PERM gates whose basis action |v> -> |Av> realizes A.

    ``cols[j]`` is column j of the invertible matrix A (mask over rows).
    Classic PLU route: A = P^T L U over GF(2); U and L become CNOT layers,
    the pivoting becomes one PERM.
    """
    # row masks over columns
    rows = [0] * n
    for j, col in enumerate(cols):
        for r in range(n):
            if (col >> r) & 1:
                rows[r] |= 1 << j
    piv = list(range(n))
    lmask = [0] * n
    for c in range(n):
        sel = None
        for i in range(c, n):
            if (rows[i] >> c) & 1:
                sel = i
                break
        if sel is None:
            raise ValueError("matrix is singular")
        if sel != c:
            rows[c], rows[sel] = rows[sel], rows[c]
            piv[c], piv[sel] = piv[sel], piv[c]
            lmask[c], lmask[sel] = lmask[sel], lmask[c]
        for i in range(c + 1, n):
            if (rows[i] >> c) & 1:
                rows[i] ^= rows[c]
                lmask[i] |= 1 << c
    gates: list[Gate] = []
    # U factor: ascending columns, controls on the diagonal
    for c in range(n):
        for r in range(c):
            if (rows[r] >> c) & 1:
                gates.append(("CNOT", c, r))
    # L factor: descending columns
    for c in range(n - 1, -1, -1):
        for r in range(c + 1, n):
            if (lmask[r] >> c) & 1:
                gates.append(("CNOT", c, r))
    if piv != list(range(n)):
        gates.append(("PERM", tuple(piv)))
    # verify the synthesized basis action
    state = [1 << j for j in range(n)]  # state[j] = image column of e_j
    for g in gates:
        if g[0] == "CNOT":
            c, t = g[1], g[2]
            for j in range(n):
                if (state[j] >> c) & 1:
                    state[j] ^= 1 << t
        else:
            mapping = g[1]
            for j in range(n):
                v = state[j]
                nv = 0
                for i in range(n):
                    if (v >> i) & 1:
                        nv |= 1 << mapping[i]
                state[j] = nv
    if state != [int(c) for c in cols]:
        raise AssertionError("CNOT/PERM synthesis produced a different linear map")
    return tuple(gates)


def _coset_representative(c1: LinearCode, c2: LinearCode) -> int:
    """A word in C1 \\ C2, reduced against C2's pivots."""
    for row in c1.rows:
        if not c2.contains(row):
            w = row
            for r2, p2 in zip(c2.rows, c2.pivots):
                if (w >> p2) & 1:
                    w ^= r2
            return w
    raise ContainmentError("C1 equals C2; no logical representative")


def css_encoder_circuit(c2: LinearCode, logical: int, n: int) -> SymplecticCircuit:
    """Standard CSS encoder: H on the seed tags, then a CNOT/PERM network.

    Input wires: 0 = message, 1..k2 = seeds (put into |+> to generate the
    C2 superposition), the rest stay |0>.  The network's linear map sends
    e_0 -> logical representative and e_j -> j-th C2 generator.
    """
    cols = [logical] + list(c2.rows)
    cols = _complete_basis(cols, n)
    gates: list[Gate] = [("H", 1 + j) for j in range(c2.k)]
    gates.extend(linear_circuit_from_matrix(cols, n))
    return SymplecticCircuit(n, tuple(gates))


def css_from_selfdual(c: LinearCode) -> CssCode:
    """Puncture a self-dual code and build CSS(C1, C2), C2 = dual(C1).

    Yields an [[n-1, 1, d']] code with d' in {d-1, d} and benign distance
    at least d'.
    """
    if c != dual(c):
        raise SelfDualityError(f"[{c.n},{c.k}] input is not self-dual")
    c1 = puncture_last(c)
    c2 = dual(c1)
    if not c1.contains_code(c2):
        raise ContainmentError("C2 is not contained in C1")
    if c2.k != c1.k - 1:
        raise ContainmentError(f"rank(C2)={c2.k}, expected rank(C1)-1={c1.k - 1}")
    n = c1.n
    logical = _coset_representative(c1, c2)
    coset_counts = kernels.gray_weight_counts(c2.rows, n, logical)
    distance = next(w for w in range(n + 1) if coset_counts[w])
    benign = WeightDistribution.of_code(c2).min_nonzero_weight()
    encoder = css_encoder_circuit(c2, logical, n)
    layout = TagLayout.message_first(n, 1)
    return CssCode(
        c1=c1,
        c2=c2,
        n=n,
        m=c1.k - c2.k,
        distance=distance,
        benign_dist=benign,
        logical_x=logical,
        encoder=encoder,
        layout=layout,
    )


def benign_distance(css: CssCode) -> int | None:
    """Minimum weight of a non-identity stabilizer.

    A stabilizer is X(u)Z(v) with u, v in C2 and weight |supp(u) + supp(v)|
    >= max(|u|, |v|), so the minimum is attained by a pure-type element:
    the minimum nonzero weight of C2 (None, i.e. infinite, when C2 = {0}).
    The 64-element brute-force oracle in the test suite pins this shortcut.
    """
    return WeightDistribution.of_code(css.c2).min_nonzero_weight()


def rm_css(index: int) -> CssCode:
    """The punctured self-dual Reed–Muller CSS family member at i = index."""
    if index < 1:
        raise ValueError("family index starts at 1")
    return css_from_selfdual(reed_muller(index, 2 * index + 1))


# ---------------------------------------------------------------------------
# Weight sparsity
# ---------------------------------------------------------------------------


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@dataclass(frozen=True)
class SparsityReport:
    """Per-weight benign ratios r(w) = B^X(w) / A^X(w) for the X-type class.

    B^X(w) counts weight-w non-identity X-stabilizers (codewords of C2),
    A^X(w) = C(n, w).  By weak self-duality the Z-type table is identical.
    """

    n: int
    d: int
    ratios: tuple[Fraction, ...]
    f_x: Fraction
    rcw_range: tuple[int, int]
    rcw_ok: dict[int, bool]
    all_ones_excluded: bool
    entropy_check: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "f_X": float(self.f_x),
            "ratios": {str(w): float(r) for w, r in enumerate(self.ratios) if r},
            "rcw_range": list(self.rcw_range),
            "rcw_ok": {str(w): bool(v) for w, v in self.rcw_ok.items()},
            "all_ones_excluded": self.all_ones_excluded,
            "entropy_check": self.entropy_check,
        }


def check_rcw(counts, n: int, d: int) -> tuple[tuple[int, int], dict[int, bool]]:
    """Ray-Chaudhuri–Wilson middle-range check |C(w)| <= C(n, floor(w - d/2)).

    Applies for d <= w < n/8 (empty for the small family members, reported
    vacuously true).  floor only weakens the bound, keeping it sound for
    odd d.
    """
    lo = d
    hi = (n + 7) // 8  # first w with w >= n/8
    flags = {}
    for w in range(lo, hi):
        s = math.floor(w - d / 2)
        flags[w] = counts[w] <= math.comb(n, s) if s >= 0 else counts[w] == 0
    return (lo, hi), flags


def sparsity_report(css: CssCode) -> SparsityReport:
    if css.c2.k > MAX_EXHAUSTIVE_RANK:
        raise RankGuardError(f"rank {css.c2.k} exceeds exhaustive guard")
    n = css.n
    counts = [int(x) for x in weight_counts(css.c2)]
    b_x = list(counts)
    b_x[0] = 0  # identity excluded: benign Paulis are non-identity by definition
    ratios = tuple(Fraction(b_x[w], math.comb(n, w)) for w in range(n + 1))
    f_x = max(ratios)
    rcw_range, rcw_ok = check_rcw(b_x, n, css.distance)
    return SparsityReport(
        n=n,
        d=css.distance,
        ratios=ratios,
        f_x=f_x,
        rcw_range=rcw_range,
        rcw_ok=rcw_ok,
        all_ones_excluded=counts[n] == 0,
        entropy_check=binary_entropy(1 / 8) > 0.5,
    )
