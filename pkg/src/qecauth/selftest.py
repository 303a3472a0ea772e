"""Fast invariant suite behind the ``selftest`` CLI command.

Each check returns (name, ok, detail).  ``overrides`` lets callers inject a
corrupted fixture (negative-path contract): currently ``rm13`` replaces the
self-dual [8,4] input of the golden pipeline.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import codes, kernels
from .auth_schemes import trap_family
from .purity_analysis import exact_undetected_prob_trap
from .symplectic import (
    DetectionClass,
    PauliOp,
    SymplecticCircuit,
    TagLayout,
    all_paulis,
    classify,
    conjugate,
    sip,
)

Check = tuple[str, bool, str]


def _random_circuit(n: int, rng: np.random.Generator, length: int = 30) -> SymplecticCircuit:
    gates = []
    for _ in range(length):
        kind = rng.integers(0, 4)
        if kind == 0:
            gates.append(("H", int(rng.integers(0, n))))
        elif kind == 1:
            gates.append(("S", int(rng.integers(0, n))))
        elif kind == 2 and n >= 2:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(("CNOT", int(c), int(t)))
        else:
            gates.append(("PERM", tuple(int(x) for x in rng.permutation(n))))
    return SymplecticCircuit(n, tuple(gates))


def _check_rm_params(overrides) -> Check:
    try:
        c = overrides.get("rm13") or codes.reed_muller(1, 3)
        d = codes.min_distance(c)
        ok = (c.n, c.k, d) == (8, 4, 4) and c == codes.dual(c)
        return ("rm13-parameters", ok, f"[{c.n},{c.k},{d}] self-dual={c == codes.dual(c)}")
    except Exception as e:  # corrupted fixtures may fail structurally
        return ("rm13-parameters", False, f"{type(e).__name__}: {e}")


def _check_goldens(overrides) -> Check:
    try:
        base = overrides.get("rm13") or codes.reed_muller(1, 3)
        css = codes.css_from_selfdual(base)
        ok = css.distance == 3 and css.benign_dist == 4 and css.m == 1
        return ("css-goldens", ok, f"d={css.distance} benign={css.benign_dist}")
    except Exception as e:
        return ("css-goldens", False, f"{type(e).__name__}: {e}")


def _check_stabilizer_oracle(overrides) -> Check:
    try:
        base = overrides.get("rm13") or codes.reed_muller(1, 3)
        css = codes.css_from_selfdual(base)
        best = None
        for u in css.c2.codewords():
            for v in css.c2.codewords():
                if u == 0 and v == 0:
                    continue
                w = (u | v).bit_count()
                best = w if best is None else min(best, w)
        ok = best == codes.benign_distance(css)
        return ("stabilizer-brute-force", ok, f"oracle={best} shortcut={codes.benign_distance(css)}")
    except Exception as e:
        return ("stabilizer-brute-force", False, f"{type(e).__name__}: {e}")


def _check_round_trip(overrides) -> Check:
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        c = _random_circuit(n, rng)
        p = PauliOp(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
        if conjugate(conjugate(p, c, "forward"), c, "inverse") != p:
            return ("symplectic-round-trip", False, f"failed at n={n}")
    return ("symplectic-round-trip", True, "40 random cases")


def _check_twirl(overrides) -> Check:
    n = 2
    for a in all_paulis(n):
        total = sum(
            (-1) ** sip(a, k) for k in all_paulis(n)
        )
        expect = 4**n if a.is_identity else 0
        if total != expect:
            return ("pauli-twirl-identity", False, f"a={a.label()}")
    return ("pauli-twirl-identity", True, "n=2 exhaustive")


def _check_trap_exact(overrides) -> Check:
    try:
        base = overrides.get("rm13") or codes.reed_muller(1, 3)
        fam = trap_family(codes.css_from_selfdual(base))
        n = fam.n_total
        ex = exact_undetected_prob_trap(fam, PauliOp.single(n, 0, "X"))
        ez = exact_undetected_prob_trap(fam, PauliOp.single(n, 0, "Z"))
        ok = ex.exact_fraction == Fraction(1, 3) and ez.exact_fraction == Fraction(1, 3)
        return ("trap-exact-one-third", ok, f"X:{ex.exact_fraction} Z:{ez.exact_fraction}")
    except Exception as e:
        return ("trap-exact-one-third", False, f"{type(e).__name__}: {e}")


def _check_classify_partition(overrides) -> Check:
    layout = TagLayout.message_first(3, 1)
    seen = {c: 0 for c in DetectionClass}
    for p in all_paulis(3):
        seen[classify(p, layout)] += 1
    ok = sum(seen.values()) == 4**3 and all(v > 0 for v in seen.values())
    return ("classify-partition", ok, str({k.name: v for k, v in seen.items()}))


def _check_backends(overrides) -> Check:
    names = kernels.available_backends()
    if len(names) < 2:
        return ("kernel-backends", True, f"only {names[0]} available")
    rng = np.random.default_rng(3)
    basis = [int(x) for x in rng.integers(0, 1 << 30, size=12)]
    a = kernels.gray_weight_counts(basis, 30, backend=kernels.get_backend("cython"))
    b = kernels.gray_weight_counts(basis, 30, backend=kernels.get_backend("python"))
    r1 = kernels.sample_symplectic_batch(3, 50, np.random.default_rng(5), backend=kernels.get_backend("cython"))
    r2 = kernels.sample_symplectic_batch(3, 50, np.random.default_rng(5), backend=kernels.get_backend("python"))
    ok = np.array_equal(a, b) and np.array_equal(r1, r2)
    return ("kernel-backends", ok, f"active={kernels.backend_name()}")


def run_selftest(overrides: dict | None = None) -> list[Check]:
    overrides = overrides or {}
    checks = [
        _check_rm_params,
        _check_goldens,
        _check_stabilizer_oracle,
        _check_round_trip,
        _check_twirl,
        _check_trap_exact,
        _check_classify_partition,
        _check_backends,
    ]
    return [fn(overrides) for fn in checks]


def corrupted_fixture(name: str):
    """Deliberately broken fixtures for the negative-path contract."""
    if name == "rm13":
        good = codes.reed_muller(1, 3)
        rows = list(good.rows)
        rows[0] ^= 0b11  # damage the first generator row
        return {"rm13": codes.LinearCode.from_generators(8, rows)}
    raise ValueError(f"unknown fixture {name!r}")
