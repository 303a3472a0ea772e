"""Purity-testing and strong-purity-testing error estimation.

Two event flavors for an attack P under key k:

* PT  — the security failure of purity testing: the verdict is
  ACCEPTED_FORGED (accepted and the message Pauli is non-identity).
* SPT — any escape from detection by a non-identity attack: verdict is
  ACCEPTED_FORGED or ACCEPTED_IDENTITY (identity attacks are flagged and
  count zero, matching the definitions' exclusion of the identity).

The true family error is a maximum over all Paulis, far beyond enumeration
at these sizes; ``epsilon_sweep`` exhausts low-weight classes and samples
representatives of heavier ones, so its result is a lower bound on the max
that is compared against the family's theoretical upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import stats

from .auth_schemes import AuthFamily, FamilyKind, KeyBatch, sample_key_batch, verdict_batch
from .codes import sparsity_report
from .errors import NotWeightDetermined
from .seeding import rng_for, shard_sizes
from .symplectic import DetectionClass, PauliOp, weights

CONFIDENCE = 0.99


@dataclass(frozen=True)
class AttackSpec:
    """A concrete Pauli attack, or a weight class to draw representatives from."""

    pauli: PauliOp | None = None
    weight_class: tuple[int, int, int] | None = None

    def __post_init__(self):
        if (self.pauli is None) == (self.weight_class is None):
            raise ValueError("specify exactly one of pauli / weight_class")
        if self.weight_class is not None:
            object.__setattr__(self, "weight_class", tuple(self.weight_class))
            if len(self.weight_class) != 3 or any(w < 0 for w in self.weight_class):
                raise ValueError("weight class is a triple of nonnegative counts")

    @classmethod
    def concrete(cls, p: PauliOp) -> "AttackSpec":
        return cls(pauli=p)

    @classmethod
    def of_weights(cls, x: int, y: int, z: int) -> "AttackSpec":
        return cls(weight_class=(x, y, z))

    @property
    def is_identity_class(self) -> bool:
        if self.pauli is not None:
            return self.pauli.is_identity
        return self.weight_class == (0, 0, 0)

    def validate_for(self, n: int) -> None:
        if self.pauli is not None:
            if self.pauli.n != n:
                raise ValueError(f"attack on {self.pauli.n} qubits, family on {n}")
        elif sum(self.weight_class) > n:
            raise ValueError(f"weights {self.weight_class} exceed {n} qubits")


def clopper_pearson(k: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Exact (conservative) binomial confidence interval.

    Zero and full counts get honest one-sided bounds (0 or 1 on the
    degenerate side).
    """
    if not 0 <= k <= n or n <= 0:
        raise ValueError(f"bad counts k={k}, n={n}")
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


@dataclass(frozen=True)
class BoundInfo:
    formula: str
    value: float

    def to_json(self) -> dict:
        return {"formula": self.formula, "value": self.value}


@dataclass(frozen=True)
class EpsilonEstimate:
    value: float
    ci_low: float
    ci_high: float
    n_samples: int
    mode: str  # "EXACT" | "MONTE_CARLO"
    flavor: str  # "pt" | "spt"
    bound: BoundInfo | None = None
    exact_fraction: Fraction | None = None
    attack_is_identity: bool = False

    def __post_init__(self):
        if not (self.ci_low - 1e-12 <= self.value <= self.ci_high + 1e-12):
            raise ValueError("CI must contain the point estimate")

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low

    def to_json(self) -> dict:
        out = {
            "value": self.value,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_samples": self.n_samples,
            "mode": self.mode,
            "flavor": self.flavor,
        }
        if self.bound is not None:
            out["bound"] = self.bound.to_json()
        if self.exact_fraction is not None:
            out["exact_fraction"] = str(self.exact_fraction)
        if self.attack_is_identity:
            out["attack_is_identity"] = True
        return out


@lru_cache(maxsize=64)
def family_bound(family: AuthFamily, flavor: str) -> BoundInfo | None:
    """The theoretical reference bound applicable to (family, flavor)."""
    if family.kind is FamilyKind.TRAP and flavor == "pt":
        d = family.inner.distance
        return BoundInfo("(2/3)^(d/2)", (2 / 3) ** (d / 2))
    if family.kind is FamilyKind.STRONG_TRAP and flavor == "spt":
        d = family.inner.distance
        f_x = float(sparsity_report(family.inner).f_x)
        return BoundInfo("f_X + (2/3)^d (negligible band)", f_x + (2 / 3) ** d)
    if family.kind is FamilyKind.CLIFFORD and flavor == "spt":
        return BoundInfo("2^(-t)", 2.0 ** (-family.t))
    return None


def _event_counts(family: AuthFamily, batch: KeyBatch, attacks) -> tuple[np.ndarray, np.ndarray]:
    """(pt_counts, spt_counts) per attack over the key batch."""
    v = verdict_batch(family, batch, attacks)
    pt = (v == DetectionClass.ACCEPTED_FORGED).sum(axis=0)
    spt = (v != DetectionClass.REJECTED).sum(axis=0)
    for i, atk in enumerate(attacks):
        if atk.is_identity:
            spt[i] = 0
    return pt.astype(np.int64), spt.astype(np.int64)


def undetected_prob(
    family: AuthFamily,
    attack: PauliOp,
    n_keys: int,
    seed: int,
    flavor: str = "spt",
    shards: int = 1,
) -> EpsilonEstimate:
    """Monte-Carlo undetected-event frequency with exact 99% CI."""
    if flavor not in ("pt", "spt"):
        raise ValueError(f"unknown flavor {flavor!r}")
    count = 0
    for shard, size in enumerate(shard_sizes(n_keys, shards)):
        if size == 0:
            continue
        batch = sample_key_batch(family, size, rng_for(seed, "undetected", shard))
        pt, spt = _event_counts(family, batch, [attack])
        count += int(pt[0] if flavor == "pt" else spt[0])
    lo, hi = clopper_pearson(count, n_keys)
    return EpsilonEstimate(
        value=count / n_keys,
        ci_low=lo,
        ci_high=hi,
        n_samples=n_keys,
        mode="MONTE_CARLO",
        flavor=flavor,
        bound=family_bound(family, flavor),
        attack_is_identity=attack.is_identity,
    )


def exact_undetected_prob_trap(
    family: AuthFamily, attack: PauliOp, flavor: str = "spt"
) -> EpsilonEstimate:
    """Exact undetected probability for weight-determined trap-kind attacks.

    Applicable when every reachable per-block sub-weight is below the inner
    distance, i.e. both part weights |supp(x)| and |supp(z)| are < d: then
    detection inside the coded blocks is certain and acceptance depends only
    on how the permutation assigns the support to blocks (a hypergeometric
    count).  Refuses (NotWeightDetermined) otherwise.
    """
    if family.kind not in (FamilyKind.TRAP, FamilyKind.STRONG_TRAP):
        raise NotWeightDetermined("exact calculator applies to trap kinds only")
    if flavor not in ("pt", "spt"):
        raise ValueError(f"unknown flavor {flavor!r}")
    d = family.inner.distance
    n = family.inner.n
    w = weights(attack)
    if max(w.x_part, w.z_part) >= d:
        raise NotWeightDetermined(
            f"part weights ({w.x_part}, {w.z_part}) reach the distance {d}; "
            "block verdicts are no longer weight-determined"
        )
    if attack.is_identity or flavor == "pt" or family.kind is FamilyKind.STRONG_TRAP:
        # below distance nothing can act on a coded block undetected, so the
        # message is never altered (PT) and the strong trap rejects always
        value = Fraction(0)
    elif w.y > 0:
        # a Y position would have to sit in the |+> block (X invisible) and
        # the |0> block (Z invisible) at once
        value = Fraction(0)
    else:
        value = Fraction(
            math.perm(n, w.x_part) * math.perm(n, w.z_part),
            math.perm(3 * n, w.x_part + w.z_part),
        )
    return EpsilonEstimate(
        value=float(value),
        ci_low=float(value),
        ci_high=float(value),
        n_samples=0,
        mode="EXACT",
        flavor=flavor,
        bound=family_bound(family, flavor),
        exact_fraction=value,
        attack_is_identity=attack.is_identity,
    )


def block_vacancy_bound(n: int, w_x: int) -> Fraction:
    """Pr[the |0>-trap block receives no support] = C(2n,w)/C(3n,w), exact.

    Verifies the inequality chain against (2/3)^w: equality at w = 1, strict
    below for every 2 <= w <= 3n (the detection analysis only needs
    w >= d >= 3, where it is always strict).
    """
    if not 0 <= w_x <= 3 * n:
        raise ValueError(f"w_x={w_x} out of range 0..{3 * n}")
    value = Fraction(math.comb(2 * n, w_x), math.comb(3 * n, w_x))
    if w_x == 1:
        assert value == Fraction(2, 3), "binomial ratio bound violated"
    elif w_x >= 2:
        assert value < Fraction(2, 3) ** w_x, "binomial ratio bound violated"
    return value


# ---------------------------------------------------------------------------
# Weight-class sweep
# ---------------------------------------------------------------------------


def enumerate_weight_class(n: int, x: int, y: int, z: int):
    """All Paulis with the given disjoint X/Y/Z weights (exhaustive classes)."""
    if x + y + z > n:
        raise ValueError("weights exceed qubit count")
    positions = range(n)
    for sx in itertools.combinations(positions, x):
        rest1 = [p for p in positions if p not in sx]
        for sy in itertools.combinations(rest1, y):
            rest2 = [p for p in rest1 if p not in sy]
            for sz in itertools.combinations(rest2, z):
                xm = zm = 0
                for p in sx:
                    xm |= 1 << p
                for p in sy:
                    xm |= 1 << p
                    zm |= 1 << p
                for p in sz:
                    zm |= 1 << p
                yield PauliOp(n, xm, zm)


def sample_weight_class(n: int, x: int, y: int, z: int, rng: np.random.Generator) -> PauliOp:
    """Uniform Pauli with the given weight profile."""
    if x + y + z > n:
        raise ValueError("weights exceed qubit count")
    chosen = rng.choice(n, size=x + y + z, replace=False)
    xm = zm = 0
    for p in chosen[:x]:
        xm |= 1 << int(p)
    for p in chosen[x : x + y]:
        xm |= 1 << int(p)
        zm |= 1 << int(p)
    for p in chosen[x + y :]:
        zm |= 1 << int(p)
    return PauliOp(n, xm, zm)


def sample_random_pauli(n: int, rng: np.random.Generator, nonidentity: bool = True) -> PauliOp:
    while True:
        xm = int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)
        zm = int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)
        if not nonidentity or xm or zm:
            return PauliOp(n, xm, zm)


@dataclass(frozen=True)
class ClassResult:
    x: int
    y: int
    z: int
    n_attacks: int
    exhaustive: bool
    n_keys: int
    pt: EpsilonEstimate
    spt: EpsilonEstimate

    def to_json(self) -> dict:
        return {
            "class": [self.x, self.y, self.z],
            "n_attacks": self.n_attacks,
            "exhaustive": self.exhaustive,
            "n_keys": self.n_keys,
            "pt": self.pt.to_json(),
            "spt": self.spt.to_json(),
        }


@dataclass(frozen=True)
class SweepReport:
    family: dict
    seed: int
    shards: int
    n_keys: int
    classes: tuple[ClassResult, ...]
    pt_max: EpsilonEstimate
    spt_max: EpsilonEstimate
    bound: BoundInfo | None
    bound_flavor: str | None
    bound_ok: bool | None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "seed": self.seed,
            "shards": self.shards,
            "n_keys": self.n_keys,
            "classes": [c.to_json() for c in self.classes],
            "pt_max": self.pt_max.to_json(),
            "spt_max": self.spt_max.to_json(),
            "bound": None if self.bound is None else self.bound.to_json(),
            "bound_flavor": self.bound_flavor,
            "bound_ok": self.bound_ok,
        }

    def csv_rows(self) -> list[dict]:
        rows = []
        for c in self.classes:
            for flavor, est in (("pt", c.pt), ("spt", c.spt)):
                rows.append(
                    {
                        "family": self.family["kind"],
                        "class_x": c.x,
                        "class_y": c.y,
                        "class_z": c.z,
                        "flavor": flavor,
                        "estimate": est.value,
                        "ci_low": est.ci_low,
                        "ci_high": est.ci_high,
                        "bound": "" if est.bound is None else est.bound.value,
                        "n_keys": c.n_keys,
                        "seed": self.seed,
                    }
                )
        return rows


def _estimate_from_counts(
    counts: np.ndarray, n_keys: int, flavor: str, bound: BoundInfo | None
) -> EpsilonEstimate:
    """Max-estimate over a class's attacks with the argmax's CI."""
    best = int(np.argmax(counts))
    k = int(counts[best])
    lo, hi = clopper_pearson(k, n_keys)
    return EpsilonEstimate(
        value=k / n_keys,
        ci_low=lo,
        ci_high=hi,
        n_samples=n_keys,
        mode="MONTE_CARLO",
        flavor=flavor,
        bound=bound,
    )


def epsilon_sweep(
    family: AuthFamily,
    weight_classes=None,
    max_weight: int = 2,
    reps_per_class: int = 8,
    n_keys: int = 10_000,
    seed: int = 0,
    shards: int = 1,
    exhaustive_max_weight: int = 2,
    random_paulis: int = 0,
    workers: int = 1,
) -> SweepReport:
    """Per-class max undetected probability, compared to the family bound.

    Classes of total weight <= exhaustive_max_weight are enumerated in
    full; heavier classes contribute reps_per_class uniform representatives.
    ``random_paulis`` adds that many uniform non-identity attacks, grouped
    per attack (the Clifford-code mode).  Each class draws a fresh key batch
    of n_keys keys, sharded deterministically from the seed, so the report
    depends only on (seed, shards) no matter how many workers run.
    """
    n = family.n_total
    if weight_classes is None:
        weight_classes = [
            (x, y, z)
            for total in range(1, max_weight + 1)
            for x in range(total + 1)
            for y in range(total - x + 1)
            for z in (total - x - y,)
            if x + y + z <= n
        ]
    pt_bound = family_bound(family, "pt")
    spt_bound = family_bound(family, "spt")

    def run_class(task) -> ClassResult:
        ci, xyz, attacks, exhaustive = task
        pt_counts = np.zeros(len(attacks), dtype=np.int64)
        spt_counts = np.zeros(len(attacks), dtype=np.int64)
        for shard, size in enumerate(shard_sizes(n_keys, shards)):
            if size == 0:
                continue
            rng = rng_for(seed, f"sweep/class{ci}", shard)
            batch = sample_key_batch(family, size, rng)
            pt, spt = _event_counts(family, batch, attacks)
            pt_counts += pt
            spt_counts += spt
        return ClassResult(
            x=xyz[0],
            y=xyz[1],
            z=xyz[2],
            n_attacks=len(attacks),
            exhaustive=exhaustive,
            n_keys=n_keys,
            pt=_estimate_from_counts(pt_counts, n_keys, "pt", pt_bound),
            spt=_estimate_from_counts(spt_counts, n_keys, "spt", spt_bound),
        )

    tasks = []
    ci = 0
    for entry in weight_classes:
        if isinstance(entry, PauliOp):
            entry = AttackSpec.concrete(entry)
        elif not isinstance(entry, AttackSpec):
            entry = AttackSpec.of_weights(*entry)
        entry.validate_for(n)
        if entry.is_identity_class:
            continue  # the identity is excluded from the error definitions
        if entry.pauli is not None:
            w = weights(entry.pauli)
            tasks.append((ci, (w.x, w.y, w.z), [entry.pauli], False))
            ci += 1
            continue
        x, y, z = entry.weight_class
        if x + y + z <= exhaustive_max_weight:
            tasks.append((ci, (x, y, z), list(enumerate_weight_class(n, x, y, z)), True))
        else:
            rng = rng_for(seed, f"sweep/reps{ci}")
            reps = [sample_weight_class(n, x, y, z, rng) for _ in range(reps_per_class)]
            tasks.append((ci, (x, y, z), reps, False))
        ci += 1
    rng = rng_for(seed, "sweep/random")
    for _ in range(random_paulis):
        atk = sample_random_pauli(n, rng)
        w = weights(atk)
        tasks.append((ci, (w.x, w.y, w.z), [atk], False))
        ci += 1

    if not tasks:
        raise ValueError("sweep needs at least one non-identity class")
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_class, tasks))
    else:
        results = [run_class(t) for t in tasks]
    pt_max = max((c.pt for c in results), key=lambda e: e.value)
    spt_max = max((c.spt for c in results), key=lambda e: e.value)
    if family.kind is FamilyKind.TRAP:
        bound, bound_flavor, ref = pt_bound, "pt", pt_max
    else:
        bound, bound_flavor, ref = spt_bound, "spt", spt_max
    bound_ok = None
    if bound is not None:
        bound_ok = ref.value <= bound.value + 3 * ref.ci_width
    return SweepReport(
        family=family.to_json(),
        seed=seed,
        shards=shards,
        n_keys=n_keys,
        classes=tuple(results),
        pt_max=pt_max,
        spt_max=spt_max,
        bound=bound,
        bound_flavor=bound_flavor,
        bound_ok=bound_ok,
    )
