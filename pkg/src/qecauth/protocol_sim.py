"""End-to-end encode-encrypt experiments with Pauli adversaries.

Plaintexts are tracked as Pauli frames: the classical record of the net
Pauli applied to a ciphertext determines the decryption verdict and the
effective message Pauli exactly, so no state simulation is needed.  The
reject branch yields the bottom symbol (logical = None).

Adversary strategies are deterministic functions of the public verdict
history and a per-trial strategy seed (the classical narrowing of the
side-information register; see docs).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .auth_schemes import (
    AuthFamily,
    FamilyKind,
    Key,
    sample_key,
    sample_key_batch,
    verdict_batch,
)
from .auth_schemes import encoder as _encoder
from .errors import NoEventError
from .seeding import rng_for, shard_sizes
from .symplectic import (
    DetectionClass,
    PauliOp,
    classify,
    conjugate,
    message_component,
)

BLOCK_NAMES = ("data", "zero-trap", "plus-trap")


def input_block(family: AuthFamily, wire: int) -> str:
    """Block name of an input wire for trap-kind families."""
    n = family.inner.n
    return BLOCK_NAMES[wire // n]


def true_block_of_position(family: AuthFamily, key: Key, pos: int) -> str:
    """Block feeding physical position pos under the key's permutation."""
    inv = key.perm.index(pos)
    return input_block(family, inv)


@dataclass(frozen=True)
class DecryptResult:
    verdict: DetectionClass
    logical: str | None  # None models the reject-branch bottom state


@dataclass(frozen=True)
class CiphertextFrame:
    """One ciphertext under Construction-1 semantics, tracked as a frame.

    The verdict and logical frame are functions of (code key, accumulated
    Pauli) alone; the one-time pad is carried but cannot influence them.
    """

    family: AuthFamily
    key: Key
    otp: tuple[int, int] | None
    attack: PauliOp

    @classmethod
    def fresh(cls, family: AuthFamily, key: Key, otp: tuple[int, int] | None = None):
        return cls(family, key, otp, PauliOp.identity(family.n_total))

    def with_attack(self, p: PauliOp) -> "CiphertextFrame":
        return replace(self, attack=self.attack.compose(p))

    def decrypt(self) -> DecryptResult:
        conj = conjugate(self.attack, _encoder(self.family, self.key), "inverse")
        cls = classify(conj, self.family.layout)
        if cls is DetectionClass.REJECTED:
            return DecryptResult(cls, None)
        return DecryptResult(cls, message_component(conj, self.family.layout))


def run_single(family: AuthFamily, attack: PauliOp, n_trials: int, seed: int, shards: int = 1) -> dict:
    """Verdict frequencies of one attack over fresh keys per trial."""
    counts = np.zeros(3, dtype=np.int64)
    for shard, size in enumerate(shard_sizes(n_trials, shards)):
        if size == 0:
            continue
        batch = sample_key_batch(family, size, rng_for(seed, "single", shard))
        v = verdict_batch(family, batch, [attack])[:, 0]
        counts += np.bincount(v, minlength=3)
    return {
        "p_reject": float(counts[DetectionClass.REJECTED] / n_trials),
        "p_accept_identity": float(counts[DetectionClass.ACCEPTED_IDENTITY] / n_trials),
        "p_accept_forged": float(counts[DetectionClass.ACCEPTED_FORGED] / n_trials),
        "n_trials": n_trials,
    }


# ---------------------------------------------------------------------------
# Key leakage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeakageReport:
    attack: dict
    condition: str
    statistic: str
    prior: tuple[float, float, float]
    posterior: tuple[float, float, float]
    tv_distance: float
    n_conditioned: int
    n_keys: int
    seed: int

    def to_json(self) -> dict:
        return {
            "attack": self.attack,
            "condition": self.condition,
            "statistic": self.statistic,
            "prior": dict(zip(BLOCK_NAMES, self.prior)),
            "posterior": dict(zip(BLOCK_NAMES, self.posterior)),
            "tv_distance": self.tv_distance,
            "n_conditioned": self.n_conditioned,
            "n_keys": self.n_keys,
            "seed": self.seed,
        }


def key_posterior(
    family: AuthFamily,
    attack: PauliOp,
    condition: str,
    position: int,
    n_keys: int,
    seed: int,
    shards: int = 1,
) -> LeakageReport:
    """Posterior of the block type feeding ``position``, conditioned on the verdict.

    condition: "accept" (not rejected) or "reject".  Raises NoEventError when
    the conditioning event never occurs in the sample.
    """
    if family.kind not in (FamilyKind.TRAP, FamilyKind.STRONG_TRAP):
        raise ValueError("block-type statistic applies to trap kinds")
    if condition not in ("accept", "reject"):
        raise ValueError(f"unknown condition {condition!r}")
    n = family.inner.n
    counts = np.zeros(3, dtype=np.int64)
    total = 0
    for shard, size in enumerate(shard_sizes(n_keys, shards)):
        if size == 0:
            continue
        batch = sample_key_batch(family, size, rng_for(seed, "leakage", shard))
        v = verdict_batch(family, batch, [attack])[:, 0]
        selected = v == DetectionClass.REJECTED if condition == "reject" else v != DetectionClass.REJECTED
        wires = np.argmax(batch.perms == position, axis=1)  # inverse permutation at pos
        blocks = wires[selected] // n
        counts += np.bincount(blocks, minlength=3)
        total += int(selected.sum())
    if total == 0:
        raise NoEventError(f"condition {condition!r} never occurred in {n_keys} keys")
    posterior = tuple(float(c) / total for c in counts)
    prior = (1 / 3, 1 / 3, 1 / 3)
    tv = 0.5 * sum(abs(p - q) for p, q in zip(posterior, prior))
    return LeakageReport(
        attack=attack.to_json(),
        condition=condition,
        statistic=f"block_type(position={position})",
        prior=prior,
        posterior=posterior,
        tv_distance=tv,
        n_conditioned=total,
        n_keys=n_keys,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Adaptive probing (one shared code key, fresh one-time pads per ciphertext)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    block_map_accuracy: float
    probes_used: int
    forgery_verdict: DetectionClass
    forgery_logical_action: str | None
    bases: tuple[str, ...]
    seed: int

    def to_json(self) -> dict:
        return {
            "block_map_accuracy": self.block_map_accuracy,
            "probes_used": self.probes_used,
            "forgery_verdict": self.forgery_verdict.name,
            "forgery_logical_action": self.forgery_logical_action,
            "bases": list(self.bases),
            "seed": self.seed,
        }


def _infer_blocks(n_total: int, x_accepted, z_accepted, bases) -> list[str | None]:
    """Probe characterization: X accepted <=> plus trap, Z accepted <=> zero trap.

    With both bases, double rejection pins a data position; with X only,
    non-accepted positions stay ambiguous (None).
    """
    inferred: list[str | None] = []
    for p in range(n_total):
        if "X" in bases and x_accepted[p]:
            inferred.append("plus-trap")
        elif "Z" in bases and z_accepted[p]:
            inferred.append("zero-trap")
        elif "X" in bases and "Z" in bases:
            inferred.append("data")
        else:
            inferred.append(None)
    return inferred


def adaptive_probe(family: AuthFamily, seed: int, bases: tuple[str, ...] = ("X", "Z")) -> ProbeReport:
    """Single-qubit probing against one shared code key, then a forgery.

    Sends one fresh ciphertext per probe (X at every position, then Z),
    observes accept/reject, infers the block map, and submits a forgery
    with X on every inferred data and plus-trap position.
    """
    if family.kind not in (FamilyKind.TRAP, FamilyKind.STRONG_TRAP):
        raise ValueError("adaptive probing targets trap-kind families")
    key = sample_key(family, rng_for(seed, "probe/key"), seed_info=f"probe/key:{seed}")
    n_total = family.n_total
    x_acc = [False] * n_total
    z_acc = [False] * n_total
    probes = 0
    for basis in bases:
        for p in range(n_total):
            frame = CiphertextFrame.fresh(family, key).with_attack(
                PauliOp.single(n_total, p, basis)
            )
            res = frame.decrypt()
            probes += 1
            if basis == "X":
                x_acc[p] = res.verdict is not DetectionClass.REJECTED
            else:
                z_acc[p] = res.verdict is not DetectionClass.REJECTED
    inferred = _infer_blocks(n_total, x_acc, z_acc, bases)
    truth = [true_block_of_position(family, key, p) for p in range(n_total)]
    accuracy = sum(1 for a, b in zip(inferred, truth) if a == b) / n_total
    forge_mask = 0
    for p, kind in enumerate(inferred):
        if kind in ("data", "plus-trap"):
            forge_mask |= 1 << p
    forgery = CiphertextFrame.fresh(family, key).with_attack(PauliOp(n_total, forge_mask, 0))
    res = forgery.decrypt()
    return ProbeReport(
        block_map_accuracy=accuracy,
        probes_used=probes,
        forgery_verdict=res.verdict,
        forgery_logical_action=res.logical,
        bases=tuple(bases),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Parallel key reuse
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdversaryStrategy:
    """Round functions mapping the public verdict history to Pauli moves.

    ``move_fn(round_idx, history, live, family, rng)`` returns a dict
    {ciphertext index -> Pauli to apply}; indices already decrypted are
    ignored.  ``parallel`` fixes how many ciphertexts share the code key.
    """

    name: str
    move_fn: Callable
    parallel: int | None = None

    def default_parallel(self, family: AuthFamily) -> int:
        if self.parallel is not None:
            return self.parallel
        return 2


def identity_strategy() -> AdversaryStrategy:
    return AdversaryStrategy("identity", lambda r, h, live, fam, rng: {})


def single_probe(pos: int, basis: str = "X") -> AdversaryStrategy:
    """Probe ciphertext 0 at pos, then adapt the attack on ciphertext 1."""

    def move(r, history, live, family, rng):
        n = family.n_total
        if r == 0:
            return {0: PauliOp.single(n, pos, basis)}
        target = pos if history[0] else (pos + 1) % n
        return {live[-1]: PauliOp.single(n, target, basis)}

    return AdversaryStrategy(f"single-probe({basis}@{pos})", move)


def random_pauli_strategy(weight: int) -> AdversaryStrategy:
    """Independent uniform weight-w Pauli on every live ciphertext each round."""

    def move(r, history, live, family, rng):
        n = family.n_total
        out = {}
        for idx in live:
            positions = rng.choice(n, size=weight, replace=False)
            xm = zm = 0
            for p in positions:
                kind = int(rng.integers(1, 4))
                if kind & 1:
                    xm |= 1 << int(p)
                if kind & 2:
                    zm |= 1 << int(p)
            out[idx] = PauliOp(n, xm, zm)
        return out

    return AdversaryStrategy(f"random-pauli(w={weight})", move)


def probe_then_forge(family: AuthFamily) -> AdversaryStrategy:
    """The interleaved-decryption break: 3n X-probes, 3n Z-probes, one forgery."""
    n_total = family.n_total

    def move(r, history, live, family_, rng):
        if r < n_total:
            return {r: PauliOp.single(n_total, r, "X")}
        if r < 2 * n_total:
            return {r: PauliOp.single(n_total, r - n_total, "Z")}
        x_acc = history[:n_total]
        z_acc = history[n_total : 2 * n_total]
        inferred = _infer_blocks(n_total, x_acc, z_acc, ("X", "Z"))
        mask = 0
        for p, kind in enumerate(inferred):
            if kind in ("data", "plus-trap"):
                mask |= 1 << p
        return {live[-1]: PauliOp(n_total, mask, 0)}

    return AdversaryStrategy("probe-then-forge", move, parallel=2 * n_total + 1)


def custom_strategy(fn: Callable, name: str = "custom", parallel: int | None = None) -> AdversaryStrategy:
    return AdversaryStrategy(name, fn, parallel)


@dataclass(frozen=True)
class ReuseStats:
    strategy: str
    n_trials: int
    n_parallel: int
    p_forge_second: float
    p_accept_second: float
    forge_count: int
    accept_count: int
    seed: int

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_trials": self.n_trials,
            "n_parallel": self.n_parallel,
            "p_forge_second": self.p_forge_second,
            "p_accept_second": self.p_accept_second,
            "forge_count": self.forge_count,
            "accept_count": self.accept_count,
            "seed": self.seed,
        }


def parallel_reuse(
    family: AuthFamily,
    strategy: AdversaryStrategy,
    n_trials: int,
    seed: int,
    n_parallel: int | None = None,
) -> ReuseStats:
    """Interactive decryption of ciphertexts sharing one code key.

    Per trial: all ciphertexts are encrypted under a single code key with
    independent one-time pads; round r lets the strategy attack every
    still-encrypted ciphertext (seeing the verdict history), then decrypts
    ciphertext r.  Reports forgery/acceptance frequency on the last one.
    """
    P = n_parallel if n_parallel is not None else strategy.default_parallel(family)
    if P < 2:
        raise ValueError("need at least two parallel ciphertexts")
    forge = accept = 0
    for trial in range(n_trials):
        key = sample_key(
            family, rng_for(seed, "reuse/key", trial), seed_info=f"reuse/key:{seed}/{trial}"
        )
        strat_rng = rng_for(seed, "reuse/strategy", trial)
        frames = [CiphertextFrame.fresh(family, key) for _ in range(P)]
        history: list[bool] = []
        last: DecryptResult | None = None
        for r in range(P):
            live = list(range(r, P))
            moves = strategy.move_fn(r, tuple(history), live, family, strat_rng)
            for idx, pauli in moves.items():
                if idx >= r:
                    frames[idx] = frames[idx].with_attack(pauli)
            last = frames[r].decrypt()
            history.append(last.verdict is not DetectionClass.REJECTED)
        assert last is not None
        if last.verdict is DetectionClass.ACCEPTED_FORGED:
            forge += 1
        if last.verdict is not DetectionClass.REJECTED:
            accept += 1
    return ReuseStats(
        strategy=strategy.name,
        n_trials=n_trials,
        n_parallel=P,
        p_forge_second=forge / n_trials,
        p_accept_second=accept / n_trials,
        forge_count=forge,
        accept_count=accept,
        seed=seed,
    )
