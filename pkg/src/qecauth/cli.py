"""Command-line front end: reports, seeding, schema validation.

Every report embeds the family descriptor, seed, shard count, backend and
library version.  Identical configurations produce byte-identical reports
(the timestamp is suppressible with --no-timestamp; the worker count is an
execution detail and never enters the report).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from importlib import resources

from . import __version__, codes, kernels
from .auth_schemes import AuthFamily, clifford_family, strong_trap_family, trap_family
from .errors import ConfigError, GuardRefusal
from .protocol_sim import (
    adaptive_probe,
    identity_strategy,
    key_posterior,
    parallel_reuse,
    probe_then_forge,
    random_pauli_strategy,
    run_single,
    single_probe,
)
from .purity_analysis import epsilon_sweep
from .selftest import corrupted_fixture, run_selftest
from .symplectic import PauliOp

SCHEMA_VERSION = "1"


def load_report_schema() -> dict:
    text = resources.files("qecauth.schemas").joinpath("report-v1.schema.json").read_text()
    return json.loads(text)


def validate_report(obj, schema) -> None:
    """Minimal structural validator for the shipped schema subset."""

    def fail(msg):
        raise ValueError(f"schema violation: {msg}")

    def check(node, spec, path):
        if "const" in spec and node != spec["const"]:
            fail(f"{path}: expected {spec['const']!r}")
        if "enum" in spec and node not in spec["enum"]:
            fail(f"{path}: {node!r} not in enum")
        if "type" in spec:
            types = spec["type"] if isinstance(spec["type"], list) else [spec["type"]]
            table = {
                "object": dict,
                "array": list,
                "string": str,
                "integer": int,
                "number": (int, float),
                "boolean": bool,
                "null": type(None),
            }
            if not any(
                isinstance(node, table[t]) and not (t == "integer" and isinstance(node, bool))
                for t in types
            ):
                fail(f"{path}: type {type(node).__name__} not in {types}")
        for req in spec.get("required", []):
            if not isinstance(node, dict) or req not in node:
                fail(f"{path}: missing required key {req!r}")
        for key, sub in spec.get("properties", {}).items():
            if isinstance(node, dict) and key in node:
                check(node[key], sub, f"{path}.{key}")

    check(obj, schema, "$")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item) and type(obj).__module__ == "numpy":
        return obj.item()
    return obj


def build_report(command, config, family_json, results, seed, shards, with_timestamp):
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": _jsonable(config),
        "family": _jsonable(family_json),
        "results": _jsonable(results),
        "seed": int(seed),
        "shards": int(shards),
        "library_version": __version__,
        "backend": kernels.backend_name(),
    }
    if with_timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    validate_report(report, load_report_schema())
    return report


def resolve_output_path(path):
    """Relative --output paths land under $QECAUTH_OUTPUT_DIR when set."""
    if path is None:
        return None
    base = os.environ.get("QECAUTH_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def emit_json(report, path) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    path = resolve_output_path(path)
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


SWEEP_CSV_COLUMNS = [
    "family",
    "class_x",
    "class_y",
    "class_z",
    "flavor",
    "estimate",
    "ci_low",
    "ci_high",
    "bound",
    "n_keys",
    "seed",
]


def emit_sweep_csv(sweep_report, path) -> None:
    buf = io.StringIO()
    buf.write(",".join(SWEEP_CSV_COLUMNS) + "\n")
    for row in sweep_report.csv_rows():
        buf.write(",".join(str(row[c]) for c in SWEEP_CSV_COLUMNS) + "\n")
    path = resolve_output_path(path)
    if path:
        with open(path, "w") as f:
            f.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------------------
# Family and attack parsing
# ---------------------------------------------------------------------------


def resolve_rm_index(args) -> int:
    index = getattr(args, "index", None)
    n = getattr(args, "n", None)
    if index is None and n is None:
        raise ConfigError("specify the inner code via --index I or --n N")
    if index is None:
        i = 1
        while (1 << (2 * i + 1)) - 1 < n:
            i += 1
        if (1 << (2 * i + 1)) - 1 != n:
            raise ConfigError(f"--n {n} is not of the form 2^(2i+1)-1 (7, 31, ...)")
        index = i
    if index < 1 or index > 2:
        raise ConfigError("family index must be 1 or 2 at desk scale (rank guard)")
    return index


def make_family(args) -> tuple[AuthFamily, dict]:
    name = args.family
    if name in ("trap", "strong-trap"):
        index = resolve_rm_index(args)
        css = codes.rm_css(index)
        fam = trap_family(css) if name == "trap" else strong_trap_family(css)
        meta = dict(fam.to_json())
        meta["inner_index"] = index
        return fam, meta
    if name == "clifford":
        fam = clifford_family(args.m, args.t)
        return fam, fam.to_json()
    raise ConfigError(f"unknown family {name!r} (trap, strong-trap, clifford)")


def parse_attack(spec: str, n: int) -> PauliOp:
    """'X:0,Z:5' style op:position lists, or a full IXYZ label."""
    spec = spec.strip()
    if ":" not in spec:
        if len(spec) != n or any(ch not in "IXYZ" for ch in spec):
            raise ConfigError(f"attack label must be {n} chars over IXYZ")
        return PauliOp.from_label(spec)
    attack = PauliOp.identity(n)
    for part in spec.split(","):
        try:
            kind, pos_text = part.split(":")
            pos = int(pos_text)
        except ValueError as e:
            raise ConfigError(f"malformed attack component {part!r}") from e
        kind = kind.strip().upper()
        if kind not in ("X", "Y", "Z"):
            raise ConfigError(f"attack component kind must be X, Y or Z, got {kind!r}")
        if not 0 <= pos < n:
            raise ConfigError(f"attack position {pos} out of range for n={n}")
        attack = attack.compose(PauliOp.single(n, pos, kind))
    return attack


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_build_code(args) -> int:
    index = resolve_rm_index(args)
    css = codes.rm_css(index)
    report = build_report(
        "build-code",
        {"family": "rm-css", "index": index},
        None,
        css.to_descriptor(index=index),
        args.seed,
        args.shards,
        not args.no_timestamp,
    )
    emit_json(report, args.output)
    return 0


def cmd_analyze_code(args) -> int:
    index = resolve_rm_index(args)
    css = codes.rm_css(index)
    sparsity = codes.sparsity_report(css)
    results = {
        "n": css.n,
        "m": css.m,
        "d": css.distance,
        "benign_d": css.benign_dist,
        "f_X": float(sparsity.f_x),
        "sparsity": sparsity.to_json(),
        "encoder_gates": len(css.encoder.gates),
    }
    report = build_report(
        "analyze-code",
        {"family": "rm-css", "index": index},
        None,
        results,
        args.seed,
        args.shards,
        not args.no_timestamp,
    )
    emit_json(report, args.output)
    return 0


def cmd_sweep_epsilon(args) -> int:
    fam, meta = make_family(args)
    sweep = epsilon_sweep(
        fam,
        max_weight=args.max_weight,
        reps_per_class=args.reps,
        n_keys=args.keys,
        seed=args.seed,
        shards=args.shards,
        random_paulis=args.random_paulis,
        workers=args.workers,
    )
    if args.format == "csv":
        emit_sweep_csv(sweep, args.output)
        return 0
    config = {
        "family": args.family,
        "max_weight": args.max_weight,
        "reps_per_class": args.reps,
        "n_keys": args.keys,
        "random_paulis": args.random_paulis,
    }
    report = build_report(
        "sweep-epsilon", config, meta, sweep.to_json(), args.seed, args.shards, not args.no_timestamp
    )
    emit_json(report, args.output)
    return 0


def cmd_leakage(args) -> int:
    fam, meta = make_family(args)
    attack = parse_attack(args.attack, fam.n_total)
    leak = key_posterior(
        fam, attack, args.condition, args.position, args.keys, args.seed, shards=args.shards
    )
    baseline = run_single(fam, attack, args.keys, args.seed, shards=args.shards)
    results = {"leakage": leak.to_json(), "verdict_frequencies": baseline}
    config = {
        "family": args.family,
        "attack": args.attack,
        "condition": args.condition,
        "position": args.position,
        "n_keys": args.keys,
    }
    report = build_report(
        "leakage", config, meta, results, args.seed, args.shards, not args.no_timestamp
    )
    emit_json(report, args.output)
    return 0


def cmd_probe_attack(args) -> int:
    fam, meta = make_family(args)
    bases = tuple(args.bases)
    rep = adaptive_probe(fam, args.seed, bases=bases)
    config = {"family": args.family, "bases": args.bases}
    report = build_report(
        "probe-attack", config, meta, rep.to_json(), args.seed, args.shards, not args.no_timestamp
    )
    emit_json(report, args.output)
    return 0


def _make_strategy(args, fam):
    name = args.strategy
    if name == "identity":
        return identity_strategy()
    if name == "single-probe":
        return single_probe(args.probe_pos, args.basis)
    if name == "random-pauli":
        return random_pauli_strategy(args.weight)
    if name == "probe-then-forge":
        return probe_then_forge(fam)
    raise ConfigError(f"unknown strategy {name!r}")


def cmd_parallel_reuse(args) -> int:
    fam, meta = make_family(args)
    strategy = _make_strategy(args, fam)
    stats = parallel_reuse(fam, strategy, args.trials, args.seed, n_parallel=args.parallel)
    config = {
        "family": args.family,
        "strategy": args.strategy,
        "n_trials": args.trials,
        "n_parallel": stats.n_parallel,
    }
    report = build_report(
        "parallel-reuse", config, meta, stats.to_json(), args.seed, args.shards, not args.no_timestamp
    )
    emit_json(report, args.output)
    return 0


def cmd_selftest(args) -> int:
    overrides = corrupted_fixture(args.corrupt_fixture) if args.corrupt_fixture else None
    checks = run_selftest(overrides)
    all_pass = all(ok for _, ok, _ in checks)
    for name, ok, detail in checks:
        sys.stdout.write(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}\n")
    results = {
        "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in checks],
        "all_pass": all_pass,
    }
    report = build_report(
        "selftest",
        {"corrupt_fixture": args.corrupt_fixture},
        None,
        results,
        args.seed,
        args.shards,
        not args.no_timestamp,
    )
    if args.output:
        emit_json(report, args.output)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    p.add_argument("--shards", type=int, default=1, help="deterministic key-batch partitioning")
    p.add_argument("--output", "-o", default=None, help="report path (stdout when omitted)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    p.add_argument("--config", default=None, help="JSON experiment spec; keys override flags")


def _add_family(p: argparse.ArgumentParser, kinds: str) -> None:
    p.add_argument("--family", required=True, help=f"one of: {kinds}")
    p.add_argument("--index", type=int, default=None, help="Reed–Muller family index i")
    p.add_argument("--n", type=int, default=None, help="inner block length (7 or 31)")
    p.add_argument("--m", type=int, default=1, help="message qubits (clifford)")
    p.add_argument("--t", type=int, default=6, help="tag qubits (clifford)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qecauth",
        description="Keyed quantum-authentication code families via binary-symplectic Pauli algebra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-code", help="emit the rm-css code descriptor")
    p.add_argument("--family", required=True, choices=["rm-css"])
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_build_code)

    p = sub.add_parser("analyze-code", help="distances and weight-sparsity table")
    p.add_argument("--family", required=True, choices=["rm-css"])
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_analyze_code)

    p = sub.add_parser("sweep-epsilon", help="weight-class sweep of undetected probabilities")
    _add_family(p, "trap | strong-trap | clifford")
    p.add_argument("--max-weight", type=int, default=2)
    p.add_argument("--reps", type=int, default=8, help="representatives per sampled class")
    p.add_argument("--keys", type=int, default=10000)
    p.add_argument("--random-paulis", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="thread workers (no report effect)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(fn=cmd_sweep_epsilon)

    p = sub.add_parser("leakage", help="key-statistic posterior conditioned on a verdict")
    _add_family(p, "trap | strong-trap")
    p.add_argument("--attack", required=True, help="e.g. 'X:0' or 'X:0,Z:5' or a full label")
    p.add_argument("--condition", choices=["accept", "reject"], default="accept")
    p.add_argument("--position", type=int, default=0)
    p.add_argument("--keys", type=int, default=10000)
    _add_common(p)
    p.set_defaults(fn=cmd_leakage)

    p = sub.add_parser("probe-attack", help="adaptive probe-then-forge against one shared key")
    _add_family(p, "trap | strong-trap")
    p.add_argument("--bases", choices=["XZ", "X", "Z"], default="XZ")
    _add_common(p)
    p.set_defaults(fn=cmd_probe_attack)

    p = sub.add_parser("parallel-reuse", help="key reuse across parallel ciphertexts")
    _add_family(p, "trap | strong-trap | clifford")
    p.add_argument(
        "--strategy",
        choices=["identity", "single-probe", "random-pauli", "probe-then-forge"],
        default="identity",
    )
    p.add_argument("--probe-pos", type=int, default=0)
    p.add_argument("--basis", choices=["X", "Y", "Z"], default="X")
    p.add_argument("--weight", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--parallel", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_parallel_reuse)

    p = sub.add_parser("selftest", help="fast invariant suite")
    p.add_argument("--corrupt-fixture", default=None, help="inject a broken fixture (negative path)")
    _add_common(p)
    p.set_defaults(fn=cmd_selftest)

    return parser


def _apply_config_file(args) -> None:
    """Overlay a JSON experiment spec onto the parsed flags (file wins)."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as f:
            spec = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read experiment spec {args.config!r}: {e}") from e
    if not isinstance(spec, dict):
        raise ConfigError("experiment spec must be a JSON object")
    for key, value in spec.items():
        attr = key.replace("-", "_")
        if attr in ("fn", "command", "config") or not hasattr(args, attr):
            raise ConfigError(f"experiment spec key {key!r} is not a parameter of this command")
        setattr(args, attr, value)


def run(argv) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        _apply_config_file(args)
        return args.fn(args)
    except GuardRefusal as e:
        sys.stderr.write(f"refused: {type(e).__name__}: {e}\n")
        return 1
    except ConfigError as e:
        sys.stderr.write(f"invalid configuration: {e}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
