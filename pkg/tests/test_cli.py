import json

import pytest

from qecauth import cli
from qecauth.errors import ConfigError
from qecauth.symplectic import PauliOp


def run_to_file(tmp_path, args, name="report.json"):
    out = tmp_path / name
    code = cli.run(args + ["--output", str(out), "--no-timestamp"])
    return code, out


class TestBuildAndAnalyze:
    def test_build_code(self, tmp_path):
        code, out = run_to_file(tmp_path, ["build-code", "--family", "rm-css", "--index", "1"])
        assert code == 0
        rep = json.loads(out.read_text())
        r = rep["results"]
        assert (r["family"], r["n"], r["m"], r["d"], r["benign_d"]) == ("rm-css", 7, 1, 3, 4)
        assert len(r["generator_rows_hex"]) == 4

    def test_analyze_code_spec_example(self, tmp_path):
        code, out = run_to_file(tmp_path, ["analyze-code", "--family", "rm-css", "--index", "1"])
        assert code == 0
        r = json.loads(out.read_text())["results"]
        assert (r["n"], r["m"], r["d"], r["benign_d"], r["f_X"]) == (7, 1, 3, 4, 0.2)

    def test_resolve_by_n(self, tmp_path):
        code, out = run_to_file(tmp_path, ["build-code", "--family", "rm-css", "--n", "7"])
        assert code == 0
        assert json.loads(out.read_text())["results"]["index"] == 1

    def test_bad_n(self, tmp_path):
        code = cli.run(["build-code", "--family", "rm-css", "--n", "9"])
        assert code == 2


class TestSweepCommand:
    def test_json_report(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            ["sweep-epsilon", "--family", "strong-trap", "--index", "1",
             "--max-weight", "2", "--keys", "1000", "--seed", "7"],
        )
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["results"]["spt_max"]["value"] == 0.0
        assert rep["seed"] == 7
        assert rep["family"]["kind"] == "strong-trap"

    def test_csv_contract(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            ["sweep-epsilon", "--family", "trap", "--n", "7", "--max-weight", "1",
             "--keys", "500", "--format", "csv"],
            name="sweep.csv",
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "family,class_x,class_y,class_z,flavor,estimate,ci_low,ci_high,bound,n_keys,seed"
        assert len(lines) == 1 + 2 * 3  # 3 weight-1 classes x 2 flavors

    def test_clifford_random_paulis(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            ["sweep-epsilon", "--family", "clifford", "--m", "1", "--t", "4",
             "--random-paulis", "5", "--max-weight", "0", "--keys", "800"],
        )
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["results"]["bound"]["value"] == 2**-4

    def test_worker_invariance_byte_identical(self, tmp_path):
        args = ["sweep-epsilon", "--family", "trap", "--index", "1", "--max-weight", "2",
                "--keys", "400", "--seed", "3"]
        _, out1 = run_to_file(tmp_path, args + ["--workers", "1"], name="w1.json")
        _, out2 = run_to_file(tmp_path, args + ["--workers", "3"], name="w3.json")
        assert out1.read_bytes() == out2.read_bytes()


class TestOtherCommands:
    def test_leakage(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            ["leakage", "--family", "trap", "--index", "1", "--attack", "X:0",
             "--condition", "accept", "--position", "0", "--keys", "4000"],
        )
        assert code == 0
        r = json.loads(out.read_text())["results"]["leakage"]
        assert r["tv_distance"] == pytest.approx(2 / 3)
        assert r["posterior"]["plus-trap"] == 1.0

    def test_leakage_no_event_exit_1(self, tmp_path):
        code = cli.run(
            ["leakage", "--family", "strong-trap", "--index", "1", "--attack", "X:0",
             "--condition", "accept", "--keys", "500"]
        )
        assert code == 1

    def test_probe_attack(self, tmp_path):
        code, out = run_to_file(tmp_path, ["probe-attack", "--family", "trap", "--n", "7", "--seed", "1"])
        assert code == 0
        r = json.loads(out.read_text())["results"]
        assert r["forgery_verdict"] == "ACCEPTED_FORGED"
        assert r["block_map_accuracy"] == 1.0

    def test_parallel_reuse(self, tmp_path):
        code, out = run_to_file(
            tmp_path,
            ["parallel-reuse", "--family", "strong-trap", "--index", "1",
             "--strategy", "single-probe", "--trials", "300", "--seed", "2"],
        )
        assert code == 0
        r = json.loads(out.read_text())["results"]
        assert r["p_forge_second"] == 0.0

    def test_selftest_passes(self, tmp_path, capsys):
        code = cli.run(["selftest", "--no-timestamp"])
        captured = capsys.readouterr()
        assert code == 0
        assert "[FAIL]" not in captured.out

    def test_selftest_corrupted_fixture_named_failure(self, capsys):
        code = cli.run(["selftest", "--corrupt-fixture", "rm13", "--no-timestamp"])
        captured = capsys.readouterr()
        assert code == 1
        assert "[FAIL] rm13-parameters" in captured.out

    def test_selftest_deterministic_summary(self, capsys):
        cli.run(["selftest", "--no-timestamp"])
        first = capsys.readouterr().out
        cli.run(["selftest", "--no-timestamp"])
        second = capsys.readouterr().out
        assert first == second


class TestContracts:
    def test_unknown_flag_exit_2(self):
        assert cli.run(["build-code", "--family", "rm-css", "--index", "1", "--bogus"]) == 2

    def test_unknown_family_exit_2(self):
        assert cli.run(["sweep-epsilon", "--family", "nope", "--keys", "10"]) == 2

    def test_report_determinism(self, tmp_path):
        args = ["analyze-code", "--family", "rm-css", "--index", "1"]
        _, out1 = run_to_file(tmp_path, args, name="a.json")
        _, out2 = run_to_file(tmp_path, args, name="b.json")
        assert out1.read_bytes() == out2.read_bytes()

    def test_timestamp_present_by_default(self, tmp_path, capsys):
        out = tmp_path / "t.json"
        assert cli.run(["build-code", "--family", "rm-css", "--index", "1", "--output", str(out)]) == 0
        assert "timestamp" in json.loads(out.read_text())

    def test_schema_validation_all_reports(self, tmp_path):
        schema = cli.load_report_schema()
        for args, name in [
            (["build-code", "--family", "rm-css", "--index", "1"], "a.json"),
            (["probe-attack", "--family", "trap", "--n", "7"], "b.json"),
            (["sweep-epsilon", "--family", "trap", "--n", "7", "--max-weight", "1", "--keys", "200"], "c.json"),
        ]:
            _, out = run_to_file(tmp_path, args, name=name)
            cli.validate_report(json.loads(out.read_text()), schema)

    def test_schema_rejects_bad_report(self):
        schema = cli.load_report_schema()
        with pytest.raises(ValueError):
            cli.validate_report({"schema_version": "1"}, schema)
        good = {
            "schema_version": "1",
            "command": "build-code",
            "seed": 0,
            "shards": 1,
            "library_version": "x",
            "backend": "python",
            "config": {},
            "results": {},
        }
        cli.validate_report(good, schema)
        bad = dict(good, command="bogus")
        with pytest.raises(ValueError):
            cli.validate_report(bad, schema)


class TestExperimentSpecAndEnv:
    def test_config_file_overrides_flags(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"keys": 700, "seed": 9, "max_weight": 1}))
        out = tmp_path / "r.json"
        code = cli.run(
            ["sweep-epsilon", "--family", "trap", "--index", "1", "--keys", "5",
             "--config", str(spec), "--output", str(out), "--no-timestamp"]
        )
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["results"]["n_keys"] == 700
        assert rep["seed"] == 9

    def test_config_unknown_key_exit_2(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"bogus_knob": 3}))
        code = cli.run(
            ["sweep-epsilon", "--family", "trap", "--index", "1", "--config", str(spec)]
        )
        assert code == 2

    def test_config_unreadable_exit_2(self, tmp_path):
        code = cli.run(
            ["sweep-epsilon", "--family", "trap", "--index", "1",
             "--config", str(tmp_path / "missing.json")]
        )
        assert code == 2

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QECAUTH_OUTPUT_DIR", str(tmp_path / "reports"))
        code = cli.run(
            ["build-code", "--family", "rm-css", "--index", "1",
             "--output", "code.json", "--no-timestamp"]
        )
        assert code == 0
        assert (tmp_path / "reports" / "code.json").exists()

    def test_output_dir_env_ignores_absolute(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QECAUTH_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        target = tmp_path / "direct.json"
        code = cli.run(
            ["build-code", "--family", "rm-css", "--index", "1",
             "--output", str(target), "--no-timestamp"]
        )
        assert code == 0
        assert target.exists()


class TestAttackParsing:
    def test_component_list(self):
        p = cli.parse_attack("X:0,Z:5", 21)
        assert p == PauliOp(21, 1, 1 << 5)

    def test_full_label(self):
        p = cli.parse_attack("XIZ", 3)
        assert p.label() == "XIZ"

    def test_y_component(self):
        p = cli.parse_attack("Y:2", 4)
        assert p.kind_at(2) == "Y"

    def test_malformed(self):
        for bad in ["X:99", "Q:0", "X-3", "XI"]:
            with pytest.raises(ConfigError):
                cli.parse_attack(bad, 3)
