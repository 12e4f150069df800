import json
import math
from pathlib import Path

import pytest

from spacetime_states.cli import RunConfig, UsageError, main, normalize_pair, parse_complex, run

GOLDEN = Path(__file__).parent / "golden"


def close(a, b, tol=1e-10):
    """Structural equality with numeric tolerance; reals in reports are rounded already."""
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(close(a[k], b[k], tol) for k in a)
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, float) and not isinstance(b, bool) and isinstance(b, (int, float)):
        return abs(a - b) <= tol
    return a == b


def invoke(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGolden:
    @pytest.mark.parametrize("preset", ["epr-unitary", "epr-collapse", "product-control"])
    def test_classify_matches_golden(self, preset, capsys):
        code, out, _ = invoke(["classify", "--preset", preset], capsys)
        assert code == 0
        got = json.loads(out)
        want = json.loads((GOLDEN / f"classify-{preset}.json").read_text())
        assert close(got, want)
        assert got["results"]["witnesses"]

    def test_collapse_witness(self, capsys):
        _, out, _ = invoke(["classify", "--preset", "epr-collapse"], capsys)
        doc = json.loads(out)
        assert doc["results"]["level"] == "Contextuality"
        assert {c["name"]: c["pass"] for c in doc["checks"]} == {"level": True, "s2_witness": True}


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["classify", "--preset", "epr-collapse"],
            ["epr-collapse", "--outcome", "sample", "--seed", "11"],
            ["narratability", "--format", "csv"],
            ["coleman-hepp", "--n", "4", "--format", "text"],
        ],
    )
    def test_byte_identical(self, argv, capsys):
        first = invoke(argv, capsys)
        second = invoke(argv, capsys)
        assert first == second

    def test_schema(self, capsys):
        _, out, _ = invoke(["epr-unitary"], capsys)
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        assert set(doc) == {"checks", "command", "overall_pass", "parameters", "results", "schema_version", "section"}
        assert list(doc) == sorted(doc)


class TestCommands:
    def test_narratability(self, capsys):
        code, out, _ = invoke(["narratability", "--format", "json"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["overall_pass"]
        assert max(doc["results"]["flat_distances"]) < 1e-10
        assert doc["results"]["staircase_distances"][doc["results"]["divergent_surface"]] == pytest.approx(1.0)

    def test_coleman_hepp(self, capsys):
        code, out, _ = invoke(["coleman-hepp", "--n", "5"], capsys)
        doc = json.loads(out)
        assert code == 0
        assert doc["results"]["weights"]["all_up"] == pytest.approx(0.5, abs=1e-10)
        assert doc["results"]["weights"]["all_down"] == pytest.approx(0.5, abs=1e-10)

    def test_coleman_hepp_amplitudes(self, capsys):
        code, out, _ = invoke(["coleman-hepp", "--n", "3", "--a", "0.6", "--b", "0,0.8"], capsys)
        doc = json.loads(out)
        assert code == 0
        assert doc["results"]["weights"]["all_down"] == pytest.approx(0.64, abs=1e-10)

    def test_fock(self, capsys):
        code, out, _ = invoke(["fock-check", "--max-dim", "40"], capsys)
        assert code == 0 and json.loads(out)["overall_pass"]

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "r.json"
        code, out, _ = invoke(["epr-unitary", "-o", str(target)], capsys)
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["command"] == "epr-unitary"

    def test_failed_check_exit_one(self):
        cfg = RunConfig("classify", preset="epr-collapse", theta=0.1)
        code, text = run(cfg)
        assert code == 1
        assert json.loads(text)["results"]["level"] == "Nihilism"


class TestCsv:
    def test_staircase_profile(self, capsys):
        _, out, _ = invoke(["narratability", "--format", "csv"], capsys)
        lines = out.strip().split("\n")
        assert lines[0] == "surface_index,distance"
        values = [float(l.split(",")[1]) for l in lines[1:]]
        assert [k for k, v in enumerate(values) if v > 0.5] == [2]
        assert values[2] == pytest.approx(1.0, abs=1e-10)

    def test_empty_profile(self):
        from spacetime_states.report import emit_csv

        assert emit_csv([]) == "surface_index,distance\n"

    def test_flat_profile(self):
        from spacetime_states.report import emit_csv

        rows = emit_csv([0.0, 0.0, 0.0]).strip().split("\n")[1:]
        assert [r.split(",")[1] for r in rows] == ["0.0"] * 3

    def test_checks_table(self, capsys):
        _, out, _ = invoke(["coleman-hepp", "--n", "3", "--format", "csv"], capsys)
        assert out.startswith("name,distance,pass\n")
        assert all(line.endswith("true") for line in out.strip().split("\n")[1:])


class TestUsage:
    @pytest.mark.parametrize(
        "argv",
        [
            ["epr-unitary", "--alpha", "1,1", "--beta", "1"],
            ["epr-unitary", "--alpha", "0.6"],
            ["epr-unitary", "--alpha", "x", "--beta", "0.8"],
            ["epr-collapse", "--outcome", "2"],
            ["classify", "--preset", "nope"],
            ["coleman-hepp", "--n", "12"],
            ["epr-unitary", "--tolerance", "-1"],
        ],
    )
    def test_exit_two(self, argv, capsys):
        code, out, err = invoke(argv, capsys)
        assert code == 2
        assert out == "" and "error" in err

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == 2

    def test_renormalization_warning(self, capsys):
        code, _, err = invoke(["epr-unitary", "--alpha", "0.6000001", "--beta", "0.8"], capsys)
        assert code == 0 and "renormalized" in err

    def test_env_tolerance(self, monkeypatch, capsys):
        monkeypatch.setenv("SPACETIME_STATES_TOL", "1e-8")
        _, out, _ = invoke(["epr-unitary"], capsys)
        assert json.loads(out)["parameters"]["tolerance"] == 1e-8

    def test_parse_complex(self):
        assert parse_complex("0.5") == 0.5
        assert parse_complex(" 0.1, -0.2 ") == complex(0.1, -0.2)
        with pytest.raises(UsageError):
            parse_complex("1,2,3")

    def test_normalize_pair(self):
        warnings = []
        assert normalize_pair(0.6, 0.8, warnings) == (0.6, 0.8) and not warnings
        x, y = normalize_pair(0.6 + 1e-8, 0.8, warnings)
        assert math.hypot(abs(x), abs(y)) == pytest.approx(1.0, abs=1e-15) and warnings
