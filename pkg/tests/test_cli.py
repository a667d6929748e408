"""Command surface: DSL, exit codes, reports, determinism."""

import csv
import json
import math

import numpy as np
import pytest

from seqsum import cli, spaces
from seqsum.spaces import SpecValidationError


def run_cli(argv, capsys):
    code = cli.run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# space DSL


def test_parse_space_lp_variants():
    assert cli.parse_space("lp:2").p == 2.0
    assert math.isinf(cli.parse_space("lp:inf").p)
    assert cli.parse_space("c0").family == "c0"


def test_parse_space_weighted_families():
    lor = cli.parse_space("lorentz:geometric:0.5:p=1")
    assert lor.family == "lorentz" and lor.p == 1.0
    assert np.allclose(lor.weights.materialize(3), [1.0, 0.5, 0.25])
    gm = cli.parse_space("garling_mu:power:1.5:p=2")
    w = gm.weights.materialize(3)
    assert w[0] == 1.0 and w[1] == pytest.approx(2.0 ** -1.5)
    sm = cli.parse_space("sargent_m:sqrt")
    assert np.allclose(sm.weights.materialize(2), [1.0, math.sqrt(2.0)])
    sn = cli.parse_space("sargent_n:power:0.5")
    assert sn.weights.materialize(4)[3] == pytest.approx(2.0)
    const = cli.parse_space("sargent_m:const")
    assert np.allclose(const.weights.materialize(3), [1.0, 1.0, 1.0])


def test_parse_space_rejects_bad_input():
    with pytest.raises(SpecValidationError):
        cli.parse_space("lorentz:bad")
    with pytest.raises(SpecValidationError):
        cli.parse_space("nosuch:1")
    with pytest.raises(SpecValidationError):
        cli.parse_space("lp:0.2")


# ---------------------------------------------------------------------------
# compute commands


def test_norm_command_prints_value(capsys):
    code, out, _ = run_cli(["norm", "--space", "lp:2", "--seq", "[3,4]"], capsys)
    assert code == 0
    assert out.strip() == "5"


def test_norm_command_invalid_space_exit_3(capsys):
    code, _, err = run_cli(["norm", "--space", "lorentz:bad", "--seq", "[1]"],
                           capsys)
    assert code == 3
    assert "lorentz" in err or "invalid" in err


def test_norm_command_malformed_seq_exit_2(capsys):
    code, _, _ = run_cli(["norm", "--space", "lp:2", "--seq", "oops"], capsys)
    assert code == 2


def test_unwritable_report_exit_4(capsys):
    code, _, _ = run_cli(
        ["norm", "--space", "lp:2", "--seq", "[3,4]",
         "--out", "/nonexistent-dir/r.json"], capsys)
    assert code == 4


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["norm", "--space", "lp:2", "--seq", "[1]", "--bogus"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_dual_norm_command(capsys):
    code, out, _ = run_cli(["dual-norm", "--space", "lp:1", "--seq", "[1,-2,3]"],
                           capsys)
    assert code == 0
    assert out.strip() == "3"


def test_space_file_escape_hatch(tmp_path, capsys):
    spec = spaces.lorentz(spaces.WeightSeq(prefix=(1.0,), tail="geometric:0.5"),
                          1.0)
    path = tmp_path / "space.json"
    path.write_text(json.dumps(spec.to_json()))
    code, out, _ = run_cli(["norm", "--space-file", str(path), "--seq", "[1,2]"],
                           capsys)
    assert code == 0
    assert out.strip() == "2.5"


def test_vecnorm_chain_command(capsys):
    code, out, _ = run_cli(
        ["vecnorm", "--kind", "chain", "--space", "lp:2",
         "--vectors", '{"oracle": "l2:2", "vectors": [[3, 4], [0, 1]]}',
         "--restarts", "3", "--iterations", "100"], capsys)
    assert code == 0
    assert "ok=True" in out


def test_summing_command(capsys):
    code, out, _ = run_cli(
        ["summing", "--kind", "pi", "--space", "lp:1",
         "--operator", '{"domain": "l2:1", "codomain": "l2:1", "rows": [[1.0]]}',
         "--n", "2", "--restarts", "2", "--iterations", "60"], capsys)
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-6)


def test_tensor_command(capsys):
    code, out, _ = run_cli(
        ["tensor", "--kind", "injective", "--space", "lp:2",
         "--tensor",
         '{"domain": "l2:2", "codomain": "l2:2", "entries": [[1, 0], [0, 1]]}',
         "--restarts", "2", "--iterations", "60"], capsys)
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-6)


# ---------------------------------------------------------------------------
# reports


def test_report_roundtrip_and_witness(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _, _ = run_cli(
        ["dual-norm", "--space", "lp:2", "--seq", "[3,4]",
         "--out", str(out_path)], capsys)
    assert code == 0
    text = out_path.read_text()
    report = cli.parse_report(text)
    assert cli.parse_report(cli.emit_report(report["results"],
                                            report["config"])) == report
    row = report["results"][0]
    assert set(row) >= {"name", "value", "bound_direction", "converged",
                        "elapsed_ms"}
    # the stored witness reproduces the reported value through the library
    witness = np.array(row["witness"])
    pairing = float(np.sum(np.abs(witness * np.array([3.0, 4.0]))))
    assert pairing == pytest.approx(row["value"], abs=1e-9)


def test_csv_report_drops_witness(tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    code, _, _ = run_cli(
        ["dual-norm", "--space", "lp:2", "--seq", "[3,4]",
         "--format", "csv", "--out", str(out_path)], capsys)
    assert code == 0
    rows = list(csv.reader(out_path.read_text().splitlines()))
    assert rows[0] == ["name", "value", "bound_direction", "converged",
                       "elapsed_ms"]
    assert len(rows) == 2
    assert "witness" not in ",".join(rows[0])


def test_emit_report_rejects_empty():
    with pytest.raises(ValueError):
        cli.emit_report([], {})


# ---------------------------------------------------------------------------
# verify suites


def test_verify_holder_large_trial_count(tmp_path, capsys):
    out_path = tmp_path / "holder.json"
    code, _, _ = run_cli(
        ["verify", "--suite", "holder", "--trials", "1000", "--seed", "7",
         "--out", str(out_path)], capsys)
    assert code == 0
    report = cli.parse_report(out_path.read_text())
    total = [r for r in report["results"] if r["name"] == "holder-violations"]
    assert total and total[0]["value"] == 0.0


def test_verify_chain_suite(capsys):
    code, out, _ = run_cli(["verify", "--suite", "chain", "--trials", "2",
                            "--seed", "3"], capsys)
    assert code == 0
    report = cli.parse_report(out)
    names = [r["name"] for r in report["results"]]
    assert any(n.startswith("chain[") for n in names)
    assert "chain-violations" in names


def test_verify_iteration_suite_flags_scale_families(capsys):
    code, out, _ = run_cli(["verify", "--suite", "iteration", "--trials", "40",
                            "--seed", "3"], capsys)
    # the scale families genuinely fail the row/column exchange, so the
    # suite reports violations and exits 1
    assert code == 1
    report = cli.parse_report(out)
    per_family = {r["name"]: r["value"] for r in report["results"]
                  if r["name"].startswith("iteration[")}
    assert any(v > 1e-9 for v in per_family.values())
    lp_rows = [v for k, v in per_family.items() if "lp(" in k]
    assert all(v <= 1e-9 for v in lp_rows)


def test_verify_determinism_same_argv(tmp_path, capsys):
    argv = ["verify", "--suite", "holder", "--trials", "60", "--seed", "11",
            "--out", str(tmp_path / "r.json")]
    assert cli.run(argv) == 0
    capsys.readouterr()
    first = (tmp_path / "r.json").read_text()
    assert cli.run(argv) == 0
    capsys.readouterr()
    second = (tmp_path / "r.json").read_text()

    def strip(text):
        rep = cli.parse_report(text)
        for row in rep["results"]:
            row.pop("elapsed_ms")
        return rep

    assert strip(first) == strip(second)
