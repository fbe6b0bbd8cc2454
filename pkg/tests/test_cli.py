import json
import subprocess
import sys
from pathlib import Path

import pytest

from dgquot.cli import run_command
from dgquot.config import ConfigError, InvariantViolation, parse_config

ROOT = Path(__file__).resolve().parent.parent
LINE = ROOT / "configs" / "line_point.json"
PLANE = ROOT / "configs" / "plane_point.json"


def run(argv, capsys):
    code = run_command([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, err
    return json.loads(out)


def write_config(tmp_path, **changes):
    cfg = json.loads(LINE.read_text())
    cfg.update(changes)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg, indent=2))
    return p


# ----------------------------------------------------------------- configs


def test_validate_ok(capsys):
    rep = report(["instance", "validate", LINE], capsys)
    assert rep["hilbert"] == {"1": 1, "2": 2, "3": 3, "4": 4}
    assert rep["ring_associative"] and rep["module_associative"]


def test_validate_hilbert_too_large(tmp_path, capsys):
    code, _, err = run(["instance", "validate", write_config(tmp_path, hilbert=[3, 2, 3, 4])], capsys)
    assert code == 1
    assert "hilbert exceeds module dimension at degree 1" in err


def test_validate_hilbert_equal_is_rejected(tmp_path, capsys):
    code, _, err = run(["instance", "validate", write_config(tmp_path, hilbert=[2, 2, 3, 4])], capsys)
    assert code == 1 and "hilbert equals module dimension at degree 1" in err


def test_malformed_json_has_line(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "floor": 1,\n  "ceiling": 2\n  "hilbert": [1, 2]\n}\n')
    code, _, err = run(["instance", "validate", p], capsys)
    assert code == 2 and f"{p}:4:" in err


def test_bad_values_point_at_their_line(tmp_path, capsys):
    p = write_config(tmp_path, hilbert=[1, 2])
    line = next(i for i, row in enumerate(p.read_text().splitlines(), 1) if '"hilbert"' in row)
    code, _, err = run(["instance", "validate", p], capsys)
    assert code == 2 and f":{line}:" in err and "hilbert needs 4 values" in err
    code, _, err = run(["instance", "validate", write_config(tmp_path, colour="red")], capsys)
    assert code == 2 and "unknown key 'colour'" in err
    code, _, err = run(["instance", "validate", tmp_path / "missing.json"], capsys)
    assert code == 2


def test_raw_ring_config():
    text = json.dumps({
        "ring": {"type": "raw", "dims": {"1": 1, "2": 1}, "mult": {"1,1": [[1]]}},
        "module": {"type": "free", "rank": 1},
        "floor": 1, "ceiling": 2, "hilbert": [0, 0],
    })
    inst = parse_config(text).build(strict=True)
    assert inst.ring.dim(2) == 1 and inst.module.dim(2) == 1
    bad = json.dumps({
        "ring": {"type": "raw", "dims": {"1": 1, "2": 1}, "mult": {"1,1": [[1, 0]]}},
        "module": {"type": "free", "rank": 1}, "floor": 1, "ceiling": 2, "hilbert": [0, 0],
    })
    with pytest.raises(ConfigError):
        parse_config(bad).build()


def test_prime_field_config():
    text = LINE.read_text().replace('"rational"', '{"prime": 3}')
    assert parse_config(text).build().field.q == 3
    with pytest.raises(ConfigError):
        parse_config(LINE.read_text().replace('"rational"', '{"prime": 4}')).field


def test_strict_is_only_for_validation():
    text = LINE.read_text().replace("[1, 2, 3, 4]", "[2, 3, 4, 5]").replace("[[1], [0]]", "[[1, 0], [0, 1]]")
    parse_config(text).build()
    with pytest.raises(InvariantViolation):
        parse_config(text).build(strict=True)


# ---------------------------------------------------------------- commands


def test_dgla_build_and_verify(capsys):
    rep = report(["dgla", "build", LINE, "--window", 1, 2], capsys)
    assert rep["dim_L"] == {"1": 12, "2": 6} and rep["delta_squared_zero"]
    rep = report(["dgla", "verify", LINE, "--window", 1, 3], capsys)
    assert rep["passed"]
    assert {"antisymmetry", "jacobi", "d_squared", "leibniz"} <= set(rep["checks"])


def test_mc_commands(tmp_path, capsys):
    rep = report(["mc", "certify", LINE], capsys)
    assert rep["certified"] and rep["is_zero"]
    pt = tmp_path / "pt.json"
    pt.write_text(json.dumps({"element": [
        ["phi/1/2/1.1/0.0.0", 1], ["phi/1/2/1.1/1.1.0", 1], ["psi/1/1/1/1.0", 1],
    ]}))
    rep = report(["mc", "residual", LINE, "--window", 1, 2, "--submodule", pt], capsys)
    assert not rep["is_zero"] and rep["nonzero_components"] == {"psi/2/2/1.1": 2}
    code, out, err = run(["mc", "certify", LINE, "--window", 1, 2, "--submodule", pt], capsys)
    assert code == 1 and "maurer-cartan" in err and json.loads(out)["is_zero"] is False


def test_certify_rejects_non_closed_basis(tmp_path, capsys):
    pt = tmp_path / "sub.json"
    pt.write_text(json.dumps({"basis": {"1": [[1], [0]], "2": [[0, 0], [1, 0], [0, 1]]}}))
    code, _, err = run(["mc", "certify", LINE, "--window", 1, 2, "--submodule", pt], capsys)
    assert code == 1 and "not closed" in err


def test_tangent_commands(capsys):
    rep = report(["tangent", "cohomology", LINE, "--augmented"], capsys)
    assert rep["H"]["0"] == rep["hom_oracle"] == 1 and rep["H0_matches_oracle"]
    rep = report(["tangent", "sweep", LINE, "--t-from", 2, "--t-to", 4, "--depth", 1], capsys)
    assert [r["H"]["0"] for r in rep["rows"]] == [1, 1, 1]
    assert rep["N"]["0"] == 2 and rep["oracle_agrees"]


def test_cdga_emit_and_check(tmp_path, capsys):
    out = tmp_path / "w13.cdga.json"
    rep = report(["cdga", "emit", LINE, "--window", 1, 3, "--cdga-out", out, "--check"], capsys)
    assert rep["d_squared_zero"] and rep["round_trip_identical"]
    rep = report(["cdga", "check", out, "--config", LINE], capsys)
    assert rep["d_squared_zero"] and "instance_matches_config" not in rep
    # corrupt one quadratic coefficient
    doc = json.loads(out.read_text())
    for gid, terms in doc["differential"]:
        quad = [t for t in terms if len(t[0]) == 2]
        if quad:
            quad[0][1] = str(-int(quad[0][1]))
            break
    bad = tmp_path / "bad.cdga.json"
    bad.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    code, _, err = run(["cdga", "check", bad], capsys)
    assert code == 1 and "d^2" in err


def test_quot_commands(capsys):
    rep = report(["quot", "find-b", LINE, "--q", 2], capsys)
    assert rep["b"] == 1
    rep = report(["quot", "compare", LINE, "--q", 2, "--window", 1, 3], capsys)
    assert rep["V"] == rep["X"] == rep["geometric"] == 3
    rep = report(["quot", "invariants", LINE, "--window", 1, 3], capsys)
    assert rep["rank_bound_holds"] and rep["geometric"] and rep["nesting_independent"]
    rep = report(["quot", "action-check", LINE, "--window", 1, 3, "--pairs", 3, "--samples", 5], capsys)
    assert rep["right_action_law"] and rep["coordinates_invariant"]
    rep = report(["quot", "propagation", LINE, "--q", 2, "--window", 1, 3, "--samples", 200, "--twists", 20], capsys)
    assert rep["counterexamples_total"] == 0
    code, _, err = run(["quot", "find-b", LINE], capsys)
    assert code == 2 and "prime field" in err


def test_window_outside_instance(capsys):
    code, _, err = run(["dgla", "build", LINE, "--window", 1, 9], capsys)
    assert code == 2 and "outside" in err


def test_report_to_file_and_console_script(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "dgquot.cli", "dgla", "build", str(LINE), "--window", "1", "2", "-o", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["dim_L"]["1"] == 12


def test_usage_error_exit_code(capsys):
    code, _, _ = run(["dgla", "explode", LINE], capsys)
    assert code == 2


def test_commands_leave_the_config_untouched(tmp_path, capsys):
    p = write_config(tmp_path)
    before = p.read_bytes()
    for argv in (["instance", "validate", p], ["mc", "certify", p, "--window", 1, 2], ["quot", "compare", p, "--q", 2, "--window", 1, 2]):
        assert run(argv, capsys)[0] == 0
    assert p.read_bytes() == before
