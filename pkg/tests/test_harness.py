import subprocess
import sys
from pathlib import Path

import pytest

from dgquot.harness import stabilization_table
from dgquot.instance import line_point_instance, plane_point_instance, polynomial_instance

ROOT = Path(__file__).resolve().parent.parent
LINE = ROOT / "configs" / "line_point.json"


def test_sweep_line():
    rep = stabilization_table(line_point_instance(), 0, 2, 6)
    assert [r["H"]["0"] for r in rep["rows"]] == [1] * 5
    assert rep["N"]["0"] == 2 and rep["oracle_agrees"]


def test_sweep_plane():
    rep = stabilization_table(plane_point_instance(), 1, 2, 4)
    assert [r["H"]["0"] for r in rep["rows"]] == [2, 2, 2]
    assert rep["N"]["0"] == 2 and rep["oracle_agrees"]


def test_sweep_zero_hilbert():
    inst = polynomial_instance(2, lambda R, s: 0, 3, point_seed=[[0], [0]])
    rep = stabilization_table(inst, 1, 1, 3)
    assert all(v == 0 for r in rep["rows"] for v in r["H"].values())
    assert rep["N"] == {"0": inst.floor, "1": inst.floor}


def test_sweep_single_row_and_unstable_tail():
    rep = stabilization_table(line_point_instance(), 1, 3, 3)
    assert rep["N"]["0"] == 3
    # without the gauge directions removed, H^0 keeps growing with the window
    rep = stabilization_table(line_point_instance(), 1, 1, 3, augmented=False)
    assert [r["H"]["0"] for r in rep["rows"]] == [2, 6, 15]
    assert rep["N"] == {"0": "not stabilized in range", "1": "not stabilized in range"}


def _cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "dgquot.cli", *map(str, args)], capture_output=True, cwd=cwd, check=True).stdout


@pytest.mark.parametrize("args", [
    ["dgla", "verify", LINE, "--window", 1, 3, "--triples", 50],
    ["quot", "propagation", LINE, "--q", 2, "--window", 1, 3, "--samples", 200, "--twists", 20],
    ["tangent", "sweep", LINE, "--t-from", 2, "--t-to", 4],
])
def test_reports_are_byte_identical(tmp_path, args):
    assert _cli(args, tmp_path) == _cli(args, tmp_path)


def test_cdga_files_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _cli(["cdga", "emit", LINE, "--window", 1, 3, "--cdga-out", a], tmp_path)
    _cli(["cdga", "emit", LINE, "--window", 1, 3, "--cdga-out", b], tmp_path)
    assert a.read_bytes() == b.read_bytes()
