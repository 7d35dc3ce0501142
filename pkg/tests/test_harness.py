import math
import os
import subprocess
import sys

import numpy as np
import pytest

from robin_wos.geometry import Cube, Ellipsoid, Sphere, contains
from robin_wos.harness import (
    CSV_HEADER, ExperimentConfig, eval_points_circle, eval_points_segment, main, parse_eval, parse_summary,
    run_experiment, summary_line, write_csv,
)
from robin_wos.estimators import EstimateRow
from robin_wos.problems import AbsX, Constant

SMALL = dict(n_paths=300, np=200, dx=2e-3)


def test_circle_points():
    pts = eval_points_circle()
    assert len(pts) == 15
    for p in pts:
        assert abs(np.linalg.norm(p) - 0.6) <= 1e-12
        assert p[2] == pytest.approx(0.6 * math.cos(math.pi / 4), abs=1e-15)
    np.testing.assert_allclose(pts[-1], [-0.42426406871192845, 0, 0.42426406871192845], atol=1e-12)


def test_segment_points():
    pts = eval_points_segment()
    assert len(pts) == 15
    assert pts[0] == (0.4, 0.4, 0.6)
    np.testing.assert_allclose(pts[-1], (0.1, 0.0, 0.0), atol=1e-16)
    np.testing.assert_allclose(pts[7], (0.25, 0.2, 0.3), atol=1e-15)


@pytest.mark.parametrize("d", [Cube(1), Sphere(1), Ellipsoid(3, 2, 1)])
def test_builtin_sets_are_interior(d):
    for p in eval_points_circle() + eval_points_segment():
        assert contains(d, p)


def test_parse_eval():
    assert parse_eval("point:0.1,0.2,0.3")[1] == [(0.1, 0.2, 0.3)]
    assert len(parse_eval("point:0,0,0;0.1,0,0")[1]) == 2
    for bad in ("line", "point:1,2", "point:"):
        with pytest.raises(ValueError):
            parse_eval(bad)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(domain_name="torus")
    with pytest.raises(ValueError):
        ExperimentConfig(n_paths=0)
    with pytest.raises(ValueError):
        ExperimentConfig(dx=-1)


def test_exterior_point_is_rejected(tmp_path):
    cfg = ExperimentConfig(domain_name="cube", eval_set="point:2,0,0", output_path=str(tmp_path / "x.csv"), **SMALL)
    with pytest.raises(ValueError, match="outside"):
        run_experiment(cfg, quiet=True)
    assert not (tmp_path / "x.csv").exists()


def test_csv_layout(tmp_path):
    out = tmp_path / "r.csv"
    cfg = ExperimentConfig(domain_name="sphere", eval_set="segment", output_path=str(out), **SMALL)
    rows, summary = run_experiment(cfg, quiet=True)
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    data = [ln for ln in lines if not ln.startswith("#")]
    assert len(data) == 16
    assert lines[-1].startswith(f"# Err={summary.err!r},N=300,NP=200,dx=0.002,eps=0.006,seed=0")
    for r, ln in zip(rows, data[1:]):
        fields = ln.split(",")
        assert float(fields[4]) == r.estimate  # round-trip precision
        assert int(fields[0]) == r.point_index


def test_round_trip_precision(tmp_path):
    out = tmp_path / "p.csv"
    r = EstimateRow(0, (0.1, 1 / 3, 0.0), 5.0, 0.1, 5.0, 0.0)
    write_csv([r], "# Err=0", str(out))
    assert out.read_text().splitlines()[1].split(",")[4] == "5.0"
    odd = EstimateRow(0, (0.1, 1 / 3, 0.0), 1 / 7, 0.1, 5.0, 0.0)
    write_csv([odd], "# Err=0", str(out))
    assert float(out.read_text().splitlines()[1].split(",")[4]) == 1 / 7


def test_empty_rows_write_nothing(tmp_path):
    out = tmp_path / "e.csv"
    with pytest.raises(ValueError):
        write_csv([], "# Err=0", str(out))
    assert not out.exists()


def test_unwritable_path():
    r = EstimateRow(0, (0, 0, 0), 5.0, 0.1, 5.0, 0.0)
    with pytest.raises(OSError):
        write_csv([r], "# Err=0", "/nonexistent-dir/out.csv")


def test_atomic_replace(tmp_path):
    out = tmp_path / "a.csv"
    out.write_text("old\n")
    write_csv([EstimateRow(0, (0, 0, 0), 5.0, 0.1, 5.0, 0.0)], "# Err=0", str(out))
    assert out.read_text().startswith(CSV_HEADER)
    assert [p.name for p in tmp_path.iterdir()] == ["a.csv"]


@pytest.mark.parametrize("c", [Constant(1.0), AbsX(), Constant(0.25)])
@pytest.mark.parametrize("ev", ["circle", "segment", "point:0.1,0.2,0.3;0,0,0"])
def test_summary_round_trip(c, ev):
    cfg = ExperimentConfig(domain_name="ellipsoid", c_spec=c, n_paths=1234, np=4500, dx=5e-4, eps_mult=4,
                           seed=2 ** 63 + 5, eval_set=ev)
    back = parse_summary(summary_line(0.0242, cfg))
    assert back.flags() == cfg.flags()


def test_cli_runs_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--domain", "ellipsoid", "--c", "absx", "--paths", "400", "--np", "300", "--dx", "2e-3",
            "--eps-mult", "4", "--seed", "11", "--eval", "circle", "--quiet"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "Err=" in capsys.readouterr().out


def test_cli_rejects_bad_input(tmp_path):
    with pytest.raises(SystemExit):
        main(["--domain", "cube", "--eval", "point:2,0,0", "--paths", "10", "--out", str(tmp_path / "x.csv")])
    with pytest.raises(SystemExit):
        main(["--c", "cubic", "--out", str(tmp_path / "x.csv")])


def test_cli_check_modes(tmp_path, capsys):
    out = tmp_path / "d.csv"
    main(["--mode", "dirichlet-check", "--domain", "sphere", "--eval", "point:0.5,0,0", "--paths", "2000",
          "--out", str(out)])
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and float(lines[1].split(",")[6]) == 0.5
    main(["--mode", "skorohod-check", "--paths", "2000", "--dt", "1e-2"])
    assert "mean L(1)=" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "robin_wos", "--paths", "100", "--np", "50", "--dx", "2e-3",
                           "--eval", "point:0.1,0.1,0.1", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and "paths" in proc.stderr
