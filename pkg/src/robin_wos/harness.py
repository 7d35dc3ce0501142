"""Command-line driver for the cube / sphere / ellipsoid experiments.

    robin-wos --domain sphere --c const:1 --paths 200000 --np 6000 \\
        --dx 5e-4 --eps-mult 3 --eval circle --out sphere_circle.csv

Results go to the CSV file and a one-line summary to stdout; progress
goes to stderr.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .estimators import EstimateRow, RunConfig, aggregate_error, estimate_dirichlet, estimate_robin
from .geometry import Cube, Domain, Ellipsoid, ShellParams, Sphere, contains
from .problems import Coefficient, manufactured_problem, parse_coefficient
from .skorohod import brownian_local_time

DOMAINS = {
    "cube": lambda: Cube(1.0),
    "sphere": lambda: Sphere(1.0),
    "ellipsoid": lambda: Ellipsoid(3.0, 2.0, 1.0),
}
CSV_HEADER = "point_index,x,y,z,estimate,std_err,exact,rel_err"
PROGRESS_EVERY = 10_000


def eval_points_circle() -> list[tuple[float, float, float]]:
    """15 points on the circle of radius 0.6 at polar angle pi/4."""
    r = 0.6
    t2 = math.pi / 4
    pts = []
    for k in range(1, 16):
        t1 = k * 2 * math.pi / 30
        pts.append((r * math.cos(t1) * math.sin(t2), r * math.sin(t1) * math.sin(t2), r * math.cos(t2)))
    return pts


def eval_points_segment() -> list[tuple[float, float, float]]:
    """15 equally spaced points from (0.4, 0.4, 0.6) to (0.1, 0, 0)."""
    a = np.array([0.4, 0.4, 0.6])
    b = np.array([0.1, 0.0, 0.0])
    return [tuple(float(v) for v in a + (i / 14) * (b - a)) for i in range(15)]


def parse_eval(text: str) -> tuple[str, list]:
    """``circle``, ``segment`` or ``point:x,y,z[;x,y,z...]``."""
    if text == "circle":
        return text, eval_points_circle()
    if text == "segment":
        return text, eval_points_segment()
    if text.startswith("point:"):
        pts = []
        for chunk in text[len("point:"):].split(";"):
            vals = [float(v) for v in chunk.split(",")]
            if len(vals) != 3:
                raise ValueError(f"point needs three coordinates, got {chunk!r}")
            pts.append(tuple(vals))
        if not pts:
            raise ValueError("custom eval set needs at least one point")
        return text, pts
    raise ValueError(f"unrecognised eval set {text!r}")


@dataclass
class ExperimentConfig:
    domain_name: str = "sphere"
    c_spec: Coefficient = field(default_factory=lambda: parse_coefficient("const:1"))
    n_paths: int = 200_000
    np: int = 6000
    dx: float = 5e-4
    eps_mult: int = 3
    seed: int = 0
    eval_set: str = "circle"
    output_path: str = "results.csv"
    threads: int = 1
    mode: str = "robin"
    absorb_eps: float = 1e-4

    def __post_init__(self):
        if self.domain_name not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain_name!r}")
        for name in ("n_paths", "np", "eps_mult", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not (self.dx > 0 and self.absorb_eps > 0):
            raise ValueError("dx and absorb_eps must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative 64-bit integer")
        parse_eval(self.eval_set)

    @property
    def domain(self) -> Domain:
        return DOMAINS[self.domain_name]()

    @property
    def shell(self) -> ShellParams:
        return ShellParams(self.dx, self.eps_mult)

    @property
    def eval_points(self) -> list:
        return parse_eval(self.eval_set)[1]

    def flags(self) -> dict:
        return {
            "domain": self.domain_name, "c": str(self.c_spec), "paths": self.n_paths, "np": self.np,
            "dx": repr(self.dx), "eps-mult": self.eps_mult, "seed": self.seed, "eval": self.eval_set,
        }


def validate(cfg: ExperimentConfig) -> None:
    d = cfg.domain
    cfg.shell.check(d)
    bad = [p for p in cfg.eval_points if not contains(d, p)]
    if bad:
        raise ValueError(f"evaluation point(s) outside the {cfg.domain_name}: {bad}")


def _fmt(v: float) -> str:
    return repr(float(v))


def summary_line(err: float, cfg: ExperimentConfig) -> str:
    eps = cfg.eps_mult * cfg.dx
    extra = ",".join(f"{k}={v}" for k, v in cfg.flags().items() if k not in ("paths", "np", "dx", "seed"))
    return (f"# Err={_fmt(err)},N={cfg.n_paths},NP={cfg.np},dx={_fmt(cfg.dx)},eps={_fmt(eps)},"
            f"seed={cfg.seed},{extra}")


def parse_summary(line: str) -> ExperimentConfig:
    """Inverse of :func:`summary_line` (the Err value is ignored)."""
    fields = dict(kv.split("=", 1) for kv in line.lstrip("#").strip().split(",") if "=" in kv)
    # point lists contain commas, so the eval field swallows the tail
    body = line.lstrip("#").strip()
    ev = body[body.index(",eval=") + len(",eval="):]
    return ExperimentConfig(
        domain_name=fields["domain"], c_spec=parse_coefficient(fields["c"]), n_paths=int(fields["N"]),
        np=int(fields["NP"]), dx=float(fields["dx"]), eps_mult=int(fields["eps-mult"]),
        seed=int(fields["seed"]), eval_set=ev,
    )


def write_csv(rows: Sequence[EstimateRow], summary: str, path: str) -> None:
    """Write rows plus the trailing summary comment, replacing ``path`` atomically."""
    if not rows:
        raise ValueError("no rows to write")
    lines = [CSV_HEADER]
    for r in rows:
        x, y, z = r.point
        lines.append(",".join([str(r.point_index), _fmt(x), _fmt(y), _fmt(z), _fmt(r.estimate),
                               _fmt(r.std_err), _fmt(r.exact), _fmt(r.rel_err)]))
    lines.append(summary)
    text = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".robin-wos-", suffix=".csv")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class Summary:
    err: float
    wall_time: float
    paths_per_sec: float

    def __str__(self):
        return f"Err={self.err:.4%} wall={self.wall_time:.1f}s paths/s={self.paths_per_sec:.0f}"


def run_experiment(cfg: ExperimentConfig, quiet: bool = False) -> tuple[list[EstimateRow], Summary]:
    validate(cfg)
    run = RunConfig(cfg.domain, cfg.shell, manufactured_problem(cfg.c_spec, cfg.np),
                    cfg.n_paths, cfg.seed, tuple(cfg.eval_points))
    n_pts = len(run.eval_points)

    def progress(i, done):
        if not quiet and (done % PROGRESS_EVERY == 0 or done == cfg.n_paths):
            print(f"point {i + 1}/{n_pts}: {done}/{cfg.n_paths} paths", file=sys.stderr)

    t0 = time.perf_counter()
    rows = estimate_robin(run, threads=cfg.threads, progress=progress)
    wall = time.perf_counter() - t0
    err = aggregate_error(rows)
    write_csv(rows, summary_line(err, cfg), cfg.output_path)
    return rows, Summary(err, wall, cfg.n_paths * n_pts / wall if wall > 0 else math.inf)


@njit(cache=True)
def _phi_x(x, y, z):
    return x


def run_dirichlet_check(cfg: ExperimentConfig) -> tuple[list[EstimateRow], Summary]:
    """WOS baseline with boundary data phi(p) = p.x, whose harmonic extension is p.x."""
    d = cfg.domain
    pts = cfg.eval_points
    bad = [p for p in pts if not contains(d, p)]
    if bad:
        raise ValueError(f"evaluation point(s) outside the {cfg.domain_name}: {bad}")
    t0 = time.perf_counter()
    rows = [estimate_dirichlet(d, _phi_x, p, cfg.n_paths, cfg.absorb_eps, cfg.seed,
                               exact=p[0], threads=cfg.threads, point_index=i)
            for i, p in enumerate(pts)]
    wall = time.perf_counter() - t0
    diffs = math.sqrt(math.fsum((r.estimate - r.exact) ** 2 for r in rows))
    scale = math.sqrt(math.fsum(r.exact ** 2 for r in rows))
    err = diffs / scale if scale > 0 else diffs
    write_csv(rows, summary_line(err, cfg), cfg.output_path)
    return rows, Summary(err, wall, cfg.n_paths * len(pts) / wall if wall > 0 else math.inf)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robin-wos", description=__doc__.split("\n\n")[0])
    p.add_argument("--domain", choices=sorted(DOMAINS), default="sphere")
    p.add_argument("--c", default="const:1", help="Robin coefficient: const:<gamma> or absx")
    p.add_argument("--paths", type=int, default=200_000, help="number of paths N")
    p.add_argument("--np", type=int, default=6000, help="path length NP (WOS steps)")
    p.add_argument("--dx", type=float, default=5e-4, help="WOS radius inside the eps-shell")
    p.add_argument("--eps-mult", type=int, default=3, help="shell width eps = m * dx")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval", default="circle", help="circle, segment or point:x,y,z[;x,y,z...]")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mode", choices=["robin", "dirichlet-check", "skorohod-check"], default="robin")
    p.add_argument("--absorb-eps", type=float, default=1e-4, help="absorption distance (dirichlet-check)")
    p.add_argument("--dt", type=float, default=1e-3, help="time step (skorohod-check)")
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.mode == "skorohod-check":
        if args.paths < 2 or not args.dt > 0:
            parser.error("skorohod-check needs --paths >= 2 and --dt > 0")
        r = brownian_local_time(args.paths, args.dt, seed=args.seed)
        print(f"mean L(1)={r.mean:.6f} +- {r.std_err:.6f} target={r.target:.6f} z={r.z_score:+.2f} "
              f"max_residual={r.max_residual:.3e} complementarity={r.complementarity_ok} "
              f"monotone={r.monotone_ok}")
        return 0
    try:
        cfg = ExperimentConfig(
            domain_name=args.domain, c_spec=parse_coefficient(args.c), n_paths=args.paths, np=args.np,
            dx=args.dx, eps_mult=args.eps_mult, seed=args.seed, eval_set=args.eval,
            output_path=args.out, threads=args.threads, mode=args.mode, absorb_eps=args.absorb_eps,
        )
        if cfg.mode == "dirichlet-check":
            rows, summary = run_dirichlet_check(cfg)
        else:
            rows, summary = run_experiment(cfg, quiet=args.quiet)
    except ValueError as exc:
        parser.error(str(exc))
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
