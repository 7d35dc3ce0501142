"""Rerun the reference cube / sphere / ellipsoid experiments.

    python3 scripts/reference_runs.py --outdir runs --threads 8
    python3 scripts/reference_runs.py --only sphere --paths 20000

Each configuration writes one CSV via the harness; a table of measured
vs reported Err is printed at the end.  Full size (N = 2e5 for all 14
runs) takes many hours on one core.
"""
import argparse
import os
import sys
from dataclasses import dataclass

from robin_wos.harness import ExperimentConfig, run_experiment
from robin_wos.problems import parse_coefficient


@dataclass(frozen=True)
class Run:
    tag: str
    domain: str
    c: str
    eval_set: str
    np: int
    dx: float
    eps_mult: int
    reported_err: float


RUNS = [
    Run("cube-circle-m3", "cube", "const:1", "circle", 13_500, 5e-4, 3, 0.0959),
    Run("cube-circle-m4", "cube", "const:1", "circle", 16_000, 5e-4, 4, 0.0884),
    Run("cube-segment-m3", "cube", "const:1", "segment", 14_300, 5e-4, 3, 0.0550),
    Run("cube-segment-m4", "cube", "const:1", "segment", 17_000, 5e-4, 4, 0.0649),
    Run("sphere-circle", "sphere", "const:1", "circle", 6_000, 5e-4, 3, 0.0396),
    Run("sphere-segment", "sphere", "const:1", "segment", 5_500, 5e-4, 3, 0.0124),
    Run("ellipsoid-circle", "ellipsoid", "const:1", "circle", 4_500, 5e-4, 3, 0.0242),
    Run("ellipsoid-segment", "ellipsoid", "const:1", "segment", 4_500, 5e-4, 3, 0.0244),
    Run("cube-absx-circle", "cube", "absx", "circle", 16_000, 5e-4, 3, 0.0635),
    Run("cube-absx-segment", "cube", "absx", "segment", 14_800, 5e-4, 3, 0.0666),
    Run("sphere-absx-circle", "sphere", "absx", "circle", 6_500, 4e-4, 3, 0.0674),
    Run("sphere-absx-segment", "sphere", "absx", "segment", 6_000, 4e-4, 3, 0.0310),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--outdir", default="runs")
    p.add_argument("--paths", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=2015)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--only", default="", help="substring filter on the run tag")
    args = p.parse_args(argv)

    os.makedirs(args.outdir, exist_ok=True)
    results = []
    for fig in RUNS:
        if args.only not in fig.tag:
            continue
        cfg = ExperimentConfig(domain_name=fig.domain, c_spec=parse_coefficient(fig.c), n_paths=args.paths,
                               np=fig.np, dx=fig.dx, eps_mult=fig.eps_mult, seed=args.seed,
                               eval_set=fig.eval_set, output_path=os.path.join(args.outdir, fig.tag + ".csv"),
                               threads=args.threads)
        print(f"{fig.tag}: N={args.paths} NP={fig.np} dx={fig.dx} eps={fig.eps_mult}dx", file=sys.stderr)
        _, summary = run_experiment(cfg, quiet=True)
        print(f"  {summary}", file=sys.stderr)
        results.append((fig, summary))

    print(f"{'run':<22}{'Err':>10}{'reported':>10}{'wall [s]':>10}")
    for fig, s in results:
        print(f"{fig.tag:<22}{s.err:>10.2%}{fig.reported_err:>10.2%}{s.wall_time:>10.0f}")


if __name__ == "__main__":
    main()
