"""Monte Carlo averages over independent paths.

Paths are split into fixed-size chunks that may run on any number of
threads; per-path values land in one array indexed by stream id and are
reduced with ``math.fsum``, so results do not depend on the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .geometry import Domain, ShellParams, _closest, _contains, _distance, contains, GeometryError
from .problems import ProblemSpec
from .stochastic import _u64, sphere_direction
from .wos import run_paths

CHUNK = 10_000
DIRICHLET_MAX_STEPS = 1_000_000


@dataclass(frozen=True)
class EstimateRow:
    point_index: int
    point: tuple
    estimate: float
    std_err: float
    exact: float
    rel_err: float
    error: str | None = None


@dataclass(frozen=True)
class RunConfig:
    domain: Domain
    shell: ShellParams
    problem: ProblemSpec
    n_paths: int
    base_seed: int
    eval_points: Sequence = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")


def mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    """Correctly rounded mean and the standard error of the mean."""
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def _rel_err(estimate: float, exact: float) -> float:
    if exact == 0 or not math.isfinite(exact):
        return math.nan
    return abs(estimate - exact) / abs(exact)


def _chunks(n: int, size: int = CHUNK):
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def _run_chunked(work: Callable[[int, int], None], n: int, threads: int,
                 progress: Callable[[int], None] | None) -> None:
    chunks = _chunks(n)
    if threads <= 1:
        for lo, hi in chunks:
            work(lo, hi)
            if progress:
                progress(hi)
        return
    done = 0
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(work, lo, hi) for lo, hi in chunks]
        for fut, (lo, hi) in zip(futures, chunks):
            fut.result()
            done += hi - lo
            if progress:
                progress(done)


def robin_contributions(cfg: RunConfig, x, threads: int = 1,
                        progress: Callable[[int], None] | None = None) -> np.ndarray:
    """Per-path contributions for one evaluation point, indexed by stream id."""
    out = np.empty(cfg.n_paths)

    def work(lo, hi):
        out[lo:hi] = run_paths(cfg.domain, cfg.shell, cfg.problem, x, cfg.base_seed, lo, hi - lo)[0]

    _run_chunked(work, cfg.n_paths, threads, progress)
    return out


def estimate_robin(cfg: RunConfig, threads: int = 1,
                   progress: Callable[[int, int], None] | None = None) -> list[EstimateRow]:
    """Truncated Robin estimator at every evaluation point.

    A point outside the domain yields a row with ``error`` set and NaN
    values; the remaining points still run.
    """
    cfg.shell.check(cfg.domain)
    rows = []
    for i, p in enumerate(cfg.eval_points):
        p = tuple(float(v) for v in p)
        exact = float(cfg.problem.exact(p))
        if not contains(cfg.domain, p):
            rows.append(EstimateRow(i, p, math.nan, math.nan, exact, math.nan,
                                    error=f"point {p} outside the domain"))
            continue
        cb = (lambda done, i=i: progress(i, done)) if progress else None
        vals = robin_contributions(cfg, p, threads, cb)
        est, se = mean_and_stderr(vals)
        rows.append(EstimateRow(i, p, est, se, exact, _rel_err(est, exact)))
    return rows


def aggregate_error(rows: Sequence[EstimateRow]) -> float:
    """Relative l2 error sqrt(sum (est - exact)^2) / sqrt(sum exact^2)."""
    good = [r for r in rows if r.error is None]
    if not good:
        raise ValueError("no valid rows to aggregate")
    den = math.fsum(r.exact ** 2 for r in good)
    if den == 0:
        raise ValueError("all exact values are zero")
    return math.sqrt(math.fsum((r.estimate - r.exact) ** 2 for r in good) / den)


@njit(cache=True, nogil=True)
def _dirichlet_paths(kind, prm, phi, absorb, sx, sy, sz, seed, s_lo, s_hi, max_steps, out, steps):
    status = 0
    for sid in range(s_lo, s_hi):
        x = sx
        y = sy
        z = sz
        usid = np.uint64(sid)
        j = 0
        d = _distance(kind, prm, x, y, z)
        while d >= absorb and j < max_steps:
            ux, uy, uz = sphere_direction(seed, usid, np.uint64(j))
            x += d * ux
            y += d * uy
            z += d * uz
            j += 1
            if not _contains(kind, prm, x, y, z):
                break
            d = _distance(kind, prm, x, y, z)
        if j >= max_steps:
            status = -2
        qx, qy, qz, nx, ny, nz, st = _closest(kind, prm, x, y, z)
        if st < 0:
            status = st
        out[sid - s_lo] = phi(qx, qy, qz)
        steps[sid - s_lo] = j
    return status


def estimate_dirichlet(d: Domain, phi, x, n_paths: int, absorb_eps: float, base_seed: int,
                       exact: float | None = None, threads: int = 1,
                       point_index: int = 0) -> EstimateRow:
    """Plain WOS for the Dirichlet problem of the Laplacian.

    ``phi`` is a numba function of (x, y, z).  A path stops once it is
    within ``absorb_eps`` of the boundary and scores phi at the nearest
    boundary point.
    """
    if not absorb_eps > 0:
        raise ValueError("absorb_eps must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    x = tuple(float(v) for v in x)
    if not contains(d, x):
        raise ValueError(f"point {x} lies outside the domain")
    vals = np.empty(n_paths)
    steps = np.empty(n_paths, dtype=np.int64)
    failures = []

    def work(lo, hi):
        st = _dirichlet_paths(d.kind, d.prm, phi, float(absorb_eps), *x, _u64(base_seed),
                              lo, hi, DIRICHLET_MAX_STEPS, vals[lo:hi], steps[lo:hi])
        if st < 0:
            failures.append(st)

    _run_chunked(work, n_paths, threads, None)
    if failures:
        raise GeometryError(f"Dirichlet walk failed (status {min(failures)})")
    est, se = mean_and_stderr(vals)
    ex = math.nan if exact is None else float(exact)
    return EstimateRow(point_index, x, est, se, ex, _rel_err(est, ex))
