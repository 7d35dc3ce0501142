"""Reflecting Brownian paths by walk on spheres, with boundary local time.

Away from the boundary a step jumps to a uniform point on the largest
ball inside the domain.  Inside the eps-strip the radius is fixed at dx,
or 2*dx when the boundary is closer than dx; such steps add 1 or 4 to the
occupation counter n.  A 2*dx step that leaves the domain is pulled back
to the nearest boundary point and scored there with

    exp(sum_k c(x_k) dL_k) * f(x_j) * dL_j,   dL_j = (n_j - n_{j-1}) dx^2 / (3 eps)

where j, k run over boundary hits.  Step j of a path always consumes draw
j of its stream, so a path is a pure function of (inputs, seed, stream id).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from numba import njit

from .geometry import Domain, ShellParams, _closest, _contains, _distance, contains, GeometryError
from .problems import Coefficient, ProblemSpec, c_value
from .stochastic import RngStream, _u64, sphere_direction

INTERIOR = 0
SHELL_MOVE = 1
BOUNDARY_HIT = 2


@njit(cache=True, nogil=True)
def _move(kind, prm, dx, eps, seed, sid, j, x, y, z):
    """One WOS move from (x, y, z) using draw j.

    Returns (x, y, z, outcome, dn, nx, ny, nz, status); the normal is only
    meaningful for a boundary hit.
    """
    d = _distance(kind, prm, x, y, z)
    ux, uy, uz = sphere_direction(seed, sid, np.uint64(j))
    if d > eps:
        px = x + d * ux
        py = y + d * uy
        pz = z + d * uz
        if not _contains(kind, prm, px, py, pz):
            # rounding on the tangent point; not a boundary visit
            px, py, pz, nx, ny, nz, st = _closest(kind, prm, px, py, pz)
            return px, py, pz, INTERIOR, 0, nx, ny, nz, st
        return px, py, pz, INTERIOR, 0, 0.0, 0.0, 0.0, 0
    if d >= dx:
        r = dx
        dn = 1
    else:
        r = 2.0 * dx
        dn = 4
    px = x + r * ux
    py = y + r * uy
    pz = z + r * uz
    if _contains(kind, prm, px, py, pz):
        return px, py, pz, SHELL_MOVE, dn, 0.0, 0.0, 0.0, 0
    qx, qy, qz, nx, ny, nz, st = _closest(kind, prm, px, py, pz)
    return qx, qy, qz, BOUNDARY_HIT, dn, nx, ny, nz, st


@njit(cache=True, nogil=True)
def _robin_paths(kind, prm, dx, eps, ckind, gamma, fb, n_steps, sx, sy, sz,
                 seed, s_lo, s_hi, contrib, hits, ncount, final):
    """Run streams s_lo..s_hi-1 from (sx, sy, sz); fill per-path outputs.

    Returns a negative status if any geometry query failed.
    """
    quantum = dx * dx / (3.0 * eps)
    status = 0
    for sid in range(s_lo, s_hi):
        x = sx
        y = sy
        z = sz
        n = 0
        n_last = 0
        cexp = 0.0
        acc = 0.0
        h = 0
        usid = np.uint64(sid)
        for j in range(n_steps):
            x, y, z, oc, dn, nx, ny, nz, st = _move(kind, prm, dx, eps, seed, usid, j, x, y, z)
            if st < 0:
                status = st
            n += dn
            if oc == BOUNDARY_HIT:
                dl = (n - n_last) * quantum
                n_last = n
                cv = c_value(ckind, gamma, x, y, z)
                cexp += cv * dl
                acc += math.exp(cexp) * fb(x, y, z, nx, ny, nz, cv) * dl
                h += 1
        contrib[sid - s_lo] = acc
        hits[sid - s_lo] = h
        ncount[sid - s_lo] = n
        final[sid - s_lo, 0] = x
        final[sid - s_lo, 1] = y
        final[sid - s_lo, 2] = z
    return status


@njit(cache=True, nogil=True)
def _trace(kind, prm, dx, eps, seed, sid, n_steps, sx, sy, sz, outcome, dn_log, pos):
    x = sx
    y = sy
    z = sz
    status = 0
    for j in range(n_steps):
        x, y, z, oc, dn, nx, ny, nz, st = _move(kind, prm, dx, eps, seed, sid, j, x, y, z)
        if st < 0:
            status = st
        outcome[j] = oc
        dn_log[j] = dn
        pos[j, 0] = x
        pos[j, 1] = y
        pos[j, 2] = z
    return status


# ---------------------------------------------------------------------------
# step-level API
# ---------------------------------------------------------------------------

class RadiusClass(Enum):
    DX = 1
    TWO_DX = 4


@dataclass(frozen=True)
class WalkState:
    pos: tuple
    n_counter: int = 0
    c_exponent: float = 0.0
    steps_taken: int = 0
    boundary_hits: int = 0
    n_at_last_hit: int = 0

    @classmethod
    def start(cls, p) -> "WalkState":
        return cls(pos=tuple(float(v) for v in p))


@dataclass(frozen=True)
class StepOutcome:
    kind: int  # INTERIOR, SHELL_MOVE or BOUNDARY_HIT
    dn: int = 0
    radius_class: RadiusClass | None = None
    hit_point: tuple | None = None
    normal: tuple | None = None
    dL: float = 0.0
    term: float = 0.0


def interior_radius(d: Domain, s: ShellParams, p) -> float:
    dist = float(_distance(d.kind, d.prm, *map(float, p)))
    if dist <= s.eps:
        raise ValueError(f"point {tuple(p)} is inside the eps-shell; use shell_radius")
    return dist


def shell_radius(d: Domain, s: ShellParams, p) -> RadiusClass:
    dist = float(_distance(d.kind, d.prm, *map(float, p)))
    if dist > s.eps:
        raise ValueError(f"point {tuple(p)} is not inside the eps-shell")
    return RadiusClass.DX if dist >= s.dx else RadiusClass.TWO_DX


def local_time_increment(dn: int, s: ShellParams) -> float:
    if dn < 0:
        raise ValueError("dn must be nonnegative")
    return dn * (s.dx * s.dx / (3.0 * s.eps))


def wos_step(d: Domain, s: ShellParams, st: WalkState, rng: RngStream,
             c: Coefficient, boundary=None) -> tuple[WalkState, StepOutcome]:
    """Advance one path by one WOS step (draw index = ``st.steps_taken``).

    ``rng`` supplies the seed and stream id; its position is set past the
    consumed draw.  With ``boundary`` data the outcome also carries the
    scored term of a boundary hit.
    """
    x, y, z = st.pos
    res = _move(d.kind, d.prm, s.dx, s.eps, _u64(rng.base_seed), _u64(rng.stream_id),
                st.steps_taken, x, y, z)
    px, py, pz, oc, dn, nx, ny, nz, status = res
    if status < 0:
        raise GeometryError(f"boundary projection failed near {(px, py, pz)}")
    rng.position = st.steps_taken + 1
    pos = (float(px), float(py), float(pz))
    n = st.n_counter + int(dn)
    rc = None if dn == 0 else RadiusClass(int(dn))
    if oc != BOUNDARY_HIT:
        new = replace(st, pos=pos, n_counter=n, steps_taken=st.steps_taken + 1)
        return new, StepOutcome(int(oc), int(dn), rc)
    quantum = s.dx * s.dx / (3.0 * s.eps)
    dl = (n - st.n_at_last_hit) * quantum
    cv = float(c_value(c.kind, c.gamma, *pos))
    cexp = st.c_exponent + cv * dl
    term = 0.0
    if boundary is not None:
        term = math.exp(cexp) * boundary(*pos, float(nx), float(ny), float(nz), cv) * dl
    new = WalkState(pos=pos, n_counter=n, c_exponent=cexp, steps_taken=st.steps_taken + 1,
                    boundary_hits=st.boundary_hits + 1, n_at_last_hit=n)
    return new, StepOutcome(BOUNDARY_HIT, int(dn), rc, pos, (float(nx), float(ny), float(nz)), dl, term)


@dataclass(frozen=True)
class PathResult:
    contribution: float
    boundary_hits: int
    final_n: int
    final_pos: tuple = ()


def _check_start(d: Domain, start) -> tuple[float, float, float]:
    if not contains(d, start):
        raise ValueError(f"start point {tuple(start)} lies outside the domain")
    return tuple(float(v) for v in start)


def run_paths(d: Domain, s: ShellParams, prob: ProblemSpec, start, base_seed: int,
              first: int, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-path contribution, boundary hits, final counter and final position."""
    sx, sy, sz = _check_start(d, start)
    contrib = np.empty(count)
    hits = np.empty(count, dtype=np.int64)
    ncount = np.empty(count, dtype=np.int64)
    final = np.empty((count, 3))
    status = _robin_paths(d.kind, d.prm, s.dx, s.eps, prob.c.kind, prob.c.gamma, prob.boundary,
                          int(prob.np), sx, sy, sz, _u64(base_seed), int(first), int(first + count),
                          contrib, hits, ncount, final)
    if status < 0:
        raise GeometryError("boundary projection failed during path simulation")
    return contrib, hits, ncount, final


def simulate_path(d: Domain, s: ShellParams, prob: ProblemSpec, np_steps: int,
                  rng: RngStream, start) -> PathResult:
    """One full path of ``np_steps`` WOS steps on stream ``rng``."""
    if np_steps < 1:
        raise ValueError("np must be >= 1")
    prob = replace(prob, np=int(np_steps))
    contrib, hits, ncount, final = run_paths(d, s, prob, start, rng.base_seed, rng.stream_id, 1)
    rng.position = int(np_steps)
    return PathResult(float(contrib[0]), int(hits[0]), int(ncount[0]), tuple(final[0]))


def trace_path(d: Domain, s: ShellParams, np_steps: int, rng: RngStream, start):
    """Per-step log of one path: outcome codes, counter increments, positions."""
    sx, sy, sz = _check_start(d, start)
    outcome = np.empty(np_steps, dtype=np.int8)
    dn = np.empty(np_steps, dtype=np.int8)
    pos = np.empty((np_steps, 3))
    status = _trace(d.kind, d.prm, s.dx, s.eps, _u64(rng.base_seed), _u64(rng.stream_id),
                    int(np_steps), sx, sy, sz, outcome, dn, pos)
    if status < 0:
        raise GeometryError("boundary projection failed during path trace")
    rng.position = int(np_steps)
    return outcome, dn, pos
