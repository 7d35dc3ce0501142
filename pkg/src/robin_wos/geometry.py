"""Exact geometric queries for the three test domains.

The numerical core is a set of ``numba`` functions that take a domain as
``(kind, params)`` so the path kernels can call them without Python
objects.  The dataclasses at the bottom wrap them for interactive use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

CUBE = 0
SPHERE = 1
ELLIPSOID = 2

ELLIPSOID_TOL = 1e-12
ELLIPSOID_MAX_ITER = 200
# coordinates below this are treated as 0 (moves the projection by at most that much)
_TINY = 1e-150


class GeometryError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# numba core
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _contains(kind, prm, x, y, z):
    if kind == CUBE:
        h = prm[0]
        return abs(x) <= h and abs(y) <= h and abs(z) <= h
    if kind == SPHERE:
        return x * x + y * y + z * z <= prm[0] * prm[0]
    u = x / prm[0]
    v = y / prm[1]
    w = z / prm[2]
    return u * u + v * v + w * w <= 1.0


@njit(cache=True, nogil=True)
def _ellipsoid_root(a0, a1, a2, y0, y1, y2, amin, ymin):
    """Root of sum (a_i y_i / (a_i^2 + t))^2 = 1 on t > -amin^2.

    Solved for s = t + amin^2 so the smallest denominator carries no
    cancellation.  Components with y_i == 0 drop out; ``amin`` is the
    smallest semi-axis among the nonzero ones and ``ymin`` the matching
    coordinate.  Returns (s, iterations); iterations < 0 means the cap was
    hit.
    """
    b0 = a0 * y0
    b1 = a1 * y1
    b2 = a2 * y2
    m2 = amin * amin
    e0 = a0 * a0 - m2
    e1 = a1 * a1 - m2
    e2 = a2 * a2 - m2
    lo = amin * ymin
    hi = max(a0 * math.sqrt(y0 * y0 + y1 * y1 + y2 * y2), lo)
    s = lo
    for it in range(ELLIPSOID_MAX_ITER):
        d0 = e0 + s
        d1 = e1 + s
        d2 = e2 + s
        q0 = b0 / d0
        q1 = b1 / d1
        q2 = b2 / d2
        g = q0 * q0 + q1 * q1 + q2 * q2 - 1.0
        if g > 0.0:
            lo = s
        elif g < 0.0:
            hi = s
        else:
            return s, it
        dg = -2.0 * (q0 * q0 / d0 + q1 * q1 / d1 + q2 * q2 / d2)
        sn = s - g / dg
        wide = hi > 4.0 * lo
        if not (lo < sn < hi) or (wide and g > 0.0 and sn < 2.0 * s):
            # out of bracket, or crawling up from far below the root
            sn = math.sqrt(lo) * math.sqrt(hi) if wide else 0.5 * (lo + hi)
        if abs(sn - s) <= ELLIPSOID_TOL * sn:
            return sn, it
        s = sn
    return s, -1


@njit(cache=True, nogil=True)
def _ellipsoid_closest_octant(a0, a1, a2, y0, y1, y2):
    """Nearest surface point for y in the first octant, a0 >= a1 >= a2."""
    if y2 < _TINY:
        y2 = 0.0
    if y1 < _TINY:
        y1 = 0.0
    if y2 > 0.0:
        s, it = _ellipsoid_root(a0, a1, a2, y0, y1, y2, a2, y2)
        m = a2 * a2
        return a0 * a0 * y0 / (a0 * a0 - m + s), a1 * a1 * y1 / (a1 * a1 - m + s), \
            a2 * a2 * y2 / s, it
    # y2 == 0: an interior point may project through the medial disc
    den0 = a0 * a0 - a2 * a2
    den1 = a1 * a1 - a2 * a2
    num0 = a0 * y0
    num1 = a1 * y1
    if den0 > 0.0 and den1 > 0.0 and num0 < den0 and num1 < den1:
        e0 = num0 / den0
        e1 = num1 / den1
        disc = 1.0 - e0 * e0 - e1 * e1
        if disc > 0.0:
            return a0 * e0, a1 * e1, a2 * math.sqrt(disc), 0
    if y1 > 0.0:
        s, it = _ellipsoid_root(a0, a1, a2, y0, y1, 0.0, a1, y1)
        return a0 * a0 * y0 / (a0 * a0 - a1 * a1 + s), a1 * a1 * y1 / s, 0.0, it
    den = a0 * a0 - a1 * a1
    if den > 0.0 and a0 * y0 < den:
        x0 = a0 * a0 * y0 / den
        r = 1.0 - (x0 / a0) ** 2
        return x0, a1 * math.sqrt(max(r, 0.0)), 0.0, 0
    return a0, 0.0, 0.0, 0


@njit(cache=True, nogil=True)
def _closest(kind, prm, x, y, z):
    """Nearest boundary point and outward unit normal.

    Returns (qx, qy, qz, nx, ny, nz, status); status < 0 flags a
    non-converged ellipsoid iteration.
    """
    if kind == CUBE:
        h = prm[0]
        ax = abs(x)
        ay = abs(y)
        az = abs(z)
        # face of maximal penetration, ties broken x -> y -> z
        i = 0
        m = ax
        if ay > m:
            i = 1
            m = ay
        if az > m:
            i = 2
        qx = min(max(x, -h), h)
        qy = min(max(y, -h), h)
        qz = min(max(z, -h), h)
        nx = 0.0
        ny = 0.0
        nz = 0.0
        if i == 0:
            s = 1.0 if x >= 0.0 else -1.0
            qx = s * h
            nx = s
        elif i == 1:
            s = 1.0 if y >= 0.0 else -1.0
            qy = s * h
            ny = s
        else:
            s = 1.0 if z >= 0.0 else -1.0
            qz = s * h
            nz = s
        return qx, qy, qz, nx, ny, nz, 0
    if kind == SPHERE:
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            return 0.0, 0.0, prm[0], 0.0, 0.0, 1.0, 0
        nx = x / r
        ny = y / r
        nz = z / r
        return prm[0] * nx, prm[0] * ny, prm[0] * nz, nx, ny, nz, 0
    a0 = prm[0]
    a1 = prm[1]
    a2 = prm[2]
    q0, q1, q2, it = _ellipsoid_closest_octant(a0, a1, a2, abs(x), abs(y), abs(z))
    if x < 0.0:
        q0 = -q0
    if y < 0.0:
        q1 = -q1
    if z < 0.0:
        q2 = -q2
    g0 = q0 / (a0 * a0)
    g1 = q1 / (a1 * a1)
    g2 = q2 / (a2 * a2)
    gn = math.sqrt(g0 * g0 + g1 * g1 + g2 * g2)
    return q0, q1, q2, g0 / gn, g1 / gn, g2 / gn, (0 if it >= 0 else -1)


@njit(cache=True, nogil=True)
def _distance(kind, prm, x, y, z):
    """Distance from an interior point to the boundary (clamped at 0)."""
    if kind == CUBE:
        h = prm[0]
        return max(h - max(abs(x), max(abs(y), abs(z))), 0.0)
    if kind == SPHERE:
        return max(prm[0] - math.sqrt(x * x + y * y + z * z), 0.0)
    qx, qy, qz, nx, ny, nz, st = _closest(kind, prm, x, y, z)
    dx = x - qx
    dy = y - qy
    dz = z - qz
    return math.sqrt(dx * dx + dy * dy + dz * dz)


# ---------------------------------------------------------------------------
# Python-facing API
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    kind: int
    params: tuple

    @property
    def prm(self) -> np.ndarray:
        return np.asarray(self.params, dtype=np.float64)

    @property
    def inradius(self) -> float:
        return float(min(self.params))

    def boundary_residual(self, q) -> float:
        """How far q is from satisfying the boundary equation."""
        q = np.asarray(q, dtype=float)
        if self.kind == CUBE:
            return abs(np.max(np.abs(q)) - self.params[0])
        if self.kind == SPHERE:
            return abs(np.linalg.norm(q) - self.params[0])
        return abs(float(np.sum((q / self.prm) ** 2)) - 1.0)

    def sample_boundary(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Points on the boundary (not area-uniform for the ellipsoid)."""
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        if self.kind == CUBE:
            return self.params[0] * v / np.max(np.abs(v), axis=1, keepdims=True)
        if self.kind == SPHERE:
            return self.params[0] * v
        return v * self.prm

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points in the domain, by rejection from the bounding box."""
        box = np.broadcast_to(self.prm, 3) if self.kind != CUBE else np.full(3, self.params[0])
        out = []
        count = 0
        while count < n:
            p = rng.uniform(-box, box, size=(2 * n, 3))
            if self.kind == CUBE:
                keep = p
            else:
                keep = p[np.sum((p / box) ** 2, axis=1) <= 1.0]
            out.append(keep)
            count += len(keep)
        return np.concatenate(out)[:n]


def Cube(half_width: float = 1.0) -> Domain:
    if not half_width > 0:
        raise ValueError("cube half_width must be positive")
    return Domain(CUBE, (float(half_width),))


def Sphere(radius: float = 1.0) -> Domain:
    if not radius > 0:
        raise ValueError("sphere radius must be positive")
    return Domain(SPHERE, (float(radius),))


def Ellipsoid(a: float = 3.0, b: float = 2.0, c: float = 1.0) -> Domain:
    if not (a >= b >= c > 0):
        raise ValueError(f"ellipsoid semi-axes must satisfy a >= b >= c > 0, got {(a, b, c)}")
    return Domain(ELLIPSOID, (float(a), float(b), float(c)))


@dataclass(frozen=True)
class ShellParams:
    """Near-boundary stepping: WOS radius dx inside a strip of width eps = m*dx."""
    dx: float
    eps_mult: int = 3

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if int(self.eps_mult) != self.eps_mult or self.eps_mult < 2:
            raise ValueError("eps_mult must be an integer >= 2")

    @property
    def eps(self) -> float:
        return self.eps_mult * self.dx

    def check(self, d: Domain) -> None:
        if not self.eps < d.inradius:
            raise ValueError(f"eps={self.eps} must be below the domain inradius {d.inradius}")


def _xyz(p):
    x, y, z = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValueError(f"non-finite point {p!r}")
    return x, y, z


def contains(d: Domain, p) -> bool:
    return bool(_contains(d.kind, d.prm, *_xyz(p)))


def closest_boundary_point(d: Domain, p) -> tuple[np.ndarray, np.ndarray]:
    """Nearest point q on the boundary and the outward unit normal there."""
    qx, qy, qz, nx, ny, nz, status = _closest(d.kind, d.prm, *_xyz(p))
    if status < 0:
        raise GeometryError(
            f"ellipsoid projection of {tuple(p)} did not converge in {ELLIPSOID_MAX_ITER} iterations"
        )
    return np.array([qx, qy, qz]), np.array([nx, ny, nz])


def distance_to_boundary(d: Domain, p) -> float:
    x, y, z = _xyz(p)
    if not _contains(d.kind, d.prm, x, y, z):
        raise ValueError(f"point {tuple(p)} lies outside the domain")
    if d.kind == ELLIPSOID:
        closest_boundary_point(d, p)  # surfaces convergence failures
    return float(_distance(d.kind, d.prm, x, y, z))


def in_shell(d: Domain, s: ShellParams, p) -> bool:
    return distance_to_boundary(d, p) <= s.eps


@njit(cache=True)
def _batch(kind, prm, pts, q, nrm, dist, status):
    for i in range(pts.shape[0]):
        x = pts[i, 0]
        y = pts[i, 1]
        z = pts[i, 2]
        q[i, 0], q[i, 1], q[i, 2], nrm[i, 0], nrm[i, 1], nrm[i, 2], status[i] = _closest(kind, prm, x, y, z)
        dist[i] = _distance(kind, prm, x, y, z)


def project_many(d: Domain, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closest points, normals and (interior) distances for an (n, 3) array."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n = len(pts)
    q = np.empty((n, 3))
    nrm = np.empty((n, 3))
    dist = np.empty(n)
    status = np.empty(n, dtype=np.int64)
    _batch(d.kind, d.prm, pts, q, nrm, dist, status)
    if np.any(status < 0):
        raise GeometryError(f"{int(np.sum(status < 0))} projections did not converge")
    return q, nrm, dist
