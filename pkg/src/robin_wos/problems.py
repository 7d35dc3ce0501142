"""The manufactured Robin test problem.

Exact solution ``u = sin(3x) sin(4y) exp(5z) + 5`` is harmonic because
3^2 + 4^2 = 5^2.  Boundary data ``f = du/dn - c u`` is derived from it, so
estimates can be checked against ``u`` directly.

Boundary data are numba functions ``f(x, y, z, nx, ny, nz, c)`` taking the
hit point, the outward normal and the Robin coefficient there; the path
kernels call them directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

CONSTANT = 0
ABS_X = 1


@dataclass(frozen=True)
class Coefficient:
    kind: int
    gamma: float = 0.0

    def __str__(self):
        return f"const:{self.gamma!r}" if self.kind == CONSTANT else "absx"

    def __call__(self, p) -> float:
        return c_eval(self, p)


def Constant(gamma: float) -> Coefficient:
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return Coefficient(CONSTANT, gamma)


def AbsX() -> Coefficient:
    return Coefficient(ABS_X)


def parse_coefficient(text: str) -> Coefficient:
    """``const:<gamma>`` or ``absx``."""
    text = text.strip()
    if text == "absx":
        return AbsX()
    if text.startswith("const:"):
        return Constant(float(text[len("const:"):]))
    raise ValueError(f"unrecognised coefficient {text!r}; use const:<gamma> or absx")


@njit(cache=True, nogil=True)
def c_value(kind, gamma, x, y, z):
    if kind == ABS_X:
        return abs(x)
    return gamma


def c_eval(c: Coefficient, p) -> float:
    return float(c_value(c.kind, c.gamma, float(p[0]), float(p[1]), float(p[2])))


@njit(cache=True, nogil=True)
def exact_u_xyz(x, y, z):
    return math.sin(3.0 * x) * math.sin(4.0 * y) * math.exp(5.0 * z) + 5.0


@njit(cache=True, nogil=True)
def manufactured_f(x, y, z, nx, ny, nz, c):
    """Robin data du/dn - c u of the exact solution."""
    s3 = math.sin(3.0 * x)
    s4 = math.sin(4.0 * y)
    e5 = math.exp(5.0 * z)
    gx = 3.0 * math.cos(3.0 * x) * s4 * e5
    gy = 4.0 * s3 * math.cos(4.0 * y) * e5
    gz = 5.0 * s3 * s4 * e5
    return nx * gx + ny * gy + nz * gz - c * (s3 * s4 * e5 + 5.0)


@njit(cache=True, nogil=True)
def zero_f(x, y, z, nx, ny, nz, c):
    return 0.0


def exact_u(p) -> float:
    return float(exact_u_xyz(float(p[0]), float(p[1]), float(p[2])))


def exact_grad_u(p) -> np.ndarray:
    x, y, z = (float(v) for v in p)
    e5 = math.exp(5 * z)
    return np.array([
        3 * math.cos(3 * x) * math.sin(4 * y) * e5,
        4 * math.sin(3 * x) * math.cos(4 * y) * e5,
        5 * math.sin(3 * x) * math.sin(4 * y) * e5,
    ])


def boundary_f(p, n, c: Coefficient) -> float:
    return float(manufactured_f(float(p[0]), float(p[1]), float(p[2]),
                                float(n[0]), float(n[1]), float(n[2]), c_eval(c, p)))


@dataclass(frozen=True)
class ProblemSpec:
    """Robin coefficient, boundary data kernel, reference solution and truncation length."""
    c: Coefficient
    np: int
    boundary: Callable = manufactured_f
    exact: Callable = exact_u

    def __post_init__(self):
        if int(self.np) < 1:
            raise ValueError("np (path length) must be >= 1")

    def f(self, p, n) -> float:
        return float(self.boundary(float(p[0]), float(p[1]), float(p[2]),
                                   float(n[0]), float(n[1]), float(n[2]), c_eval(self.c, p)))


def manufactured_problem(c: Coefficient, np_steps: int) -> ProblemSpec:
    return ProblemSpec(c=c, np=int(np_steps))
