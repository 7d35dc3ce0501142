import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robin_wos.skorohod import Path1D, SkorohodSolution, brownian_local_time, pathwise_residual, solve_halfline


def grid(values):
    return Path1D(np.arange(len(values), dtype=float), np.asarray(values, dtype=float))


def test_nonnegative_path_is_not_reflected():
    f = grid([0, 1, 2, 3])
    sol = solve_halfline(f)
    np.testing.assert_array_equal(sol.xi, f.values)
    np.testing.assert_array_equal(sol.ell, 0)


def test_hand_example():
    sol = solve_halfline(grid([0, -1, 1]))
    np.testing.assert_array_equal(sol.xi, [0, 0, 2])
    np.testing.assert_array_equal(sol.ell, [0, 2, 2])


def test_negative_start_is_rejected():
    with pytest.raises(ValueError):
        solve_halfline(grid([-0.1, 1.0]))


def test_path_validation():
    with pytest.raises(ValueError):
        Path1D(np.array([0.0, 1.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        Path1D(np.array([0.0, 1.0]), np.zeros(3))


def test_residual_examples():
    f = grid([0, -1, 1, -3, 0.5])
    sol = solve_halfline(f)
    assert pathwise_residual(f, sol) <= 1e-12
    bumped = sol.ell.copy()
    bumped[-1] += 1
    assert pathwise_residual(f, SkorohodSolution(sol.xi, bumped)) == 0.5
    z = grid([0, 0, 0])
    assert pathwise_residual(z, SkorohodSolution(np.zeros(3), np.zeros(3))) == 0
    with pytest.raises(ValueError):
        pathwise_residual(z, SkorohodSolution(np.zeros(2), np.zeros(3)))


paths = st.lists(st.floats(-10, 10), min_size=1, max_size=60).map(lambda v: [abs(v[0])] + v[1:])


@settings(max_examples=300, deadline=None)
@given(paths)
def test_solution_properties(values):
    f = grid(values)
    sol = solve_halfline(f)
    assert np.min(sol.xi) >= 0
    dl = np.diff(sol.ell)
    assert np.all(dl >= 0)
    assert np.all(sol.xi[1:][dl > 0] <= 1e-12)
    assert pathwise_residual(f, sol) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=40), st.floats(0.01, 5))
def test_shift_invariance(values, a):
    f = grid(np.asarray(values) + a)
    sol = solve_halfline(f)
    np.testing.assert_array_equal(sol.xi, f.values)
    np.testing.assert_array_equal(sol.ell, 0)


def test_local_time_converges_with_grid():
    # E L(1) on a grid of step dt is 2 (sqrt(2/pi) - beta sqrt(dt)) + o(sqrt dt),
    # beta = -zeta(1/2) / sqrt(2 pi)
    beta = -float(mpmath.zeta(0.5)) / math.sqrt(2 * math.pi)
    for dt, n in ((1e-2, 100_000), (1e-3, 40_000)):
        r = brownian_local_time(n, dt, seed=9)
        discrete = 2 * (math.sqrt(2 / math.pi) - beta * math.sqrt(dt))
        assert abs(r.mean - discrete) <= 4 * r.std_err
        assert r.max_residual <= 1e-12 and r.complementarity_ok and r.monotone_ok
    fine = brownian_local_time(10_000, 1e-4, seed=10)
    assert abs(fine.mean - fine.target) <= 2 * 2 * beta * math.sqrt(1e-4) + 4 * fine.std_err
