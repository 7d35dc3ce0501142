import math

import numpy as np
import pytest
from numba import njit

from robin_wos.estimators import (
    EstimateRow, RunConfig, aggregate_error, estimate_dirichlet, estimate_robin, mean_and_stderr,
    robin_contributions,
)
from robin_wos.geometry import Cube, ShellParams, Sphere
from robin_wos.problems import Constant, ProblemSpec, manufactured_problem, zero_f

COARSE = ShellParams(2e-3, 3)


@njit
def phi_x(x, y, z):
    return x


@njit
def phi_seven(x, y, z):
    return 7.0


def row(est, ex):
    return EstimateRow(0, (0, 0, 0), est, 0.0, ex, abs(est - ex) / abs(ex))


def test_aggregate_error_examples():
    assert aggregate_error([row(1.0, 1.0), row(2.0, 2.0)]) == 0
    assert aggregate_error([row(5.5, 5.0)]) == pytest.approx(0.1, abs=1e-15)
    assert aggregate_error([row(1.0, 1.0), row(0.0, 1.0)]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    with pytest.raises(ValueError):
        aggregate_error([EstimateRow(0, (0, 0, 0), 1.0, 0.0, 0.0, math.nan)])
    with pytest.raises(ValueError):
        aggregate_error([])


def test_mean_and_stderr():
    assert mean_and_stderr(np.full(10, 7.0)) == (7.0, 0.0)
    m, se = mean_and_stderr(np.array([1.0, 2.0, 3.0, 4.0]))
    assert m == 2.5 and se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert mean_and_stderr(np.array([3.0])) == (3.0, 0.0)


def test_zero_data_estimates_are_exactly_zero():
    cfg = RunConfig(Sphere(1), COARSE, ProblemSpec(Constant(1), 300, boundary=zero_f), 500, 3,
                    [(0.1, 0.2, 0.3), (0.0, 0.0, 0.0)])
    for r in estimate_robin(cfg):
        assert r.estimate == 0.0 and r.std_err == 0.0


def test_rows_carry_exact_values_and_errors():
    cfg = RunConfig(Cube(1), COARSE, manufactured_problem(Constant(1), 200), 300, 1,
                    [(0.1, 0.2, 0.3), (2.0, 0.0, 0.0)])
    good, bad = estimate_robin(cfg)
    assert good.error is None and good.exact == pytest.approx(5 + math.sin(0.3) * math.sin(0.8) * math.exp(1.5))
    assert good.rel_err == pytest.approx(abs(good.estimate - good.exact) / good.exact)
    assert bad.error and math.isnan(bad.estimate)
    assert aggregate_error([good, bad]) == pytest.approx(good.rel_err)


def test_thread_count_does_not_change_results():
    cfg = RunConfig(Sphere(1), COARSE, manufactured_problem(Constant(1), 300), 25_000, 5, [(0.2, 0.1, 0.0)])
    one = robin_contributions(cfg, cfg.eval_points[0], threads=1)
    many = robin_contributions(cfg, cfg.eval_points[0], threads=4)
    np.testing.assert_array_equal(one, many)
    assert estimate_robin(cfg, threads=1) == estimate_robin(cfg, threads=3)


def test_stderr_scales_like_inverse_root_n():
    cfg = RunConfig(Sphere(1), COARSE, manufactured_problem(Constant(1), 300), 20_000, 0, [(0.2, 0.1, 0.0)])
    vals = robin_contributions(cfg, cfg.eval_points[0])
    small = mean_and_stderr(vals[:5_000])[1]
    big = mean_and_stderr(vals)[1]
    assert 0.8 <= 2 * big / small <= 1.2


def test_dirichlet_examples():
    d = Sphere(1)
    center = estimate_dirichlet(d, phi_x, (0, 0, 0), 20_000, 1e-4, 1, exact=0.0)
    assert abs(center.estimate) <= 3 * center.std_err
    const = estimate_dirichlet(d, phi_seven, (0.3, 0.1, 0), 2_000, 1e-4, 1, exact=7.0)
    assert const.estimate == 7.0 and const.std_err == 0.0
    with pytest.raises(ValueError):
        estimate_dirichlet(d, phi_x, (2, 0, 0), 10, 1e-4, 1)
    with pytest.raises(ValueError):
        estimate_dirichlet(d, phi_x, (0, 0, 0), 10, 0.0, 1)


def test_dirichlet_coverage_over_seeds():
    hits = 0
    trials = 100
    for seed in range(trials):
        r = estimate_dirichlet(Sphere(1), phi_x, (0.5, 0, 0), 4_000, 1e-4, seed, exact=0.5)
        hits += abs(r.estimate - 0.5) <= 3 * r.std_err
    assert hits >= 99


def test_dirichlet_threads_agree():
    a = estimate_dirichlet(Cube(1), phi_x, (0.2, 0.3, 0.1), 30_000, 1e-4, 4, threads=1)
    b = estimate_dirichlet(Cube(1), phi_x, (0.2, 0.3, 0.1), 30_000, 1e-4, 4, threads=5)
    assert a == b
