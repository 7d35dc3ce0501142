"""Walk-on-spheres Monte Carlo for the Laplace equation with Robin boundary data."""
from .geometry import (Cube, Domain, Ellipsoid, ShellParams, Sphere, closest_boundary_point, contains,
                       distance_to_boundary, in_shell)
from .problems import AbsX, Coefficient, Constant, ProblemSpec, manufactured_problem
from .stochastic import RngStream, make_stream, uniform_on_sphere
from .wos import PathResult, WalkState, simulate_path, wos_step
from .estimators import EstimateRow, RunConfig, aggregate_error, estimate_dirichlet, estimate_robin

__all__ = [
    "Cube", "Domain", "Ellipsoid", "ShellParams", "Sphere", "closest_boundary_point", "contains",
    "distance_to_boundary", "in_shell", "AbsX", "Coefficient", "Constant", "ProblemSpec",
    "manufactured_problem", "RngStream", "make_stream", "uniform_on_sphere", "PathResult", "WalkState",
    "simulate_path", "wos_step", "EstimateRow", "RunConfig", "aggregate_error", "estimate_dirichlet",
    "estimate_robin",
]
