"""Boundary-error profiles, parameter sweeps and convergence studies."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Sequence, Tuple

import logfire
import numpy as np
from scipy import stats

from .exceptions import ProblemError
from .fieldgrid import cell_centres
from .placement import boundary_points, half_edge_fractions, place_samples, recommended_rate
from .solver import Problem, Solution, Superposition, evaluate, solve

logger = logging.getLogger(__name__)

__all__ = [
    "ConvergenceStudy",
    "ErrorProfile",
    "ShadowTrace",
    "SweepGrid",
    "SweepRow",
    "SweepTable",
    "SWEEP_PARAMETERS",
    "convergence_study",
    "error_profile",
    "recommended_rate",
    "shadow_trace",
    "superposition_defect",
    "sweep",
    "sweep_grid",
    "with_parameter",
]

CORNER_ZONE = 0.1
PROFILE_POINTS = 64

_INT_PARAMETERS = {"poles_per_corner", "samples_per_corner_side", "newman_order", "runge_degree"}
_SMALLEST_VALUE = {"poles_per_corner": 1, "samples_per_corner_side": 2, "newman_order": 1, "runge_degree": 0}


def _apply_param(name: str) -> Callable[[Problem, float], Problem]:
    return lambda problem, value: problem.with_params(**{name: _coerce(name, value)})


def _apply_basis(name: str) -> Callable[[Problem, float], Problem]:
    return lambda problem, value: problem.with_basis(**{name: _coerce(name, value)})


def _coerce(name: str, value):
    number = float(value)
    if name not in _INT_PARAMETERS:
        if not (math.isfinite(number) and number > 0):
            raise ProblemError(f"{name} needs positive values, got {value}")
        return number
    if not number.is_integer():
        raise ProblemError(f"{name} needs integer values, got {value}")
    if number < _SMALLEST_VALUE[name]:
        raise ProblemError(f"{name} needs values of at least {_SMALLEST_VALUE[name]}, got {value}")
    return int(number)


SWEEP_PARAMETERS: Dict[str, Callable[[Problem, float], Problem]] = {
    "pole_rate": _apply_param("pole_rate"),
    "poles_per_corner": _apply_param("poles_per_corner"),
    "samples_per_corner_side": _apply_param("samples_per_corner_side"),
    "sample_exponent": _apply_param("sample_exponent"),
    "newman_order": _apply_basis("newman_order"),
    "runge_degree": _apply_basis("runge_degree"),
}


def with_parameter(problem: Problem, parameter: str, value) -> Problem:
    try:
        apply = SWEEP_PARAMETERS[parameter]
    except KeyError:
        raise ProblemError(f"unknown sweep parameter {parameter!r}, expected one of {', '.join(SWEEP_PARAMETERS)}") from None
    return apply(problem, value)


@dataclass(frozen=True, eq=False)
class ErrorProfile:
    """Pointwise boundary error ``|u - f|`` on test points laid out between the solve samples.

    Points run edge by edge, so with ``n`` points per half-edge and nothing filtered the
    corners sit at indices 0, 2n, 4n, ...
    """

    points: np.ndarray
    errors: np.ndarray
    region_index: np.ndarray
    edge_index: np.ndarray
    t: np.ndarray
    corner_zone: np.ndarray
    corner_max: Dict[Tuple[int, int], float]
    edge_interior_max: Dict[Tuple[int, int], float]

    @property
    def max_error(self) -> float:
        return float(self.errors.max()) if len(self.errors) else 0.0

    @property
    def worst_corner(self) -> float:
        return max(self.corner_max.values(), default=0.0)

    @property
    def worst_edge_interior(self) -> float:
        return max(self.edge_interior_max.values(), default=0.0)


def error_profile(solution: Solution, problem: Problem, points_per_half_edge: int = PROFILE_POINTS, offset: float = 0.5) -> ErrorProfile:
    if points_per_half_edge < 8:
        raise ProblemError(f"points_per_half_edge must be at least 8, got {points_per_half_edge}")
    if not 0 < offset < 1:
        raise ProblemError(f"offset must lie in (0, 1), got {offset}")
    params = problem.params
    scene = problem.scene

    fractions = half_edge_fractions(points_per_half_edge, params.sample_exponent, params.sample_rate_const, params.sample_distribution, offset)
    points, regions, edges, t, _ = boundary_points(scene, fractions)
    training = place_samples(scene, params.samples_per_corner_side, params.sample_exponent, params.sample_rate_const, params.sample_distribution)
    fresh = ~np.isin(points, training.locations)
    points, regions, edges, t = points[fresh], regions[fresh], edges[fresh], t[fresh]

    errors = np.abs(evaluate(solution, points) - problem.boundary_data(points))

    zone = 0.5 * CORNER_ZONE
    near_start = t < zone
    near_end = t > 1.0 - zone
    corner_zone = near_start | near_end

    corner_max: Dict[Tuple[int, int], float] = {}
    edge_interior_max: Dict[Tuple[int, int], float] = {}
    for r, region in enumerate(scene.regions):
        m = len(region)
        for k in range(m):
            on_edge = (regions == r) & (edges == k)
            previous = (regions == r) & (edges == (k - 1) % m)
            at_corner = (on_edge & near_start) | (previous & near_end)
            corner_max[(r, k)] = float(errors[at_corner].max()) if at_corner.any() else 0.0
            middle = on_edge & ~corner_zone
            edge_interior_max[(r, k)] = float(errors[middle].max()) if middle.any() else 0.0

    return ErrorProfile(
        points=points,
        errors=errors,
        region_index=regions,
        edge_index=edges,
        t=t,
        corner_zone=corner_zone,
        corner_max=corner_max,
        edge_interior_max=edge_interior_max,
    )


@dataclass(frozen=True)
class SweepRow:
    parameter: str
    value: float
    max_error: float
    residual: float
    wall_time: float
    rows: int
    cols: int
    parameter_2: str | None = None
    value_2: float | None = None


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    values: Tuple[float, ...]
    rows: Tuple[SweepRow, ...]

    def best(self) -> SweepRow:
        return min(self.rows, key=lambda row: row.max_error)


@dataclass(frozen=True)
class SweepGrid:
    parameter: str
    values: Tuple[float, ...]
    parameter_2: str
    values_2: Tuple[float, ...]
    rows: Tuple[SweepRow, ...]

    def best_by_a(self) -> Dict[float, float]:
        """For each value of the first parameter, the second-parameter value with the smallest error."""
        best: Dict[float, SweepRow] = {}
        for row in self.rows:
            if row.value not in best or row.max_error < best[row.value].max_error:
                best[row.value] = row
        return {value: row.value_2 for value, row in best.items()}


def _run(problem: Problem, points_per_half_edge: int, label: Dict) -> SweepRow:
    with logfire.span("sweep row {label}", label=label):
        started = time.perf_counter()
        solution = solve(problem)
        profile = error_profile(solution, problem, points_per_half_edge)
        elapsed = time.perf_counter() - started
    names = list(label.items())
    row = SweepRow(
        parameter=names[0][0],
        value=names[0][1],
        max_error=profile.max_error,
        residual=solution.diagnostics.residual,
        wall_time=elapsed,
        rows=solution.diagnostics.rows,
        cols=solution.diagnostics.cols,
        parameter_2=names[1][0] if len(names) > 1 else None,
        value_2=names[1][1] if len(names) > 1 else None,
    )
    logger.info(f"Sweep {label}: max_error={row.max_error:.3e} residual={row.residual:.3e} {row.rows}x{row.cols} in {elapsed:.2f}s")
    return row


def _run_all(jobs: List[Tuple[Problem, Dict]], points_per_half_edge: int, workers: int) -> Tuple[SweepRow, ...]:
    if workers <= 1 or len(jobs) <= 1:
        return tuple(_run(problem, points_per_half_edge, label) for problem, label in jobs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(lambda job: _run(job[0], points_per_half_edge, job[1]), jobs))


def sweep(template: Problem, parameter: str, values: Sequence[float], points_per_half_edge: int = PROFILE_POINTS, workers: int = 1) -> SweepTable:
    """One solve per value with everything else held fixed; rows keep the requested order."""
    values = tuple(float(v) for v in values)
    if not values:
        raise ProblemError("sweep needs at least one value")
    jobs = [(with_parameter(template, parameter, value), {parameter: value}) for value in values]
    return SweepTable(parameter, values, _run_all(jobs, points_per_half_edge, workers))


def sweep_grid(
    template: Problem,
    parameter: str,
    values: Sequence[float],
    parameter_2: str,
    values_2: Sequence[float],
    points_per_half_edge: int = PROFILE_POINTS,
    workers: int = 1,
) -> SweepGrid:
    if parameter == parameter_2:
        raise ProblemError(f"two-parameter sweep needs two different parameters, got {parameter} twice")
    values = tuple(float(v) for v in values)
    values_2 = tuple(float(v) for v in values_2)
    jobs = []
    for a in values:
        outer = with_parameter(template, parameter, a)
        for b in values_2:
            jobs.append((with_parameter(outer, parameter_2, b), {parameter: a, parameter_2: b}))
    return SweepGrid(parameter, values, parameter_2, values_2, _run_all(jobs, points_per_half_edge, workers))


@dataclass(frozen=True)
class ConvergenceStudy:
    pole_counts: Tuple[int, ...]
    sqrt_p: Tuple[float, ...]
    max_errors: Tuple[float, ...]
    log10_errors: Tuple[float, ...]
    slope: float
    intercept: float
    correlation: float


def convergence_study(template: Problem, pole_counts: Sequence[int], points_per_half_edge: int = PROFILE_POINTS, workers: int = 1) -> ConvergenceStudy:
    """Solve at each pole count with the recommended rate and fit log10(error) against sqrt(p)."""
    counts = tuple(int(p) for p in pole_counts)
    if len(counts) < 4:
        raise ProblemError(f"convergence study needs at least 4 pole counts, got {len(counts)}")
    jobs = [(template.with_params(poles_per_corner=p, pole_rate="auto"), {"poles_per_corner": p}) for p in counts]
    rows = _run_all(jobs, points_per_half_edge, workers)

    sqrt_p = tuple(math.sqrt(p) for p in counts)
    errors = tuple(row.max_error for row in rows)
    logs = tuple(math.log10(max(e, np.finfo(float).tiny)) for e in errors)
    fit = stats.linregress(sqrt_p, logs)
    correlation = 0.0 if math.isnan(fit.rvalue) else float(fit.rvalue)
    logger.info(f"Convergence fit: log10(error) = {fit.slope:.4f} sqrt(p) + {fit.intercept:.4f} (r={correlation:.4f})")
    return ConvergenceStudy(counts, sqrt_p, errors, logs, float(fit.slope), float(fit.intercept), correlation)


@dataclass(frozen=True, eq=False)
class ShadowTrace:
    distances: np.ndarray
    points: np.ndarray
    total: np.ndarray


def shadow_trace(solution: Solution, problem: Problem, origin: complex, direction: complex, distances: Sequence[float]) -> ShadowTrace:
    """Total field (incident plus scattered) along the ray ``origin + d * direction``."""
    d = np.asarray(distances, dtype=float)
    unit = complex(direction) / abs(direction)
    points = origin + d * unit
    total = problem.incident(problem.wavenumber, points) + evaluate(solution, points)
    return ShadowTrace(d, points, total)


def superposition_defect(template: Problem, incident_a, incident_b, bounds: Tuple[float, float, float, float], nx: int, ny: int) -> float:
    """``max |u_ab - (u_a + u_b)|`` of the scattered fields over the exterior cells of a grid."""
    points = cell_centres(bounds, nx, ny)
    fields = []
    for incident in (incident_a, incident_b, Superposition((incident_a, incident_b))):
        problem = replace(template, incident=incident)
        fields.append(evaluate(solve(problem), points))
    defect = np.abs(fields[2] - (fields[0] + fields[1]))
    exterior = np.isfinite(defect)
    return float(defect[exterior].max()) if exterior.any() else 0.0
