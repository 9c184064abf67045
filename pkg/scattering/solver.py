"""Least-squares assembly, solution and evaluation of exterior Helmholtz problems.

The expansion is a sum of outgoing Hankel terms: orders 0..m centred on every pole (the
Newman part) and orders 0..N2 centred on every interior point (the Runge part), all with the
argument shifted to the centre, ``H_n(k|z - c|) * ((z - c)/|z - c|)**n``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Sequence, Tuple

import logfire
import numpy as np
import scipy.linalg
import shapely

from .exceptions import BasisEvaluationError, LeastSquaresError, ProblemError
from .geometry import BOUNDARY_TOLERANCE, Region, Scene, contains
from .placement import DISTRIBUTIONS, PoleSet, SampleSet, place_poles, place_samples, recommended_rate
from .specialfn import MAX_ORDER, hankel1, hankel1_seq

logger = logging.getLogger(__name__)

SINGULAR_DISTANCE = 1e-14
RCOND = 1e-14
EVALUATION_CHUNK = 4096
MODES = ("scattering", "direct")


@dataclass(frozen=True)
class BasisSpec:
    newman_order: int = 1
    runge_degree: int = 20
    include_negative_runge: bool = False

    def __post_init__(self):
        if not 1 <= self.newman_order <= MAX_ORDER:
            raise ProblemError(f"newman_order must lie in [1, {MAX_ORDER}], got {self.newman_order}")
        if not 0 <= self.runge_degree <= MAX_ORDER:
            raise ProblemError(f"runge_degree must lie in [0, {MAX_ORDER}], got {self.runge_degree}")

    @property
    def runge_columns(self) -> int:
        return 2 * self.runge_degree + 1 if self.include_negative_runge else self.runge_degree + 1

    def column_count(self, pole_count: int, interior_count: int) -> int:
        return (self.newman_order + 1) * pole_count + self.runge_columns * interior_count


# Incident fields


@dataclass(frozen=True)
class PlaneWave:
    """``exp(-i Re(k z e^{-i angle}))``."""

    angle: float

    def __call__(self, k: float, points) -> np.ndarray:
        z = np.asarray(points, dtype=complex)
        return np.exp(-1j * (k * z * np.exp(-1j * self.angle)).real)

    def validate(self, scene: Scene) -> None:
        pass


@dataclass(frozen=True)
class PointSource:
    """Outgoing monopole ``H_0(k|z - z_s|)`` radiating from outside every obstacle."""

    location: complex

    def __call__(self, k: float, points) -> np.ndarray:
        return _monopole(k, self.location, points)

    def validate(self, scene: Scene) -> None:
        source = shapely.points(self.location.real, self.location.imag)
        for r, region in enumerate(scene.regions):
            if contains(region, self.location) or shapely.distance(region.polygon, source) <= BOUNDARY_TOLERANCE:
                raise ProblemError(f"point source at {self.location} lies inside or on region {r}")


@dataclass(frozen=True)
class InteriorSource:
    """Monopole centred strictly inside an obstacle; the exterior field it radiates is an exact solution."""

    location: complex

    def __call__(self, k: float, points) -> np.ndarray:
        return _monopole(k, self.location, points)

    def validate(self, scene: Scene) -> None:
        if not any(contains(region, self.location) for region in scene.regions):
            raise ProblemError(f"interior source at {self.location} is not inside any region")


@dataclass(frozen=True)
class Superposition:
    terms: Tuple[Any, ...]

    def __call__(self, k: float, points) -> np.ndarray:
        z = np.asarray(points, dtype=complex)
        total = np.zeros(z.shape, dtype=complex)
        for term in self.terms:
            total = total + term(k, z)
        return total

    def validate(self, scene: Scene) -> None:
        for term in self.terms:
            term.validate(scene)


@dataclass(frozen=True)
class Zero:
    def __call__(self, k: float, points) -> np.ndarray:
        return np.zeros(np.shape(points), dtype=complex)

    def validate(self, scene: Scene) -> None:
        pass


def _monopole(k: float, location: complex, points) -> np.ndarray:
    z = np.asarray(points, dtype=complex)
    distance = np.abs(z - location)
    if np.any(distance < SINGULAR_DISTANCE):
        raise BasisEvaluationError(f"monopole at {location} evaluated at its own centre")
    return np.asarray(hankel1(0, k * distance), dtype=complex)


def incident_field(kind, k: float, points) -> np.ndarray:
    """Evaluate an incident field (plane wave, point source, ...) at ``points``."""
    if not k > 0:
        raise ProblemError(f"wavenumber must be positive, got {k}")
    return kind(k, points)


# Problem and solution


@dataclass(frozen=True)
class PlacementParams:
    poles_per_corner: int = 80
    pole_rate: float | str = "auto"
    samples_per_corner_side: int = 200
    sample_exponent: float = 4.0
    sample_rate_const: float = 4.0
    length_fraction: float = 0.8
    min_pole_distance: float = 1e-9
    sample_distribution: str = "power_exponential"
    corner_pole_overrides: Mapping[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.pole_rate, str) and self.pole_rate != "auto":
            raise ProblemError(f"pole_rate must be a positive number or 'auto', got {self.pole_rate!r}")
        if self.sample_distribution not in DISTRIBUTIONS:
            raise ProblemError(f"unknown sample distribution {self.sample_distribution!r}")

    def resolved_rate(self) -> float:
        if self.pole_rate == "auto":
            return recommended_rate(self.poles_per_corner)
        return float(self.pole_rate)


@dataclass(frozen=True)
class Problem:
    """Exterior Dirichlet problem: ``u = f`` on every obstacle boundary.

    In scattering mode ``f = -incident`` so the total field vanishes on the obstacles; in direct
    mode ``f = incident``.
    """

    scene: Scene
    wavenumber: float
    incident: Any = field(default_factory=Zero)
    mode: str = "scattering"
    basis: BasisSpec = field(default_factory=BasisSpec)
    params: PlacementParams = field(default_factory=PlacementParams)

    def __post_init__(self):
        if not (self.wavenumber > 0 and math.isfinite(self.wavenumber)):
            raise ProblemError(f"wavenumber must be positive and finite, got {self.wavenumber}")
        if self.mode not in MODES:
            raise ProblemError(f"boundary mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        self.incident.validate(self.scene)

    def boundary_data(self, points) -> np.ndarray:
        values = self.incident(self.wavenumber, points)
        return -values if self.mode == "scattering" else values

    def with_params(self, **changes) -> "Problem":
        return replace(self, params=replace(self.params, **changes))

    def with_basis(self, **changes) -> "Problem":
        return replace(self, basis=replace(self.basis, **changes))


@dataclass(frozen=True)
class Diagnostics:
    residual: float
    rows: int
    cols: int
    rank: int
    condition: float
    dropped_poles: int
    wall_time: float = 0.0


@dataclass(frozen=True, eq=False)
class Solution:
    wavenumber: float
    basis: BasisSpec
    poles: np.ndarray
    pole_corner_ids: Tuple[Tuple[int, int], ...]
    interior_points: np.ndarray
    coefficients: np.ndarray
    diagnostics: Diagnostics
    regions: Tuple[Region, ...] = ()
    config: Dict[str, Any] | None = None

    def __post_init__(self):
        expected = self.basis.column_count(len(self.poles), len(self.interior_points))
        if len(self.coefficients) != expected:
            raise ProblemError(f"solution carries {len(self.coefficients)} coefficients, basis needs {expected}")


@dataclass(frozen=True, eq=False)
class LeastSquaresResult:
    coefficients: np.ndarray
    residual: float
    rank: int
    condition: float


def _centred_block(k: float, points: np.ndarray, centres: np.ndarray, orders: int) -> Tuple[np.ndarray, np.ndarray]:
    """Hankel values (orders, points, centres) and unit directions (points, centres)."""
    offsets = points[:, np.newaxis] - centres[np.newaxis, :]
    distance = np.abs(offsets)
    if distance.size and distance.min() < SINGULAR_DISTANCE:
        raise BasisEvaluationError("basis evaluated on top of a pole or interior point")
    return hankel1_seq(orders, k * distance), offsets / distance


def basis_matrix(basis: BasisSpec, k: float, points, poles, interior_points) -> np.ndarray:
    """One row per point, columns pole-major (orders 0..m per pole) then the Runge block."""
    z = np.asarray(points, dtype=complex).ravel()
    poles = np.asarray(poles, dtype=complex).ravel()
    centres = np.asarray(interior_points, dtype=complex).ravel()
    blocks = []

    if len(poles):
        hankel, phase = _centred_block(k, z, poles, basis.newman_order)
        powers = phase[..., np.newaxis] ** np.arange(basis.newman_order + 1)
        blocks.append((np.moveaxis(hankel, 0, -1) * powers).reshape(len(z), -1))

    if len(centres):
        n2 = basis.runge_degree
        hankel, phase = _centred_block(k, z, centres, n2)
        hankel = np.moveaxis(hankel, 0, -1)
        orders = np.arange(n2 + 1)
        runge = hankel * phase[..., np.newaxis] ** orders
        if basis.include_negative_runge:
            negative = hankel[..., 1:] * np.conj(phase)[..., np.newaxis] ** orders[1:]
            runge = np.concatenate([runge, negative], axis=-1)
        blocks.append(runge.reshape(len(z), -1))

    if not blocks:
        return np.empty((len(z), 0), dtype=complex)
    return np.concatenate(blocks, axis=1)


def basis_eval(basis: BasisSpec, k: float, z: complex, poles, interior_points) -> np.ndarray:
    """Every basis column at a single exterior point."""
    return basis_matrix(basis, k, [z], poles, interior_points)[0]


def assemble(problem: Problem, poles: PoleSet, samples: SampleSet) -> Tuple[np.ndarray, np.ndarray]:
    matrix = basis_matrix(problem.basis, problem.wavenumber, samples.locations, poles.locations, problem.scene.interior_points)
    rhs = np.asarray(problem.boundary_data(samples.locations), dtype=complex)
    if not np.all(np.isfinite(rhs)):
        raise ProblemError("boundary data is not finite at every sample point")
    rows, cols = matrix.shape
    if rows < cols:
        logger.warning(f"Least-squares system is underdetermined: {rows} rows < {cols} columns")
    return matrix, rhs


def solve_ls(matrix, rhs) -> LeastSquaresResult:
    """Minimum-norm least squares with unit-norm column scaling and a 1e-14 relative rank cut."""
    a = np.asarray(matrix, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise LeastSquaresError("least-squares system contains non-finite entries")
    if a.shape[1] == 0:
        return LeastSquaresResult(np.zeros(0, dtype=complex), float(np.linalg.norm(b)), 0, 1.0)

    norms = np.linalg.norm(a, axis=0)
    norms[norms == 0.0] = 1.0
    scaled = a / norms
    logger.debug(f"Column norms range {norms.min():.3e} .. {norms.max():.3e}")

    y, _, rank, singular = scipy.linalg.lstsq(scaled, b, cond=RCOND, lapack_driver="gelsd")
    coefficients = y / norms
    residual = float(np.linalg.norm(scaled @ y - b))
    smallest = singular[-1] if len(singular) else 0.0
    condition = float(singular[0] / smallest) if smallest > 0 else math.inf
    return LeastSquaresResult(coefficients, residual, int(rank), condition)


def solve(problem: Problem, config: Dict[str, Any] | None = None) -> Solution:
    """Place poles and samples, assemble and solve."""
    params = problem.params
    rate = params.resolved_rate()
    with logfire.span("lightning solve k={k} p={p} rate={rate}", k=problem.wavenumber, p=params.poles_per_corner, rate=rate):
        started = time.perf_counter()
        poles = place_poles(
            problem.scene,
            params.poles_per_corner,
            rate,
            length_fraction=params.length_fraction,
            min_distance=params.min_pole_distance,
            overrides=params.corner_pole_overrides,
        )
        samples = place_samples(
            problem.scene,
            params.samples_per_corner_side,
            params.sample_exponent,
            params.sample_rate_const,
            params.sample_distribution,
        )
        matrix, rhs = assemble(problem, poles, samples)
        result = solve_ls(matrix, rhs)
        elapsed = time.perf_counter() - started

    diagnostics = Diagnostics(
        residual=result.residual,
        rows=matrix.shape[0],
        cols=matrix.shape[1],
        rank=result.rank,
        condition=result.condition,
        dropped_poles=poles.dropped,
        wall_time=elapsed,
    )
    logger.info(
        f"Solved {diagnostics.rows}x{diagnostics.cols} system: residual={diagnostics.residual:.3e} "
        f"rank={diagnostics.rank} cond={diagnostics.condition:.3e} in {elapsed:.2f}s"
    )
    return Solution(
        wavenumber=problem.wavenumber,
        basis=problem.basis,
        poles=poles.locations,
        pole_corner_ids=poles.corner_ids,
        interior_points=np.asarray(problem.scene.interior_points, dtype=complex),
        coefficients=result.coefficients,
        diagnostics=diagnostics,
        regions=problem.scene.regions,
        config=config,
    )


def interior_mask(solution: Solution, points) -> np.ndarray:
    z = np.asarray(points, dtype=complex)
    mask = np.zeros(z.shape, dtype=bool)
    for region in solution.regions:
        mask |= contains(region, z)
    return mask


def evaluate(solution: Solution, points: Sequence[complex] | np.ndarray, chunk_size: int = EVALUATION_CHUNK) -> np.ndarray:
    """Field of a solution at exterior points; points inside an obstacle come back as NaN.

    Columns are accumulated one at a time in a fixed order, so the result does not depend on
    how the points are chunked.
    """
    z = np.asarray(points, dtype=complex)
    flat = z.ravel()
    masked = interior_mask(solution, flat)
    values = np.full(flat.shape, np.nan + 1j * np.nan, dtype=complex)
    todo = np.flatnonzero(~masked)

    chunk_size = max(int(chunk_size), 1)
    for start in range(0, len(todo), chunk_size):
        index = todo[start : start + chunk_size]
        block = basis_matrix(solution.basis, solution.wavenumber, flat[index], solution.poles, solution.interior_points)
        total = np.zeros(len(index), dtype=complex)
        for column, coefficient in zip(block.T, solution.coefficients):
            total += coefficient * column
        values[index] = total
    return values.reshape(z.shape)
