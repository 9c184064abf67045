"""Pole and boundary-sample placement.

Poles sit on the interior bisector of every corner at geometrically shrinking distances.
Samples cover each half-edge, clustered towards the corner that owns it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np

from .exceptions import PlacementError, ProblemError
from .geometry import Scene, bisector_clip_length, contains, edge_point, interior_bisector

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("power_exponential", "exponential_equispaced")

CornerId = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class PoleSet:
    locations: np.ndarray
    corner_ids: Tuple[CornerId, ...]
    poles_per_corner: int
    rate: float
    length_fraction: float
    min_distance: float
    dropped: int
    dropped_by_corner: Dict[CornerId, int]

    def __len__(self) -> int:
        return len(self.locations)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Boundary points in (region, edge, t) order.

    ``t`` is the absolute parameter along the edge; ``second_half`` flags points on the half
    owned by the edge's end corner.
    """

    locations: np.ndarray
    region_index: np.ndarray
    edge_index: np.ndarray
    t: np.ndarray
    second_half: np.ndarray
    samples_per_corner_side: int
    exponent: float
    rate_const: float
    distribution: str

    def __len__(self) -> int:
        return len(self.locations)

    def halves(self) -> Tuple[str, ...]:
        return tuple("second" if flag else "first" for flag in self.second_half)


def recommended_rate(poles_per_corner: int) -> float:
    """Piecewise fit of the best pole rate against poles per corner on the unit-square benchmark."""
    p = poles_per_corner
    if p < 1:
        raise ProblemError(f"poles_per_corner must be at least 1, got {p}")
    if p < 40:
        return -0.000375 * p * p + 0.0333 * p + 1.578
    if p < 80:
        return 0.0006 * p + 2.268
    if p < 130:
        return -0.0108 * p + 3.133
    return 0.00462 * p + 1.165


def place_poles(
    scene: Scene,
    poles_per_corner: int,
    rate: float,
    length_fraction: float = 0.8,
    min_distance: float = 1e-9,
    overrides: Mapping[CornerId, int] | None = None,
) -> PoleSet:
    """Cluster poles along every corner's interior bisector.

    Distances follow ``length_fraction * clip * exp(-rate * j / sqrt(p))`` for j = 0..p-1;
    candidates closer than ``min_distance`` to their corner are dropped.
    """
    if poles_per_corner < 1:
        raise ProblemError(f"poles_per_corner must be at least 1, got {poles_per_corner}")
    if not rate > 0:
        raise ProblemError(f"pole rate must be positive, got {rate}")
    if not 0 < length_fraction <= 1:
        raise ProblemError(f"length_fraction must lie in (0, 1], got {length_fraction}")
    if not min_distance > 0:
        raise ProblemError(f"min_distance must be positive, got {min_distance}")
    overrides = dict(overrides or {})

    locations = []
    corner_ids = []
    dropped_by_corner = {}
    for r, k, corner in scene.corners():
        count = overrides.get((r, k), poles_per_corner)
        if count < 1:
            raise ProblemError(f"pole override for corner {r}:{k} must be at least 1, got {count}")
        region = scene.regions[r]
        clip = bisector_clip_length(scene, r, k)
        distances = length_fraction * clip * np.exp(-rate * np.arange(count) / math.sqrt(count))
        keep = distances >= min_distance
        poles = corner + distances[keep] * interior_bisector(region, k)

        outside = ~contains(region, poles)
        if outside.any():
            raise PlacementError(f"{int(outside.sum())} poles of corner {r}:{k} fall outside their region")

        dropped = int(count - keep.sum())
        if dropped:
            dropped_by_corner[(r, k)] = dropped
        logger.debug(f"Corner {r}:{k} clip={clip:.6g} poles={int(keep.sum())} dropped={dropped}")
        locations.append(poles)
        corner_ids.extend([(r, k)] * len(poles))

    dropped_total = sum(dropped_by_corner.values())
    if dropped_total:
        logger.warning(f"Dropped {dropped_total} poles closer than {min_distance:g} to their corner")
    logger.info(f"Placed {len(corner_ids)} poles on {scene.corner_count} corners (p={poles_per_corner}, rate={rate:.6g})")
    return PoleSet(
        locations=np.concatenate(locations) if locations else np.empty(0, dtype=complex),
        corner_ids=tuple(corner_ids),
        poles_per_corner=poles_per_corner,
        rate=float(rate),
        length_fraction=float(length_fraction),
        min_distance=float(min_distance),
        dropped=dropped_total,
        dropped_by_corner=dropped_by_corner,
    )


def sample_distribution(t, exponent: float, rate_const: float = 4.0):
    """``t**A * exp(B * (t - 1))``: 0 at the corner, 1 at the half-edge midpoint."""
    ta = np.asarray(t, dtype=float)
    value = ta**exponent * np.exp(rate_const * (ta - 1.0))
    return float(value) if ta.ndim == 0 else value


def half_edge_fractions(count: int, exponent: float, rate_const: float = 4.0, distribution: str = "power_exponential", offset: float = 0.0) -> np.ndarray:
    """Sorted distinct fractions in (0, 1] of a half-edge, measured from its corner.

    ``offset`` shifts the index grid to ``(j - offset) / count``; a non-zero offset produces
    points between those of an unshifted placement.
    """
    grid = (np.arange(1, count + 1) - offset) / count
    if distribution == "power_exponential":
        fractions = sample_distribution(grid, exponent, rate_const)
    elif distribution == "exponential_equispaced":
        clustered = np.exp(rate_const * math.sqrt(count) * (grid - 1.0))
        fractions = np.concatenate([clustered, grid])
    else:
        raise ProblemError(f"unknown sample distribution {distribution!r}, expected one of {', '.join(DISTRIBUTIONS)}")
    fractions = np.unique(fractions)
    return fractions[(fractions > 0.0) & (fractions <= 1.0)]


def boundary_points(scene: Scene, fractions: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Lay the same half-edge fractions out from both ends of every edge.

    Returns ``(locations, region_index, edge_index, t, second_half)`` in (region, edge, t)
    order with the shared midpoint kept once.
    """
    first = 0.5 * fractions
    second = 1.0 - 0.5 * fractions
    t_edge, index = np.unique(np.concatenate([first, second]), return_index=True)
    second_flag = index >= len(first)
    # fractions below machine epsilon collapse onto the far corner
    interior = (t_edge > 0.0) & (t_edge < 1.0)
    t_edge, second_flag = t_edge[interior], second_flag[interior]

    locations, regions, edges, ts, halves = [], [], [], [], []
    for r, region in enumerate(scene.regions):
        for k in range(len(region)):
            locations.append(edge_point(region, k, t_edge))
            regions.append(np.full(len(t_edge), r))
            edges.append(np.full(len(t_edge), k))
            ts.append(t_edge)
            halves.append(second_flag)
    locations = np.concatenate(locations)
    _, first_seen = np.unique(locations, return_index=True)
    keep = np.sort(first_seen)
    return (
        locations[keep],
        np.concatenate(regions)[keep],
        np.concatenate(edges)[keep],
        np.concatenate(ts)[keep],
        np.concatenate(halves)[keep],
    )


def place_samples(scene: Scene, samples_per_corner_side: int, exponent: float, rate_const: float = 4.0, distribution: str = "power_exponential") -> SampleSet:
    if samples_per_corner_side < 2:
        raise ProblemError(f"samples_per_corner_side must be at least 2, got {samples_per_corner_side}")
    if not exponent > 0 or not rate_const > 0:
        raise ProblemError(f"sample exponent and rate constant must be positive, got {exponent} and {rate_const}")
    fractions = half_edge_fractions(samples_per_corner_side, exponent, rate_const, distribution)
    locations, regions, edges, t, second = boundary_points(scene, fractions)
    logger.info(f"Placed {len(locations)} boundary samples (s={samples_per_corner_side}, A={exponent:g}, B={rate_const:g}, {distribution})")
    return SampleSet(
        locations=locations,
        region_index=regions,
        edge_index=edges,
        t=t,
        second_half=second,
        samples_per_corner_side=samples_per_corner_side,
        exponent=float(exponent),
        rate_const=float(rate_const),
        distribution=distribution,
    )
