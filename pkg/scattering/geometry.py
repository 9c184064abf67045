"""Polygonal obstacles in the complex plane.

A :class:`Region` is a simple counter-clockwise polygon; a :class:`Scene` is a set of pairwise
disjoint regions together with the interior expansion points used by the smooth part of the
basis. Vertex ``k`` is the corner at the start of edge ``k``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np
import shapely
from shapely.geometry import Polygon

from .exceptions import GeometryError

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12
VERTEX_SEPARATION = 1e-12


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise GeometryError(f"vertex must be an [x, y] pair, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _cross(p: complex, q) -> np.ndarray:
    return p.real * np.imag(q) - p.imag * np.real(q)


@dataclass(frozen=True)
class Region:
    """Simple polygon given by its corners in counter-clockwise order.

    Clockwise input is reversed in place (keeping the first vertex first).
    """

    vertices: Tuple[complex, ...]
    polygon: Polygon = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(_as_complex(v) for v in self.vertices)
        if len(vertices) < 3:
            raise GeometryError(f"a region needs at least 3 vertices, got {len(vertices)}")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vertices):
            raise GeometryError("region vertices must be finite")
        for k, v in enumerate(vertices):
            following = vertices[(k + 1) % len(vertices)]
            if abs(following - v) <= VERTEX_SEPARATION:
                raise GeometryError(f"vertices {k} and {(k + 1) % len(vertices)} coincide")

        polygon = Polygon([(v.real, v.imag) for v in vertices])
        if not polygon.exterior.is_simple or not polygon.is_valid:
            raise GeometryError("region polygon is self-intersecting")
        if polygon.area <= 0.0:
            raise GeometryError("region polygon has zero area")
        if not polygon.exterior.is_ccw:
            vertices = (vertices[0],) + tuple(reversed(vertices[1:]))
            polygon = Polygon([(v.real, v.imag) for v in vertices])

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "polygon", polygon)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def centroid(self) -> complex:
        c = self.polygon.centroid
        return complex(c.x, c.y)

    def corner(self, index: int) -> complex:
        return self.vertices[self._index(index, "corner")]

    def edge_length(self, index: int) -> float:
        k = self._index(index, "edge")
        return abs(self.vertices[(k + 1) % len(self)] - self.vertices[k])

    def translated(self, offset: complex) -> "Region":
        return Region(tuple(v + offset for v in self.vertices))

    def _index(self, index: int, what: str) -> int:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index < len(self):
            raise GeometryError(f"{what} index {index!r} out of range for a region with {len(self)} corners")
        return int(index)


@dataclass(frozen=True)
class Scene:
    """One or more disjoint regions plus the interior points of the smooth expansion."""

    regions: Tuple[Region, ...]
    interior_points: Tuple[complex, ...]

    def __post_init__(self):
        regions = tuple(self.regions)
        points = tuple(_as_complex(p) for p in self.interior_points)
        if not regions:
            raise GeometryError("a scene needs at least one region")
        if not points:
            raise GeometryError("a scene needs at least one interior point")
        for a in range(len(regions)):
            for b in range(a + 1, len(regions)):
                if regions[a].polygon.distance(regions[b].polygon) <= BOUNDARY_TOLERANCE:
                    raise GeometryError(f"regions {a} and {b} overlap or touch")
        for point in points:
            if not any(contains(region, point) for region in regions):
                raise GeometryError(f"interior point {point} is not strictly inside any region")
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "interior_points", points)

    @classmethod
    def from_regions(cls, regions: Iterable[Region], interior_points: Sequence | None = None) -> "Scene":
        """Build a scene, defaulting the interior points to one per region at its centroid."""
        regions = tuple(regions)
        if interior_points is None:
            interior_points = [_default_interior_point(region) for region in regions]
        return cls(regions, tuple(interior_points))

    def corners(self) -> Iterator[Tuple[int, int, complex]]:
        """Yield ``(region_index, corner_index, location)`` in scene order."""
        for r, region in enumerate(self.regions):
            for k, vertex in enumerate(region.vertices):
                yield r, k, vertex

    @property
    def corner_count(self) -> int:
        return sum(len(region) for region in self.regions)

    def region(self, index: int) -> Region:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index < len(self.regions):
            raise GeometryError(f"region index {index!r} out of range for a scene with {len(self.regions)} regions")
        return self.regions[index]

    def inside_mask(self, points) -> np.ndarray:
        """Boolean mask of points strictly inside any region."""
        pts = np.asarray(points, dtype=complex)
        mask = np.zeros(pts.shape, dtype=bool)
        for region in self.regions:
            mask |= contains(region, pts)
        return mask


def _default_interior_point(region: Region) -> complex:
    centroid = region.centroid
    if contains(region, centroid):
        return centroid
    rep = region.polygon.representative_point()
    logger.warning(f"Centroid {centroid} lies outside its region, using {rep.x}+{rep.y}j as the interior point")
    return complex(rep.x, rep.y)


def edge_point(region: Region, edge_index: int, t):
    """Point at parameter ``t`` along edge ``edge_index``; exact at both endpoints."""
    k = region._index(edge_index, "edge")
    ta = np.asarray(t, dtype=float)
    if not np.all((ta >= 0.0) & (ta <= 1.0)):
        raise GeometryError(f"edge parameter must lie in [0, 1], got {t!r}")
    start = region.vertices[k]
    end = region.vertices[(k + 1) % len(region)]
    x = (1.0 - ta) * start.real + ta * end.real
    y = (1.0 - ta) * start.imag + ta * end.imag
    if ta.ndim == 0:
        return complex(float(x), float(y))
    return x + 1j * y


def interior_bisector(region: Region, corner_index: int) -> complex:
    """Unit vector bisecting the interior angle at a corner, pointing into the region."""
    k = region._index(corner_index, "corner")
    z = region.vertices[k]
    to_next = region.vertices[(k + 1) % len(region)] - z
    to_prev = region.vertices[k - 1] - z
    u1 = to_next / abs(to_next)
    u2 = to_prev / abs(to_prev)
    angle = cmath.phase(u2 / u1) % (2.0 * math.pi)
    return u1 * cmath.exp(0.5j * angle)


def exterior_bisector(region: Region, corner_index: int) -> complex:
    return -interior_bisector(region, corner_index)


def bisector_clip_length(scene: Scene, region_index: int, corner_index: int) -> float:
    """Distance from a corner along its interior bisector to the first boundary crossing."""
    region = scene.region(region_index)
    corner = region.corner(corner_index)
    direction = interior_bisector(region, corner_index)

    starts = np.asarray(region.vertices, dtype=complex)
    edges = np.roll(starts, -1) - starts
    offsets = starts - corner
    denom = _cross(direction, edges)
    usable = np.abs(denom) > 1e-15 * np.abs(edges)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = _cross(offsets, edges) / denom
        u = _cross(offsets, direction) / denom

    scale = max(abs(e) for e in edges)
    hits = usable & (s > BOUNDARY_TOLERANCE * scale) & (u >= -BOUNDARY_TOLERANCE) & (u <= 1.0 + BOUNDARY_TOLERANCE)
    if not hits.any():
        raise GeometryError(f"interior bisector of corner {corner_index} in region {region_index} never meets the boundary")
    return float(s[hits].min())


def contains(region: Region, point):
    """Strict containment; points within 1e-12 of the boundary are outside."""
    pts = np.asarray(point, dtype=complex)
    x, y = pts.real, pts.imag
    inside = shapely.contains_xy(region.polygon, x, y)
    if np.any(inside):
        near = shapely.distance(region.polygon.exterior, shapely.points(x, y)) <= BOUNDARY_TOLERANCE
        inside = inside & ~near
    if pts.ndim == 0:
        return bool(inside)
    return np.asarray(inside, dtype=bool)


def unit_square(offset: complex = 0j) -> Region:
    return Region((0j, 1 + 0j, 1 + 1j, 1j)).translated(offset)


def lshape() -> Region:
    """Unit-square L with the upper-right quadrant removed; reflex corner at (1/2, 1/2)."""
    return Region((0j, 1 + 0j, 1 + 0.5j, 0.5 + 0.5j, 0.5 + 1j, 1j))


def wall(height: float = 3.0, width: float = 0.1) -> Region:
    if height <= 0 or width <= 0:
        raise GeometryError(f"wall needs positive height and width, got {height} x {width}")
    w, h = 0.5 * width, 0.5 * height
    return Region((complex(-w, -h), complex(w, -h), complex(w, h), complex(-w, h)))
