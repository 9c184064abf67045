"""Rectangular field grids with obstacle masking, exported as CSV or binary PPM."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import logfire
import numpy as np

from lightning_helm.utils import format_float

from .exceptions import ProblemError
from .solver import EVALUATION_CHUNK, Problem, Solution, evaluate, interior_mask

logger = logging.getLogger(__name__)

COMPONENTS = ("scattered", "incident", "total")
PARTS = ("re", "im", "abs")
MASK_COLOUR = (64, 64, 64)

Bounds = Tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Cell-centred samples; row ``j`` of ``values`` is the ``j``-th row up from ``ymin``."""

    bounds: Bounds
    nx: int
    ny: int
    values: np.ndarray
    mask: np.ndarray
    component: str

    @property
    def points(self) -> np.ndarray:
        return cell_centres(self.bounds, self.nx, self.ny)

    def part(self, name: str) -> np.ndarray:
        if name == "re":
            return self.values.real
        if name == "im":
            return self.values.imag
        if name == "abs":
            return np.abs(self.values)
        raise ProblemError(f"unknown field part {name!r}, expected one of {', '.join(PARTS)}")


def cell_centres(bounds: Bounds, nx: int, ny: int) -> np.ndarray:
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    if nx < 2 or ny < 2:
        raise ProblemError(f"grid needs at least 2x2 cells, got {nx}x{ny}")
    if not (xmax > xmin and ymax > ymin):
        raise ProblemError(f"degenerate grid bounds {bounds}")
    x = xmin + (np.arange(nx) + 0.5) * ((xmax - xmin) / nx)
    y = ymin + (np.arange(ny) + 0.5) * ((ymax - ymin) / ny)
    return x[np.newaxis, :] + 1j * y[:, np.newaxis]


def sample_grid(solution: Solution, problem: Problem | None, bounds: Bounds, nx: int, ny: int, component: str = "scattered", chunk_size: int = EVALUATION_CHUNK) -> FieldGrid:
    if component not in COMPONENTS:
        raise ProblemError(f"unknown field component {component!r}, expected one of {', '.join(COMPONENTS)}")
    if component != "scattered" and problem is None:
        raise ProblemError(f"the {component} field needs the problem definition")

    points = cell_centres(bounds, nx, ny)
    with logfire.span("sample {component} field on {nx}x{ny} grid", component=component, nx=nx, ny=ny):
        mask = interior_mask(solution, points)
        values = np.full(points.shape, np.nan + 1j * np.nan, dtype=complex)
        outside = ~mask
        if component in ("scattered", "total"):
            values[outside] = evaluate(solution, points[outside], chunk_size=chunk_size)
        if component == "incident":
            values[outside] = problem.incident(problem.wavenumber, points[outside])
        elif component == "total":
            values[outside] += problem.incident(problem.wavenumber, points[outside])
    logger.info(f"Sampled {component} field on {nx}x{ny} grid, {int(mask.sum())} cells masked")
    return FieldGrid((float(bounds[0]), float(bounds[1]), float(bounds[2]), float(bounds[3])), nx, ny, values, mask, component)


def colour_map(values: np.ndarray, part: str, vmax: float) -> np.ndarray:
    """Diverging blue-white-red map; returns uint8 RGB with a trailing channel axis."""
    if part == "abs":
        t = np.clip(values, 0.0, vmax) / vmax
    else:
        t = (np.clip(values, -vmax, vmax) + vmax) / (2.0 * vmax)
    channels = np.stack([t, 1.0 - np.abs(2.0 * t - 1.0), 1.0 - t], axis=-1)
    return np.floor(255.0 * channels + 0.5).astype(np.uint8)


def default_vmax(grid: FieldGrid, part: str) -> float:
    selected = np.abs(grid.part(part)[~grid.mask])
    peak = float(selected.max()) if selected.size else 0.0
    return 2.0 * peak if peak > 0 else 1.0


def write_ppm(grid: FieldGrid, part: str = "re", vmax: float | None = None, path: str | Path = "field.ppm") -> Path:
    """Binary P6 image, top row at ``ymax``; masked cells are dark grey."""
    if vmax is None:
        vmax = default_vmax(grid, part)
    if not vmax > 0:
        raise ProblemError(f"vmax must be positive, got {vmax}")
    selected = np.where(grid.mask, 0.0, grid.part(part))
    pixels = colour_map(selected, part, vmax)
    pixels[grid.mask] = MASK_COLOUR
    path = Path(path)
    with path.open("wb") as handle:
        handle.write(f"P6\n{grid.nx} {grid.ny}\n255\n".encode("ascii"))
        handle.write(np.ascontiguousarray(pixels[::-1]).tobytes())
    logger.info(f"Wrote {grid.nx}x{grid.ny} {part} image to {path}")
    return path


def write_csv(grid: FieldGrid, path: str | Path) -> Path:
    """One row per cell, x fastest starting from ``ymin``; masked rows have empty values."""
    path = Path(path)
    points = grid.points
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "y", "re", "im", "mask"])
        for j in range(grid.ny):
            for i in range(grid.nx):
                z = points[j, i]
                if grid.mask[j, i]:
                    writer.writerow([format_float(z.real), format_float(z.imag), "", "", 1])
                else:
                    value = grid.values[j, i]
                    writer.writerow([format_float(z.real), format_float(z.imag), format_float(value.real), format_float(value.imag), 0])
    logger.info(f"Wrote {grid.nx * grid.ny} field rows to {path}")
    return path
