"""Solution documents and CSV tables.

Floats go through Python's shortest round-trip repr (JSON) or 17 significant digits (CSV),
so values read back are bit-identical to the ones written.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from lightning_helm.utils import format_float

from .analysis import ConvergenceStudy, ErrorProfile, ShadowTrace, SweepGrid, SweepTable
from .exceptions import ConfigError
from .geometry import Region
from .solver import BasisSpec, Diagnostics, Solution

logger = logging.getLogger(__name__)

Pair = Tuple[float, float]


class BasisDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: int = Field(ge=1, description="Hankel orders 0..m attached to every pole")
    n2: int = Field(ge=0, description="Degree of the expansion about each interior point")
    negative_runge: bool = False


class DiagnosticsDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    residual: float
    rows: int
    cols: int
    dropped_poles: int
    rank: Optional[int] = None
    condition: Optional[float] = None
    wall_time: Optional[float] = None


class SolutionDocument(BaseModel):
    """Persisted solution: everything :func:`scattering.solver.evaluate` needs, plus the
    obstacle outlines for masking and the configuration that produced it."""

    model_config = ConfigDict(extra="forbid")

    wavenumber: float = Field(gt=0)
    basis: BasisDocument
    poles: List[Pair]
    pole_corner_ids: List[Tuple[int, int]]
    interior_points: List[Pair]
    coefficients: List[Pair]
    diagnostics: DiagnosticsDocument
    regions: List[List[Pair]] = Field(default_factory=list)
    config: Optional[Dict[str, Any]] = None


def _pairs(values: np.ndarray) -> List[Pair]:
    return [(float(v.real), float(v.imag)) for v in np.asarray(values, dtype=complex)]


def _complex(pairs: List[Pair]) -> np.ndarray:
    return np.array([complex(x, y) for x, y in pairs], dtype=complex)


def to_document(solution: Solution) -> SolutionDocument:
    d = solution.diagnostics
    condition = d.condition if np.isfinite(d.condition) else None
    return SolutionDocument(
        wavenumber=solution.wavenumber,
        basis=BasisDocument(m=solution.basis.newman_order, n2=solution.basis.runge_degree, negative_runge=solution.basis.include_negative_runge),
        poles=_pairs(solution.poles),
        pole_corner_ids=[tuple(cid) for cid in solution.pole_corner_ids],
        interior_points=_pairs(solution.interior_points),
        coefficients=_pairs(solution.coefficients),
        diagnostics=DiagnosticsDocument(
            residual=d.residual,
            rows=d.rows,
            cols=d.cols,
            dropped_poles=d.dropped_poles,
            rank=d.rank,
            condition=condition,
            wall_time=d.wall_time,
        ),
        regions=[_pairs(region.vertices) for region in solution.regions],
        config=solution.config,
    )


def from_document(document: SolutionDocument) -> Solution:
    d = document.diagnostics
    return Solution(
        wavenumber=document.wavenumber,
        basis=BasisSpec(document.basis.m, document.basis.n2, document.basis.negative_runge),
        poles=_complex(document.poles),
        pole_corner_ids=tuple(tuple(cid) for cid in document.pole_corner_ids),
        interior_points=_complex(document.interior_points),
        coefficients=_complex(document.coefficients),
        diagnostics=Diagnostics(
            residual=d.residual,
            rows=d.rows,
            cols=d.cols,
            rank=d.rank if d.rank is not None else d.cols,
            condition=d.condition if d.condition is not None else float("inf"),
            dropped_poles=d.dropped_poles,
            wall_time=d.wall_time or 0.0,
        ),
        regions=tuple(Region(tuple(complex(x, y) for x, y in vertices)) for vertices in document.regions),
        config=document.config,
    )


def save_solution(solution: Solution, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_document(solution).model_dump(mode="json"), indent=1))
    logger.info(f"Wrote solution with {len(solution.coefficients)} coefficients to {path}")
    return path


def parse_solution(data: Any) -> Solution:
    try:
        document = SolutionDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(first["msg"], location=".".join(str(p) for p in first["loc"])) from exc
    return from_document(document)


def load_solution(path: str | Path) -> Solution:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, location=f"{path.name} line {exc.lineno} column {exc.colno}") from exc
    return parse_solution(data)


def _write_rows(path: str | Path, header: List[str], rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_profile_csv(profile: ErrorProfile, path: str | Path) -> Path:
    rows = ([i, format_float(z.real), format_float(z.imag), format_float(e)] for i, (z, e) in enumerate(zip(profile.points, profile.errors)))
    return _write_rows(path, ["index", "x", "y", "error"], rows)


def write_sweep_csv(table: SweepTable | SweepGrid, path: str | Path) -> Path:
    two = isinstance(table, SweepGrid)
    header = ["parameter", "value"] + (["parameter_2", "value_2"] if two else []) + ["max_error", "residual", "wall_time", "rows", "cols"]
    rows = []
    for row in table.rows:
        line = [row.parameter, format_float(row.value)]
        if two:
            line += [row.parameter_2, format_float(row.value_2)]
        line += [format_float(row.max_error), format_float(row.residual), format_float(row.wall_time), row.rows, row.cols]
        rows.append(line)
    return _write_rows(path, header, rows)


def write_convergence_csv(study: ConvergenceStudy, path: str | Path) -> Path:
    rows = (
        [p, format_float(s), format_float(e), format_float(log)] for p, s, e, log in zip(study.pole_counts, study.sqrt_p, study.max_errors, study.log10_errors)
    )
    return _write_rows(path, ["poles_per_corner", "sqrt_p", "max_error", "log10_error"], rows)


def write_shadow_csv(trace: ShadowTrace, path: str | Path) -> Path:
    rows = (
        [format_float(d), format_float(z.real), format_float(z.imag), format_float(u.real), format_float(u.imag), format_float(abs(u))]
        for d, z, u in zip(trace.distances, trace.points, trace.total)
    )
    return _write_rows(path, ["distance", "x", "y", "re", "im", "abs"], rows)
