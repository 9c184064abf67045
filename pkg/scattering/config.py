"""Problem configuration documents.

A configuration is a JSON object validated by the pydantic models below. Unknown keys are
rejected so a mistyped parameter name fails loudly instead of silently using a default.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, field_validator

from .exceptions import ConfigError, GeometryError, ProblemError
from .geometry import Region, Scene, lshape, unit_square, wall
from .solver import BasisSpec, InteriorSource, PlacementParams, PlaneWave, PointSource, Problem, Superposition, Zero
from .specialfn import MAX_ORDER

logger = logging.getLogger(__name__)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UnitSquareSpec(StrictModel):
    builtin: Literal["unit_square"]


class LShapeSpec(StrictModel):
    builtin: Literal["lshape"]


class WallSpec(StrictModel):
    builtin: Literal["wall"]
    height: PositiveFloat = 3.0
    width: PositiveFloat = 0.1


class PolygonSpec(StrictModel):
    builtin: Literal["polygon"]
    vertices: List[Tuple[float, float]] = Field(min_length=3)


RegionSpec = Annotated[Union[UnitSquareSpec, LShapeSpec, WallSpec, PolygonSpec], Field(discriminator="builtin")]


class SceneSpec(StrictModel):
    regions: List[RegionSpec] = Field(min_length=1)
    interior_points: Optional[List[Tuple[float, float]]] = None

    @field_validator("regions", mode="before")
    @classmethod
    def expand_shorthand(cls, value: Any) -> Any:
        if isinstance(value, (str, dict)):
            value = [value]
        if isinstance(value, list):
            return [{"builtin": item} if isinstance(item, str) else item for item in value]
        return value


class PlaneWaveSpec(StrictModel):
    type: Literal["plane_wave"]
    angle: float


class PointSourceSpec(StrictModel):
    type: Literal["point_source"]
    x: float
    y: float


class InteriorSourceSpec(StrictModel):
    type: Literal["interior_source"]
    x: float
    y: float


class ZeroSpec(StrictModel):
    type: Literal["zero"]


class SumSpec(StrictModel):
    type: Literal["sum"]
    terms: List["KindSpec"] = Field(min_length=1)


KindSpec = Annotated[Union[PlaneWaveSpec, PointSourceSpec, InteriorSourceSpec, ZeroSpec, SumSpec], Field(discriminator="type")]
SumSpec.model_rebuild()


class BoundarySpec(StrictModel):
    mode: Literal["scattering", "direct"] = "scattering"
    kind: KindSpec


class ParamsSpec(StrictModel):
    poles_per_corner: PositiveInt = 80
    pole_rate: Union[Literal["auto"], PositiveFloat] = "auto"
    samples_per_corner_side: int = Field(200, ge=2)
    sample_exponent: PositiveFloat = 4.0
    sample_rate_const: PositiveFloat = 4.0
    runge_degree: int = Field(20, ge=0, le=MAX_ORDER)
    newman_order: int = Field(1, ge=1, le=MAX_ORDER)
    length_fraction: float = Field(0.8, gt=0.0, le=1.0)
    min_pole_distance: PositiveFloat = 1e-9
    negative_runge: bool = False
    sample_distribution: Literal["power_exponential", "exponential_equispaced"] = "power_exponential"
    corner_pole_overrides: Dict[str, PositiveInt] = Field(default_factory=dict)

    @field_validator("corner_pole_overrides")
    @classmethod
    def check_corner_keys(cls, value: Dict[str, int]) -> Dict[str, int]:
        for key in value:
            parts = key.split(":")
            if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
                raise ValueError(f"corner key {key!r} must look like '<region>:<corner>'")
        return value

    def overrides(self) -> Dict[Tuple[int, int], int]:
        return {tuple(int(p) for p in key.split(":")): count for key, count in self.corner_pole_overrides.items()}


class ProblemConfig(StrictModel):
    scene: SceneSpec
    wavenumber: PositiveFloat
    boundary: BoundarySpec
    params: ParamsSpec = Field(default_factory=ParamsSpec)


# Tuning-guide sweeps: parameter overrides, swept parameter and its values.
SWEEP_PRESETS: Dict[str, Dict[str, Any]] = {
    "rate-scan": {
        "params": {"poles_per_corner": 50, "samples_per_corner_side": 1000, "sample_exponent": 10.0, "sample_rate_const": 4.0},
        "parameter": "pole_rate",
        "values": "0.1:3.1:0.3",
    },
    "hard-rate-scan": {
        "params": {"poles_per_corner": 50, "samples_per_corner_side": 10000, "sample_exponent": 10.0, "sample_rate_const": 4.0},
        "parameter": "pole_rate",
        "values": "0.1:2.2:0.3",
    },
    "pole-scan": {
        "params": {},
        "parameter": "poles_per_corner",
        "values": "50:150:10",
    },
    "newman-scan": {
        "params": {"poles_per_corner": 50},
        "parameter": "newman_order",
        "values": "1,2,3,4,5",
    },
}


def _location(error: Dict[str, Any]) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def parse_config(data: Any) -> ProblemConfig:
    """Validate a decoded configuration, naming the offending key path on failure."""
    try:
        return ProblemConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(first["msg"], location=_location(first)) from exc


def load_config(path: str | Path) -> ProblemConfig:
    return parse_config(read_json(path))


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, location=f"{path.name} line {exc.lineno} column {exc.colno}") from exc


def build_region(spec) -> Region:
    if isinstance(spec, UnitSquareSpec):
        return unit_square()
    if isinstance(spec, LShapeSpec):
        return lshape()
    if isinstance(spec, WallSpec):
        return wall(spec.height, spec.width)
    return Region(tuple(complex(x, y) for x, y in spec.vertices))


def build_scene(spec: SceneSpec) -> Scene:
    regions = [build_region(region) for region in spec.regions]
    points = None if spec.interior_points is None else [complex(x, y) for x, y in spec.interior_points]
    return Scene.from_regions(regions, points)


def build_incident(spec):
    if isinstance(spec, PlaneWaveSpec):
        return PlaneWave(spec.angle)
    if isinstance(spec, PointSourceSpec):
        return PointSource(complex(spec.x, spec.y))
    if isinstance(spec, InteriorSourceSpec):
        return InteriorSource(complex(spec.x, spec.y))
    if isinstance(spec, SumSpec):
        return Superposition(tuple(build_incident(term) for term in spec.terms))
    return Zero()


def build_problem(config: ProblemConfig) -> Problem:
    """Turn a validated configuration into a :class:`Problem`; geometric or physical
    inconsistencies are reported as configuration errors."""
    try:
        scene = build_scene(config.scene)
    except GeometryError as exc:
        raise ConfigError(str(exc), location="scene") from exc

    p = config.params
    try:
        return Problem(
            scene=scene,
            wavenumber=config.wavenumber,
            incident=build_incident(config.boundary.kind),
            mode=config.boundary.mode,
            basis=BasisSpec(p.newman_order, p.runge_degree, p.negative_runge),
            params=PlacementParams(
                poles_per_corner=p.poles_per_corner,
                pole_rate=p.pole_rate,
                samples_per_corner_side=p.samples_per_corner_side,
                sample_exponent=p.sample_exponent,
                sample_rate_const=p.sample_rate_const,
                length_fraction=p.length_fraction,
                min_pole_distance=p.min_pole_distance,
                sample_distribution=p.sample_distribution,
                corner_pole_overrides=p.overrides(),
            ),
        )
    except ProblemError as exc:
        raise ConfigError(str(exc), location="boundary") from exc


def apply_preset(config: ProblemConfig, name: str) -> Tuple[ProblemConfig, str, str]:
    """Config with the preset's parameter overrides, plus the preset's parameter and values."""
    try:
        preset = SWEEP_PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}, expected one of {', '.join(SWEEP_PRESETS)}", location="--preset") from None
    params = config.params.model_copy(update=preset["params"])
    return config.model_copy(update={"params": params}), preset["parameter"], preset["values"]
