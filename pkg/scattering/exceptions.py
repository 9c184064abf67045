class LightningError(RuntimeError):
    """Base class for every failure raised by the scattering library."""


class DomainError(LightningError, ValueError):
    """Raised when a special function is called outside its supported domain."""


class GeometryError(LightningError, ValueError):
    """Raised for invalid polygons, scenes, indices or degenerate bisector clipping."""


class PlacementError(LightningError):
    """Raised when a placed pole does not lie strictly inside its owning region."""


class BasisEvaluationError(LightningError):
    """Raised when a basis function is evaluated on top of its singularity."""


class LeastSquaresError(LightningError):
    """Raised when the least-squares system contains non-finite entries."""


class ProblemError(LightningError, ValueError):
    """Raised when a problem definition cannot be solved as stated."""


class ConfigError(LightningError, ValueError):
    """Raised when a problem configuration or solution document cannot be parsed.

    ``location`` names the offending key path (``params.pole_rate``) or the line/column of a
    JSON syntax error so command output can point at it.
    """

    def __init__(self, message: str, location: str | None = None) -> None:
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
