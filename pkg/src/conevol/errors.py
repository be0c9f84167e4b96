"""Exception hierarchy for polytope construction and verification."""


class GeometryError(Exception):
    """Base class for every error raised by conevol."""


class DegenerateInput(GeometryError):
    """Input points or halfspaces do not span a full-dimensional body."""


class TooFewPoints(DegenerateInput):
    pass


class Unbounded(GeometryError):
    pass


class Infeasible(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class NotCentered(GeometryError):
    pass


class CombinatorialLimit(GeometryError):
    """An enumeration would exceed the configured subset cap."""


class InvalidK(GeometryError, ValueError):
    pass


class DegenerateNormals(GeometryError):
    pass


class InterpolationMismatch(GeometryError):
    """A per-cell polynomial fit disagrees with held-out samples."""


class ToleranceFailure(GeometryError):
    def __init__(self, message, lhs=None, rhs=None):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs


class DegenerateSample(GeometryError):
    pass


class MalformedInput(GeometryError, ValueError):
    """Input file is not valid JSON or lacks required fields."""

    def __init__(self, message, path=None, where=None):
        prefix = ":".join(str(p) for p in (path, where) if p)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.where = where
