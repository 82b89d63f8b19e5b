"""Exception types raised by the idcurve package."""


class IdCurveError(Exception):
    """Base class for all idcurve errors."""


class InvalidCloudError(IdCurveError):
    """Point matrix violates a cloud invariant (shape, finiteness, size)."""


class InvalidCurveError(IdCurveError):
    """Layer series violates a curve invariant (length, contiguity)."""


class FormatError(IdCurveError):
    """A container or manifest file does not parse to a valid object."""


class MissingLayerFileError(IdCurveError):
    """A manifest references a layer file that does not exist."""


class KTooLargeError(IdCurveError):
    """Requested neighbor count k exceeds N - 1."""


class TooFewPointsError(IdCurveError):
    """Not enough points remain for the requested operation."""


class DegenerateGeometryError(IdCurveError):
    """Zero or non-finite neighbor distances make the estimate undefined."""


class DegenerateSeriesError(IdCurveError):
    """A series is too short or has zero variance for correlation."""


class MixedRunsError(IdCurveError):
    """Curves passed to a multi-run operation disagree on run identity."""


class EmptyInputError(IdCurveError):
    """An aggregation operation received no inputs."""


class InvalidSpecError(IdCurveError):
    """A ManifoldSpec or orthogonal-map request is inconsistent."""


class StabilityError(IdCurveError):
    """Too many resamples failed during a stability run."""


class LayerError(IdCurveError):
    """Wraps a failure while processing one layer of a run.

    The original exception is available as ``cause`` (and ``__cause__``).
    """

    def __init__(self, layer_index, path, cause):
        self.layer_index = layer_index
        self.path = path
        self.cause = cause
        super().__init__(f"layer {layer_index} ({path}): {cause}")
