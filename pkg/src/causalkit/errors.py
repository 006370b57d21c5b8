"""Exception taxonomy shared across the package."""


class CausalkitError(Exception):
    """Base class for all causalkit errors."""


class InvalidMetricError(CausalkitError):
    """A sampled metric is not admissible (beta <= 0 or h not positive definite)."""


class ExpressionSyntaxError(CausalkitError):
    """Malformed field expression; carries the source offset of the failure."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class FieldEvaluationError(CausalkitError):
    """Expression evaluation failed at a specific point (e.g. division by zero)."""

    def __init__(self, message, t=None, point=None):
        self.t = t
        self.point = point
        where = "" if point is None else f" at t={t}, x={point}"
        super().__init__(message + where)


class EmptyRegionError(CausalkitError):
    """Operation requires a region with nonempty interior."""


class GridMismatchError(CausalkitError):
    """Two regions or spacetimes do not share the same spatial grid."""


class CFLError(CausalkitError):
    """Front-propagation time step violated its stability bound mid-run."""


class HorizonError(CausalkitError):
    """Requested time lies outside a development's computed horizon."""


class TransportError(CausalkitError):
    """Pair transport produced an image violating regularity, or the morphism
    does not apply at the pair's time."""


class InclusionChainError(CausalkitError):
    """A required strict inclusion chain fails (zero or negative gap)."""


class DegenerateBallError(CausalkitError):
    """A ball radius was zero/negative, or the ball is not relatively compact
    with nonempty exterior at the required margin."""


class BumpConstructionError(CausalkitError):
    """Radial bump geometry infeasible under the slope constraint."""


class ScenarioError(CausalkitError):
    """Scenario file failed schema or semantic validation."""
