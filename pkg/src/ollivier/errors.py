"""Exception hierarchy.

Every exception carries a stable ``code`` string and an ``exit_status``; the
CLI maps them to its machine-readable error output, so both are part of the
public contract and must not be renumbered.
"""

from __future__ import annotations


class OllivierError(Exception):
    code = "internal"
    exit_status = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_json(self) -> dict:
        payload = {"code": self.code, "exit_status": self.exit_status, "message": self.message}
        if self.context:
            payload["context"] = {k: str(v) for k, v in self.context.items()}
        return {"error": payload}


class GraphFormatError(OllivierError):
    """Malformed graph input: bad JSON, duplicate edges, bad weights, dangling ids."""

    code = "graph-format"
    exit_status = 3


class UnknownVertexError(OllivierError):
    code = "unknown-vertex"
    exit_status = 3


class WeightError(OllivierError):
    code = "nonpositive-weight"
    exit_status = 3


class MetricError(OllivierError):
    """Metric axioms violated, or a metric query that makes no sense (d(x,x) division)."""

    code = "metric"
    exit_status = 4


class UnreachableError(OllivierError):
    code = "unreachable"
    exit_status = 4


class WalkError(OllivierError):
    """Walk evaluated outside its validity region, or unsupported for the arithmetic mode."""

    code = "walk"
    exit_status = 5


class MeasureError(OllivierError):
    code = "measure"
    exit_status = 5


class LPError(OllivierError):
    """Infeasible or unbounded program where an optimum was required."""

    code = "lp"
    exit_status = 6


class PieceBudgetExceeded(OllivierError):
    code = "piece-budget"
    exit_status = 7


class FlowError(OllivierError):
    code = "flow"
    exit_status = 8


class FlowBoundaryError(FlowError):
    """A weight or vertex measure reached the boundary threshold during a step."""

    code = "flow-boundary"


class MetricDegenerationError(FlowError):
    code = "flow-metric-degeneration"


class ConfigError(OllivierError):
    code = "config"
    exit_status = 2


ERROR_CODES = {
    cls.code: cls.exit_status
    for cls in (
        OllivierError,
        GraphFormatError,
        UnknownVertexError,
        WeightError,
        MetricError,
        UnreachableError,
        WalkError,
        MeasureError,
        LPError,
        PieceBudgetExceeded,
        FlowError,
        FlowBoundaryError,
        MetricDegenerationError,
        ConfigError,
    )
}
