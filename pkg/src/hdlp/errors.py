"""Exception types shared across the package."""


class HdlpError(Exception):
    """Base class for package errors."""


class DataError(HdlpError):
    """Invalid input data or configuration (bad transform code, unknown
    series, malformed CSV, insufficient sample)."""


class ConvergenceError(HdlpError):
    """Solver failed to converge within the sweep budget.

    Carries the last iterate and the KKT gap so callers can inspect or
    salvage the fit.
    """

    def __init__(self, message, last_beta=None, kkt_gap=None, sweeps=None):
        super().__init__(message)
        self.last_beta = last_beta
        self.kkt_gap = kkt_gap
        self.sweeps = sweeps


class RankError(HdlpError):
    """A matrix that must have full column rank does not."""


class InferenceError(HdlpError):
    """Inference is undefined on the given inputs (e.g. a nodewise
    residual variance numerically at zero)."""
