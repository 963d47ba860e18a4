"""Exception hierarchy. Every computation error derives from KPowerError."""


class KPowerError(Exception):
    pass


class DomainError(KPowerError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ContractError(KPowerError, ValueError):
    """Caller broke a documented precondition (e.g. un-normalized curve)."""


class PeakClippedError(KPowerError):
    """Principal peak sits on the grid boundary."""


class LineUnresolvedError(KPowerError):
    """No half-maximum crossing inside the grid."""


class BracketError(KPowerError):
    """Bisection bracket is not a single monotone sign change."""


class FitError(KPowerError):
    """Degenerate sample set for a scaling fit."""


class IndeterminateError(KPowerError):
    """Two lines cannot be told apart on the given grid."""


class EstimatorError(KPowerError):
    """Product estimator undefined (zero mean photon number)."""
