"""Exception types shared across the package."""


class KFlatsError(Exception):
    """Base class for package-specific errors."""


class OrderOutOfRange(KFlatsError, ValueError):
    """A moment, cumulant, or partition order outside the supported range."""


class DimensionError(KFlatsError, ValueError):
    """Inconsistent dimensions, e.g. an intrinsic volume index above the flat dimension."""


class QuadratureNonConvergence(KFlatsError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class InsufficientData(KFlatsError, ValueError):
    """Too few samples, or too few accumulated orders, for the requested estimate."""


class DegenerateVariance(KFlatsError, ValueError):
    """A sample variance needed for normalization is zero."""


class BudgetExceeded(KFlatsError, RuntimeError):
    """Projected simulation workload exceeds the configured cap."""
