"""Exception types shared across the package."""


class WayclearError(Exception):
    """Base class for all package-specific errors."""


class RasterDecodeError(WayclearError):
    """Raised when raster bytes cannot be decoded as required."""


class DimensionMismatchError(WayclearError):
    """Raised when rasters that must share dimensions do not."""


class WeightsError(WayclearError):
    """Raised when a weight container is missing, malformed or inconsistent."""


class UndefinedMetricError(WayclearError):
    """Raised when a metric has no defined value (e.g. zero denominator)."""


class NotNormalizableError(WayclearError):
    """Raised when a duration series cannot be min-max normalized."""


class StudyError(WayclearError):
    """Raised on invalid study plans, sessions or trial submissions."""
