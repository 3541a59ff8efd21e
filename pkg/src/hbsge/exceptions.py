"""Exception types raised across the package."""


class HBSGEError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(HBSGEError, ValueError):
    pass


class NotPositiveDefinite(HBSGEError, ValueError):
    pass


class UnsupportedSize(HBSGEError, ValueError):
    pass


class InvalidKappa(HBSGEError, ValueError):
    pass


class UnknownMethod(HBSGEError, ValueError):
    pass
