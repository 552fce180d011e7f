"""Exception types raised by the awbtree package."""


class AwbTreeError(Exception):
    """Base class for all awbtree errors."""


class InvalidChromaticity(AwbTreeError):
    """A color triple cannot be normalized onto the unit simplex."""


class DegenerateEstimate(AwbTreeError):
    """An illuminant estimate has a channel too small to divide by."""


class EmptySet(AwbTreeError):
    """An operation that needs at least one element received none."""


class DimensionError(AwbTreeError):
    """A feature vector does not match the trained dimensionality."""


class IoError(AwbTreeError):
    """A file could not be read or has an unsupported format."""


class EmptyImage(AwbTreeError):
    """Every pixel of an image is masked out."""


class InvalidPlan(AwbTreeError):
    """A cross-validation plan cannot be applied to the dataset."""
