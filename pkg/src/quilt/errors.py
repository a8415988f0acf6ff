"""Exception types shared across the package."""


class QuiltError(Exception):
    """Base class for every error this package raises on purpose."""


class UnsupportedFormatError(QuiltError):
    """File is not one of the supported image formats."""


class CorruptDataError(QuiltError):
    """Image stream is truncated or structurally invalid."""


class OutOfBoundsError(QuiltError):
    """A requested region falls outside its image."""


class InvalidConfigError(QuiltError):
    """Configuration violates one of its invariants."""


class SourceTooSmallError(QuiltError):
    """Source image admits no valid patch position."""


class EmptySurfaceError(QuiltError):
    """Error surface has zero size."""


class SpecMismatchError(QuiltError):
    """Supplied seam surfaces do not match the overlap kind."""


class DimensionMismatchError(QuiltError):
    """Images that must share dimensions do not."""


class EmptyImageError(QuiltError):
    """Operation needs at least one pixel."""


class EmptyListError(QuiltError):
    """Operation needs at least one input image."""


class ManifestError(QuiltError):
    """Comparison manifest is malformed or references unusable files."""
