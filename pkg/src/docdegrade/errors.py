"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat
and the meanings disjoint.
"""


class FormatError(ValueError):
    """An input file (PBM, TIFF, recipe/spec JSON, CSV) could not be parsed."""


class UnsupportedTiffFeature(FormatError):
    """A structurally valid TIFF uses a feature outside the uncompressed
    bi-level baseline subset (compression, tiling, extra samples, ...)."""


class InsufficientDataError(ValueError):
    """Fewer regression rows than model parameters."""


class DegenerateDesignError(ValueError):
    """The regression design matrix is rank-deficient."""


class LayoutError(ValueError):
    """A synthetic page spec cannot fit its glyph grid on the page."""
