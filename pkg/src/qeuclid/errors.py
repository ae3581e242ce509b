"""Shared exception types."""


class BoundaryDecayError(ValueError):
    """A sampled function carries too much mass at the grid boundary."""


class GridMismatchError(ValueError):
    """Two grid-sampled objects live on incompatible grids."""


class FactorizationError(RuntimeError):
    """A dense factorization (SVD) failed to converge."""
