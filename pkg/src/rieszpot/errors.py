"""Shared exception types."""


class DimensionError(ValueError):
    """Ambient dimension is unsupported or inconsistent between arguments."""


class SingularityError(ValueError):
    """A kernel or transform was evaluated at a point where it blows up."""
