"""Exception types shared across the package."""


class PitchmarksError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PitchmarksError, ValueError):
    """An argument violates a documented precondition."""


class FitError(PitchmarksError, ValueError):
    """A model fit is degenerate; callers usually treat the cost as +inf."""


class DatasetError(PitchmarksError, ValueError):
    """A dataset item is missing or malformed."""


class RenderError(PitchmarksError, ValueError):
    """A synthetic scene cannot be rendered (e.g. degenerate camera)."""
