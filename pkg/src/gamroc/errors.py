"""Package exception types."""


class OneClassError(ValueError):
    """Raised when a binary operation receives labels from a single class."""


class StepRangeError(ValueError):
    """Raised when a boosting step index is outside the recorded trajectory."""
