class InvalidInputError(ValueError):
    """Raised when an input vector, record or argument violates its contract."""
