class ValidationError(ValueError):
    """Bad input: malformed file, out-of-range parameter, empty data bin."""


class NumericalError(ArithmeticError):
    """A computation has no meaningful result for otherwise valid input."""
