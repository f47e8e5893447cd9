"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user-supplied data (bad dimension, out-of-range value, ...)."""


class CapacityError(RuntimeError):
    """An exact routine was asked to handle more points than its budget."""

    def __init__(self, message: str, budget: int | None = None):
        super().__init__(message)
        self.budget = budget
