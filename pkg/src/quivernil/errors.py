"""Exception hierarchy.  Undecided flag searches are values, not errors."""


class QuiverNilError(Exception):
    """Base class for every error raised by the package."""


class UnsupportedInputError(QuiverNilError, ValueError):
    pass


class DimensionVectorError(QuiverNilError, ValueError):
    pass


class ClassificationError(QuiverNilError, ValueError):
    pass


class ShapeError(QuiverNilError, ValueError):
    pass


class NotAperiodicError(QuiverNilError, ValueError):
    def __init__(self, message: str, period_length: int | None = None):
        super().__init__(message)
        self.period_length = period_length


class BudgetExceeded(QuiverNilError):
    def __init__(self, required: int, budget: int, what: str = "points"):
        super().__init__(f"refusing: needs {required} {what}, budget is {budget}")
        self.required = required
        self.budget = budget


class InternalConsistencyError(QuiverNilError, AssertionError):
    """A computed structure disagrees with a table it must reproduce."""
