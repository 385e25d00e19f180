"""Exceptions shared across modules."""


class BudgetExceededError(RuntimeError):
    """An exact/enumerative operation was asked for more states than its cap."""
