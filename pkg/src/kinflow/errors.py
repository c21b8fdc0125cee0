"""Exception hierarchy."""

from __future__ import annotations


class KinflowError(Exception):
    pass


class ConfigurationError(KinflowError, ValueError):
    """Invalid grid, scenario or config parameters."""


class StabilityError(KinflowError):
    """The Richardson sufficient condition NOR < 1 does not hold."""

    def __init__(self, message: str, nor: float, worst_node: tuple[int, int] | None = None):
        super().__init__(message)
        self.nor = nor
        self.worst_node = worst_node


class ConvergenceError(KinflowError, RuntimeError):
    """An iteration hit its cap before reaching tolerance.

    ``step`` is filled in by the time loop when the failure happens inside
    a run, so callers can report which time level broke.
    """

    def __init__(self, message: str, kind: str, last_value: float, step: int | None = None):
        super().__init__(message)
        self.kind = kind
        self.last_value = last_value
        self.step = step

    def __str__(self) -> str:
        base = super().__str__()
        if self.step is None:
            return base
        return f"step {self.step}: {base}"
