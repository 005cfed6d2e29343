class GreenTransitionError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GreenTransitionError, ValueError):
    """An argument lies outside the domain of the function being evaluated."""


class PreconditionError(GreenTransitionError, ValueError):
    """A documented precondition of an analysis does not hold."""


class ScenarioError(GreenTransitionError, ValueError):
    """A scenario document failed to parse or validate.

    Collects every problem found rather than stopping at the first one.
    """

    def __init__(self, errors: list[str]) -> None:
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid scenario")


class PolicyInfeasibleError(GreenTransitionError):
    """No admissible tax rate drives the economy to the green steady state."""

    def __init__(self, message: str, stalled_at: float, last_rate: float) -> None:
        self.stalled_at = stalled_at
        self.last_rate = last_rate
        super().__init__(message)


class SolverError(GreenTransitionError, RuntimeError):
    """A numerical solver failed to bracket or converge."""
