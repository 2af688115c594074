"""Exception types shared across the package."""


class PuzzleError(Exception):
    """Base class for all reassembly errors."""


class FormatError(PuzzleError):
    """A document does not conform to one of the JSON schemas."""


class DomainError(PuzzleError):
    """An argument is outside its valid domain."""


class ConfigError(PuzzleError):
    """An operation was requested with an unusable configuration."""


class MetricError(PuzzleError):
    """Fragments being compared are incompatible."""


class BudgetError(PuzzleError):
    """Predicted graph size exceeds the configured node budget."""

    def __init__(self, predicted_nodes: int, budget: int):
        self.predicted_nodes = predicted_nodes
        self.budget = budget
        super().__init__(
            f"graph would need {predicted_nodes} nodes, over the budget of {budget}; "
            f"raise the budget or increase the cut threshold"
        )


class InfeasibleError(PuzzleError):
    """No complete path survives the current cut threshold.

    ``suggested_theta`` is the largest threshold known to keep at least one
    complete path alive (the minimum edge probability along the uncut
    optimum), or None when the graph is infeasible even without cuts.
    """

    def __init__(self, message: str, suggested_theta: float | None = None):
        self.suggested_theta = suggested_theta
        if suggested_theta is not None:
            message += f" (feasible again at theta <= {suggested_theta:.6g})"
        super().__init__(message)
