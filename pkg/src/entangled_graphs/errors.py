"""Exception types shared across the package."""


class ZeroVarianceColumn(ValueError):
    """A time-series column is constant, so its correlation is undefined."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"time-series column {index} has zero variance")


class InvalidConfig(ValueError):
    """A configuration value is outside its allowed range."""


class EigenFailure(RuntimeError):
    """The symmetric eigensolver did not converge."""


class DegenerateDenominator(ArithmeticError):
    """The closed-form importance approximation is undefined (n == component count)."""


class ECNoConvergence(RuntimeError):
    """Power iteration failed to reach tolerance."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"eigenvector centrality did not converge in {iterations} iterations")


class EmptyGraph(ValueError):
    """Operation requires at least one edge."""


class NoNegatives(ValueError):
    """A module spans the whole graph, leaving no negative samples."""


class ShapeMismatch(ValueError):
    """Array shapes are inconsistent with the parameters."""


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
