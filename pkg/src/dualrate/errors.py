"""Exception types shared across the package."""


class DualRateError(Exception):
    """Base class for all library-specific errors."""


class AsymmetricMatrix(DualRateError):
    """Adjacency matrix is not symmetric."""


class SelfLoop(DualRateError):
    """Adjacency matrix has a nonzero diagonal entry (or an edge i-i)."""


class IsolatedVertex(DualRateError):
    """Some vertex has degree zero, so the degree matrix is singular."""


class EigensolverNoConvergence(DualRateError):
    """Jacobi sweeps exceeded the iteration cap without converging."""


class RootSolverNoConvergence(DualRateError):
    """Polynomial root iteration failed to meet the residual bound."""


class NotConverged(DualRateError):
    """A simulated trace never settled below the threshold within its horizon."""

    def __init__(self, message: str, N: int | None = None, horizon: int | None = None):
        super().__init__(message)
        self.N = N
        self.horizon = horizon


class OutOfRegime(DualRateError):
    """Closed-form expression requested outside the regime where it is valid."""


class DimensionMismatch(DualRateError):
    """Spectrum and trace refer to different agent counts."""


class NoFiniteMinimum(DualRateError):
    """The mode's decay rate has no finite minimizing sampling ratio."""
