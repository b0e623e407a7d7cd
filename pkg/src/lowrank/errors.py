"""Exception types shared across the package."""


class DecompositionError(RuntimeError):
    """A matrix factorization backend failed to converge."""


class NonConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularSystemError(RuntimeError):
    """A linear system that must be invertible turned out rank-deficient."""


class InfeasibleError(RuntimeError):
    """The affine constraints A(X) = b admit no solution within tolerance."""
