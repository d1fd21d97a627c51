"""Exception types shared across the package."""


class RlsBiasError(Exception):
    """Base class for all package-specific failures."""


class NotSymmetricError(RlsBiasError):
    """Input matrix is not symmetric within tolerance."""


class NotPSDError(RlsBiasError):
    """Symmetric matrix has a significantly negative eigenvalue."""


class NotSPDError(RlsBiasError):
    """Matrix is not symmetric positive definite (factorization hit a
    non-positive pivot)."""


class RankDeficientError(RlsBiasError):
    """Gram matrix is singular within tolerance; an unregularized solve
    is not available."""


class EigenConvergenceError(RlsBiasError):
    """Iterative eigensolver failed to converge within its sweep cap.

    Carries the final off-diagonal residual for diagnosis.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotPersistentlyExcitingError(RlsBiasError):
    """Average excitation matrix is singular; asymptotic predictions are
    undefined."""


class SimulationDivergenceError(RlsBiasError):
    """Simulated output exceeded the divergence guard (unstable model).

    Carries the step index at which the guard tripped.
    """

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class ConfigError(RlsBiasError):
    """Invalid scenario or run configuration."""
