"""Exception types raised by the library."""


class DegenerateDenominatorError(ValueError):
    """|Omega1|^2 + |E1|^2 vanished, so the atomic response is undefined."""


class SingularDenominatorError(ValueError):
    """The dark-state point Omega1*Omega2 = E1*E2 was hit."""


class SingularMatrixError(ArithmeticError):
    """The steady-state linear system could not be solved reliably."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PhaseSingularityError(ValueError):
    """The relative-phase derivative was requested where an amplitude is zero."""


class EllipticDomainError(ValueError):
    """Parameter or amplitude outside the domain of the elliptic integral."""


class InversionError(RuntimeError):
    """Root-finding on the incomplete elliptic integral did not converge."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class IntegrationError(RuntimeError):
    """The propagation integrator met a degenerate state mid-run."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ConvergenceError(RuntimeError):
    """The shooting solver failed to converge from every seed."""

    def __init__(self, message, best_residual=None, seeds=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.seeds = seeds or []
