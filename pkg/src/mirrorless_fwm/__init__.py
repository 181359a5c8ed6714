"""Stationary resonant four-wave mixing in double-Lambda media.

Atomic response, field propagation, the analytic equal-pump solution with
its mirrorless-oscillation threshold, and a shooting solver for the general
boundary-value problem.
"""

from .analytic import (
    THRESHOLD,
    AnalyticSolution,
    PhaseCheck,
    field_profiles,
    is_above_threshold,
    kl_for_epsilon,
    output_residual,
    phase_consistency_check,
    solve_output_amplitude,
    theta_profile,
    third_order_epsilon,
)
from .atomic import (
    AtomicAmplitudes,
    Channel,
    Coherences,
    coherences,
    exact_coherences,
    exact_pump_rate,
    exact_steady_state,
    leading_order_amplitudes,
    pump_rate,
)
from .elliptic import complete_K, incomplete_F
from .errors import (
    ConvergenceError,
    DegenerateDenominatorError,
    EllipticDomainError,
    IntegrationError,
    InversionError,
    PhaseSingularityError,
    SingularDenominatorError,
    SingularMatrixError,
)
from .propagation import (
    ConservedSet,
    Trajectory,
    conserved_set,
    integrate,
    rhs_amplitude_phase,
    rhs_cartesian,
)
from .shooting import (
    BoundaryConditions,
    BVPSolution,
    ShootingGuess,
    SolverReport,
    integrate_ivp,
    shooting_residual,
    solve_bvp,
)
from .state import AmplitudePhaseState, FieldState, MediumParams

__all__ = [name for name in dir() if not name.startswith("_")]
