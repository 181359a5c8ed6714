"""Closed-form solution for equal pump inputs.

With a1(0) = a2(L) = a10 and the relative phase held at pi/2, the four
amplitudes collapse onto the output amplitude e and a mixing angle theta(z):

    e1 = e sin(theta),  a1 = sqrt(a10^2 - e^2 sin^2 theta)
    e2 = e cos(theta),  a2 = sqrt(a10^2 - e^2 cos^2 theta)

with dtheta/dz = (kappa/delta) sqrt(1 - eps^2 + eps^4 sin^2(2 theta) / 4),
theta(0) = 0 and theta(L) = pi/2.  Integrating once gives

    K(eps^4 / (4 (eps^2 - 1))) = (kappa L / delta) sqrt(1 - eps^2).

All amplitudes here are in units of a10.  Internally the output amplitude is
tracked through ``gap = 1 - eps^2`` so that deep conversion (gap ~ 1e-20)
keeps full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .elliptic import complete_K, incomplete_F
from .errors import EllipticDomainError, InversionError
from .propagation import amplitude_phase_arrays
from .state import AmplitudePhaseState, MediumParams

THRESHOLD = 0.5 * math.pi

# smallest representable gap 1 - eps^2 the root search will reach
_LOG_GAP_MIN = -700.0


def is_above_threshold(kl_over_delta: float) -> bool:
    """True when kappa*L/delta exceeds pi/2, i.e. a non-trivial solution exists."""
    if kl_over_delta < 0:
        raise ValueError("kappa*L/delta must be non-negative")
    return kl_over_delta > THRESHOLD


def _parameter(gap: float) -> float:
    # eps^4 / (4 (eps^2 - 1)) written in terms of gap = 1 - eps^2
    return -((1.0 - gap) ** 2) / (4.0 * gap)


def _gap_of(epsilon) -> float:
    if isinstance(epsilon, AnalyticSolution):
        if epsilon.gap == 0.0:
            raise EllipticDomainError("profile undefined at complete conversion")
        return epsilon.gap
    eps = float(epsilon)
    if not 0.0 <= eps < 1.0:
        raise EllipticDomainError(f"epsilon must lie in [0, 1), got {eps}")
    return (1.0 - eps) * (1.0 + eps)


def _epsilon_of(epsilon) -> float:
    if isinstance(epsilon, AnalyticSolution):
        return epsilon.epsilon
    return float(epsilon)


def kl_for_epsilon(epsilon) -> float:
    """Interaction strength kappa*L/delta whose output amplitude is ``epsilon``."""
    gap = _gap_of(epsilon)
    return complete_K(_parameter(gap)) / math.sqrt(gap)


def output_residual(epsilon, kl_over_delta: float) -> float:
    """K(m(eps)) - (kappa L / delta) sqrt(1 - eps^2); zero at the output amplitude."""
    gap = epsilon.gap if isinstance(epsilon, AnalyticSolution) else _gap_of(epsilon)
    if gap == 0.0:
        # both sides vanish in the complete-conversion limit
        return 0.0
    return complete_K(_parameter(gap)) - kl_over_delta * math.sqrt(gap)


@dataclass(frozen=True)
class AnalyticSolution:
    """Output amplitude of the equal-pump problem and its mixing-angle map."""

    epsilon: float
    gap: float
    kl_over_delta: float

    @classmethod
    def from_epsilon(cls, epsilon: float) -> "AnalyticSolution":
        """Solution for a prescribed output amplitude, with kappa*L/delta implied."""
        gap = _gap_of(epsilon)
        return cls(epsilon=float(epsilon), gap=gap, kl_over_delta=kl_for_epsilon(epsilon))

    @property
    def epsilon_squared(self) -> float:
        return 1.0 - self.gap

    def residual(self) -> float:
        return output_residual(self, self.kl_over_delta)

    def params(self, **kwargs) -> MediumParams:
        return MediumParams.from_kl(self.kl_over_delta, **kwargs)

    def theta(self, z_over_l: float) -> float:
        """Mixing angle at the fractional position z/L."""
        return _invert(self.gap, z_over_l * self.kl_over_delta)

    def amplitudes(self, z_over_l) -> np.ndarray:
        """(theta, e1, e2, a1, a2) at each fractional position, shape (5, n)."""
        zs = np.atleast_1d(np.asarray(z_over_l, dtype=float))
        theta = np.array([self.theta(z) for z in zs])
        return np.vstack([theta, *_amplitudes(self.epsilon, theta)])


def solve_output_amplitude(kl_over_delta: float) -> AnalyticSolution | None:
    """Output amplitude for a given kappa*L/delta, or None at or below threshold.

    Root-finding runs on t = ln(1 - eps^2), where the residual divided by
    sqrt(1 - eps^2) is monotone, so the bracket [ln gap_min, 0] is always
    valid above threshold.
    """
    if kl_over_delta <= 0:
        raise ValueError("kappa*L/delta must be positive")
    if not is_above_threshold(kl_over_delta):
        return None

    def g(t):
        gap = math.exp(t)
        return complete_K(_parameter(gap)) / math.sqrt(gap) - kl_over_delta

    if g(_LOG_GAP_MIN) <= 0:
        # conversion is complete to double precision
        return AnalyticSolution(epsilon=1.0, gap=0.0, kl_over_delta=kl_over_delta)
    t = brentq(g, _LOG_GAP_MIN, 0.0, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    gap = math.exp(t)
    eps = math.sqrt(-math.expm1(t))
    return AnalyticSolution(epsilon=eps, gap=gap, kl_over_delta=kl_over_delta)


def third_order_epsilon(kl_over_delta: float) -> float:
    """Small-conversion approximation sqrt(2) [1 - (pi/2) delta/(kappa L)]^(1/2)."""
    if kl_over_delta < THRESHOLD:
        raise EllipticDomainError("third-order amplitude is only defined above threshold")
    return math.sqrt(2.0) * math.sqrt(1.0 - THRESHOLD / kl_over_delta)


def _reduced_length(gap: float, theta: float) -> float:
    """kappa z / delta reached at mixing angle theta, for any theta >= 0."""
    if gap == 1.0:
        return theta
    m = _parameter(gap)
    k = complete_K(m)
    u = 2.0 * theta
    n, rem = divmod(u, math.pi)
    if rem <= 0.5 * math.pi:
        f = 2.0 * n * k + incomplete_F(rem, m)
    else:
        f = 2.0 * (n + 1) * k - incomplete_F(math.pi - rem, m)
    return f / (2.0 * math.sqrt(gap))


def _invert(gap: float, kz: float) -> float:
    if kz < 0:
        raise ValueError("position must be non-negative")
    if kz == 0.0:
        return 0.0
    if gap == 1.0:
        return kz
    hi = 0.5 * math.pi
    while _reduced_length(gap, hi) < kz:
        hi *= 2.0
        if hi > 1e6:
            raise InversionError("mixing angle diverged", bracket=(0.0, hi))
    try:
        return brentq(lambda t: _reduced_length(gap, t) - kz, 0.0, hi, xtol=1e-15, rtol=1e-15)
    except (ValueError, RuntimeError) as exc:
        raise InversionError(f"mixing-angle inversion failed: {exc}", bracket=(0.0, hi)) from exc


def theta_profile(epsilon, params: MediumParams, z: float) -> float:
    """Mixing angle theta(z) for output amplitude ``epsilon``.

    ``epsilon`` may be an :class:`AnalyticSolution` or a bare amplitude;
    the map only needs kappa/delta from ``params``.
    """
    if not 0.0 <= z <= params.length * (1 + 1e-12):
        raise ValueError(f"z = {z} outside [0, L]")
    return _invert(_gap_of(epsilon), z * params.coupling)


def _amplitudes(epsilon: float, theta):
    s, c = np.sin(theta), np.cos(theta)
    e1, e2 = epsilon * s, epsilon * c
    r1, r2 = 1.0 - e1 * e1, 1.0 - e2 * e2
    assert np.all(r1 >= 0) and np.all(r2 >= 0), "negative radicand"
    return e1, e2, np.sqrt(r1), np.sqrt(r2)


def field_profiles(epsilon, params: MediumParams, z: float) -> AmplitudePhaseState:
    """Amplitudes (e1, e2, a1, a2) at position z, with psi = pi/2."""
    theta = theta_profile(epsilon, params, z)
    e1, e2, a1, a2 = _amplitudes(_epsilon_of(epsilon), theta)
    return AmplitudePhaseState(e1=float(e1), e2=float(e2), a1=float(a1), a2=float(a2))


@dataclass
class PhaseCheck:
    """Relative phase and stretched coordinate along the analytic solution."""

    epsilon: float
    z_over_l: np.ndarray
    psi: np.ndarray
    xi_over_l: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.xi_over_l - self.z_over_l)))


def phase_consistency_check(
    epsilon,
    params: MediumParams | None = None,
    n_steps: int = 1000,
    offset: float = 1e-6,
    ac_stark: bool = True,
    rtol: float = 1e-10,
) -> PhaseCheck:
    """Integrate the relative-phase equation along the analytic amplitudes.

    Starts from psi = pi/2 at z = offset*L and accumulates
    xi(z) = z0 + int sin(psi) dz.  The cell length is the one implied by
    ``epsilon``; ``params`` supplies kappa, delta and delta_k only.

    The integration runs in theta, where dz/dtheta is explicit and no
    inversion is needed inside the right-hand side.
    """
    eps = _epsilon_of(epsilon)
    if not 0.0 < eps < 1.0:
        raise EllipticDomainError("phase check needs 0 < epsilon < 1")
    gap = _gap_of(epsilon)
    base = params or MediumParams()
    kl = kl_for_epsilon(epsilon)
    length = kl / base.coupling
    p = MediumParams(kappa=base.kappa, delta=base.delta, delta_k=base.delta_k, length=length)
    z_unit = 1.0 / p.coupling
    q = 0.25 * eps**4

    def dz_dtheta(theta):
        return z_unit / math.sqrt(gap + q * math.sin(2.0 * theta) ** 2)

    def rhs(theta, y):
        psi = y[0]
        e1, e2, a1, a2 = _amplitudes(eps, theta)
        dpsi = amplitude_phase_arrays(e1, e2, a1, a2, psi, p, ac_stark)[4]
        jac = dz_dtheta(theta)
        return [dpsi * jac, math.sin(psi) * jac]

    z_frac = np.linspace(offset, 1.0 - offset, n_steps + 1)
    thetas = np.array([_invert(gap, zf * kl) for zf in z_frac])
    z0 = offset * length
    sol = solve_ivp(
        rhs,
        (thetas[0], thetas[-1]),
        [0.5 * math.pi, z0],
        method="LSODA",
        t_eval=thetas,
        rtol=rtol,
        atol=1e-12,
    )
    if not sol.success:
        raise InversionError(f"phase integration failed: {sol.message}")
    psi, xi = sol.y
    return PhaseCheck(epsilon=eps, z_over_l=z_frac, psi=psi, xi_over_l=xi / length)
