"""Stationary propagation equations for the four fields.

The propagation vector is ``y = (E1, E2*, Omega1, Omega2*)``: the
counter-propagating fields are stored conjugated so that all four components
evolve under d/dz with the equations in their natural form.  Every array
function accepts a leading axis of length 4 followed by arbitrary batch axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .atomic import coherence_terms
from .errors import DegenerateDenominatorError, IntegrationError, PhaseSingularityError
from .state import AmplitudePhaseState, FieldState, MediumParams

#: integration steps per unit of kappa*z/delta for the reference integrator
STEPS_PER_UNIT = 1000

TRAJECTORY_HEADER = (
    "z,kz_over_delta,re_E1,im_E1,re_E2,im_E2,re_O1,im_O1,re_O2,im_O2,c1,c2,c3,c4,q"
)


def _as_vector(fields) -> np.ndarray:
    if isinstance(fields, FieldState):
        return fields.to_vector()
    return np.asarray(fields, dtype=complex)


def field_derivatives(y: np.ndarray, params: MediumParams, ac_stark: bool = True) -> np.ndarray:
    """d/dz of the propagation vector, vectorised over trailing axes.

    Parameters
    ----------
    y : ndarray, shape (4, ...)
        (E1, E2*, Omega1, Omega2*).
    params : MediumParams
    ac_stark : bool
        Keep the self-phase (ac-Stark) terms.  Without them the relative
        phase stays pinned and the quartic Re[Omega1 Omega2 E1* E2*] is
        conserved exactly.
    """
    e1, e2c, o1, o2c = y
    norm = np.abs(o1) ** 2 + np.abs(e1) ** 2
    if np.any(norm <= 0):
        raise DegenerateDenominatorError("|Omega1|^2 + |E1|^2 vanished")
    coupling, stark = coherence_terms(o1, np.conj(o2c), e1, np.conj(e2c), params.delta)
    if ac_stark:
        rho = [c + s for c, s in zip(coupling, stark)]
    else:
        rho = list(coupling)
    rho_a1b1, rho_a1b2, rho_a2b1, rho_a2b2 = rho
    ik = 1j * params.kappa
    out = np.empty(np.shape(y), dtype=complex)
    out[0] = ik * rho_a1b1 - 1j * params.delta_k * e1
    out[1] = ik * np.conj(rho_a2b2)
    out[2] = ik * rho_a1b2
    out[3] = ik * np.conj(rho_a2b1)
    return out


def rhs_cartesian(
    z: float, fields: FieldState, params: MediumParams, ac_stark: bool = True
) -> FieldState:
    """Spatial derivatives of (Omega1, Omega2, E1, E2) at one position.

    The returned state holds dOmega1/dz, dOmega2/dz, dE1/dz and dE2/dz.  The
    backward-travelling fields obey their equations through the conjugates;
    use :func:`field_derivatives` for the raw (E1, E2*, Omega1, Omega2*) form.
    ``z`` is accepted for integrator compatibility; the equations are
    autonomous.
    """
    if fields.pump_norm <= 0:
        raise DegenerateDenominatorError("|Omega1|^2 + |E1|^2 vanished")
    dy = field_derivatives(fields.to_vector(), params, ac_stark)
    return FieldState(
        omega1=complex(dy[2]),
        omega2=complex(np.conj(dy[3])),
        e1=complex(dy[0]),
        e2=complex(np.conj(dy[1])),
    )


def polar_derivatives(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Polar decomposition of a Cartesian derivative.

    Returns d/dz of (e1, e2, a1, a2, psi) where E_n = e_n exp(-i phi_n),
    Omega_n = a_n exp(-i psi_n) and psi = phi1 + phi2 - psi1 - psi2.
    """
    e1, e2c, o1, o2c = y
    de1, de2c, do1, do2c = dy
    amp = [np.abs(v) for v in (e1, e2c, o1, o2c)]
    damp = [np.real(np.conj(v) * dv) / a for v, dv, a in zip((e1, e2c, o1, o2c), dy, amp)]
    dphi1 = -np.imag(de1 / e1)
    dphi2 = np.imag(de2c / e2c)
    dpsi1 = -np.imag(do1 / o1)
    dpsi2 = np.imag(do2c / o2c)
    return np.array([*damp, dphi1 + dphi2 - dpsi1 - dpsi2])


def amplitude_phase_arrays(e1, e2, a1, a2, psi, params: MediumParams, ac_stark: bool = True):
    """Array form of :func:`rhs_amplitude_phase` returning (de1, de2, da1, da2, dpsi)."""
    g = params.coupling
    s = a1 * a1 + e1 * e1
    sin, cos = np.sin(psi), np.cos(psi)
    de1 = g * a1 * a2 * e2 / s * sin
    de2 = -g * a1 * a2 * e1 / s * sin
    da1 = -g * a2 * e1 * e2 / s * sin
    da2 = g * a1 * e1 * e2 / s * sin
    with np.errstate(divide="ignore", invalid="ignore"):
        bracket = (
            a1 * a2 * e2 / e1 - a1 * a2 * e1 / e2 - a2 * e1 * e2 / a1 + a1 * e1 * e2 / a2
        ) / s
    dpsi = g * bracket * cos + params.delta_k
    if ac_stark:
        dpsi = dpsi + g * (a2 * a2 - e2 * e2 + e1 * e1 - a1 * a1) / s
    return de1, de2, da1, da2, dpsi


def rhs_amplitude_phase(
    state: AmplitudePhaseState,
    params: MediumParams,
    ac_stark: bool = True,
    with_phase: bool = True,
) -> np.ndarray:
    """Derivatives (de1/dz, de2/dz, da1/dz, da2/dz, dpsi/dz).

    e2 and a1 decrease where the interaction converts pump into signal, so
    their derivatives carry the minus sign.  With ``with_phase=False`` the
    psi entry is NaN and zero amplitudes are allowed.
    """
    # numpy scalars so a zero amplitude yields inf in the unused phase bracket
    e1, e2, a1, a2, psi = (
        np.float64(v) for v in (state.e1, state.e2, state.a1, state.a2, state.psi)
    )
    if a1 * a1 + e1 * e1 <= 0:
        raise DegenerateDenominatorError("a1^2 + e1^2 vanished")
    if with_phase and min(e1, e2, a1, a2) <= 0:
        raise PhaseSingularityError(
            "relative phase is undefined where an amplitude vanishes"
        )
    de1, de2, da1, da2, dpsi = amplitude_phase_arrays(e1, e2, a1, a2, psi, params, ac_stark)
    if not with_phase:
        dpsi = math.nan
    return np.array([de1, de2, da1, da2, dpsi], dtype=float)


@dataclass(frozen=True)
class ConservedSet:
    """Manley-Rowe invariants c1..c4 and the quartic q = Re[Omega1 Omega2 E1* E2*]."""

    c1: float
    c2: float
    c3: float
    c4: float
    q: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4, self.q])


def conserved_arrays(y: np.ndarray) -> np.ndarray:
    """(c1, c2, c3, c4, q) for a propagation vector, shape (5, ...)."""
    e1, e2c, o1, o2c = y
    ae1, ae2, ao1, ao2 = (np.abs(v) ** 2 for v in (e1, e2c, o1, o2c))
    q = np.real(o1 * np.conj(o2c) * np.conj(e1) * e2c)
    return np.array([ao1 + ae1, ao2 + ae2, ao1 + ao2, ae1 + ae2, q])


def conserved_set(fields: FieldState) -> ConservedSet:
    return ConservedSet(*(float(v) for v in conserved_arrays(fields.to_vector())))


@dataclass
class Trajectory:
    """Sampled solution of the propagation equations.

    ``y`` has shape (n + 1, 4) holding (E1, E2*, Omega1, Omega2*) at each
    position; ``conserved`` has shape (n + 1, 5).
    """

    z: np.ndarray
    y: np.ndarray
    params: MediumParams
    conserved: np.ndarray
    error_estimate: float | None = None

    @property
    def e1(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def e2(self) -> np.ndarray:
        return np.conj(self.y[:, 1])

    @property
    def omega1(self) -> np.ndarray:
        return self.y[:, 2]

    @property
    def omega2(self) -> np.ndarray:
        return np.conj(self.y[:, 3])

    def state_at(self, index: int) -> FieldState:
        return FieldState.from_vector(self.y[index])

    @property
    def final(self) -> FieldState:
        return self.state_at(-1)

    def max_relative_drift(self) -> np.ndarray:
        """Largest relative excursion of c1, c2, c3 from their initial values."""
        c0 = self.conserved[0, :3]
        return np.max(np.abs(self.conserved[:, :3] - c0), axis=0) / np.abs(c0)

    def rows(self):
        kz = self.z * self.params.coupling
        for z, k, y, c in zip(self.z, kz, self.y, self.conserved):
            e1, e2, o1, o2 = y[0], np.conj(y[1]), y[2], np.conj(y[3])
            yield (
                z, k, e1.real, e1.imag, e2.real, e2.imag,
                o1.real, o1.imag, o2.real, o2.imag, *c,
            )


def stiffness(y: np.ndarray) -> float:
    """(|Omega2|^2 + |E2|^2) / (|Omega1|^2 + |E1|^2), floored at one.

    Local rates of the equations are bounded by kappa/delta times this
    ratio.  Both sums are constants of motion, so the ratio fixed at z = 0
    holds along the whole trajectory.
    """
    e1, e2c, o1, o2c = np.asarray(y)[:4]
    c1 = np.abs(o1) ** 2 + np.abs(e1) ** 2
    c2 = np.abs(o2c) ** 2 + np.abs(e2c) ** 2
    if np.any(c1 <= 0):
        return 1.0
    return float(max(1.0, np.max(c2 / c1)))


def n_steps_for(
    params: MediumParams, steps_per_unit: int = STEPS_PER_UNIT, stiffness: float = 1.0
) -> int:
    """Step count giving ``steps_per_unit`` steps per unit of kappa*z/delta,
    refined by the stiffness ratio of the initial state."""
    return max(1, math.ceil(steps_per_unit * params.kl_over_delta * stiffness - 1e-9))


@numba.njit(cache=True)
def _derivs(y, out, kappa, delta, delta_k, stark):
    # scalar transcription of field_derivatives for one state
    e1, e2c, o1, o2c = y[0], y[1], y[2], y[3]
    e2 = e2c.conjugate()
    o2 = o2c.conjugate()
    o1c = o1.conjugate()
    e1c = e1.conjugate()
    ao1 = o1.real * o1.real + o1.imag * o1.imag
    ao2 = o2.real * o2.real + o2.imag * o2.imag
    ae1 = e1.real * e1.real + e1.imag * e1.imag
    ae2 = e2.real * e2.real + e2.imag * e2.imag
    s = ao1 + ae1
    if s <= 0.0:
        return False
    den = delta * s * s
    ds = delta * s
    r11 = -(ao1 * o1 * o2 * e2c - e1 * e1 * e2 * o1c * o2c) / den
    r12 = (o1 * o1 * o2 * e1c * e2c - ae1 * e1 * e2 * o2c) / den
    r21 = -e1 * e2 * o1c / ds
    r22 = -o1 * o2 * e1c / ds
    if stark:
        r11 += -ao1 * (ao2 - ae2) * e1 / den
        r12 += ae1 * (ao2 - ae2) * o1 / den
        r21 += ao1 * o2 / ds
        r22 += ae1 * e2 / ds
    ik = 1j * kappa
    out[0] = ik * r11 - 1j * delta_k * e1
    out[1] = ik * r22.conjugate()
    out[2] = ik * r12
    out[3] = ik * r21.conjugate()
    return True


@numba.njit(cache=True)
def _rk4_kernel(y, kappa, delta, delta_k, length, n_steps, stark, path):
    """Advance every column of y (shape (4, B)) in place to z = L.

    Fills ``path`` when it is non-empty.  Returns the index of the first
    step hitting a vanishing pump norm, or -1.
    """
    h = length / n_steps
    nb = y.shape[1]
    keep = path.shape[0] > 0
    k1 = np.empty(4, np.complex128)
    k2 = np.empty(4, np.complex128)
    k3 = np.empty(4, np.complex128)
    k4 = np.empty(4, np.complex128)
    tmp = np.empty(4, np.complex128)
    cur = np.empty(4, np.complex128)
    if keep:
        path[0] = y
    for i in range(n_steps):
        for b in range(nb):
            for j in range(4):
                cur[j] = y[j, b]
            if not _derivs(cur, k1, kappa, delta, delta_k, stark):
                return i
            for j in range(4):
                tmp[j] = cur[j] + 0.5 * h * k1[j]
            if not _derivs(tmp, k2, kappa, delta, delta_k, stark):
                return i
            for j in range(4):
                tmp[j] = cur[j] + 0.5 * h * k2[j]
            if not _derivs(tmp, k3, kappa, delta, delta_k, stark):
                return i
            for j in range(4):
                tmp[j] = cur[j] + h * k3[j]
            if not _derivs(tmp, k4, kappa, delta, delta_k, stark):
                return i
            for j in range(4):
                y[j, b] = cur[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if keep:
            path[i + 1] = y
    return -1


def rk4(y0: np.ndarray, params: MediumParams, n_steps: int, ac_stark: bool = True,
        keep_path: bool = True):
    """Classical fixed-step RK4 over [0, L].

    ``y0`` has shape (4,) or (4, B); a batch advances in lock-step.  Returns
    the stacked path (n_steps + 1, 4[, B]) or only the endpoint when
    ``keep_path`` is false.
    """
    y = np.array(y0, dtype=np.complex128)
    single = y.ndim == 1
    y2 = np.ascontiguousarray(y.reshape(4, -1))
    shape = (n_steps + 1,) + y2.shape if keep_path else (0, 4, 1)
    path = np.empty(shape, dtype=np.complex128)
    failed = _rk4_kernel(y2, float(params.kappa), float(params.delta), float(params.delta_k),
                         float(params.length), int(n_steps), bool(ac_stark), path)
    if failed >= 0:
        z = failed * params.length / n_steps
        raise IntegrationError(f"degenerate pump norm at z = {z:.6g}", position=z)
    if keep_path:
        return path[:, :, 0] if single else path
    return y2[:, 0] if single else y2


def rk4_reference(y0: np.ndarray, params: MediumParams, n_steps: int, ac_stark: bool = True):
    """Pure-numpy RK4 on :func:`field_derivatives`; slow, kept as a cross-check."""
    h = params.length / n_steps
    y = np.array(y0, dtype=complex)
    path = [y]
    for _ in range(n_steps):
        k1 = field_derivatives(y, params, ac_stark)
        k2 = field_derivatives(y + 0.5 * h * k1, params, ac_stark)
        k3 = field_derivatives(y + 0.5 * h * k2, params, ac_stark)
        k4 = field_derivatives(y + h * k3, params, ac_stark)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path.append(y)
    return np.stack(path)


def integrate(
    initial: FieldState | np.ndarray,
    params: MediumParams,
    steps_per_unit: int = STEPS_PER_UNIT,
    ac_stark: bool = True,
    richardson: bool = False,
) -> Trajectory:
    """Integrate the propagation equations from z = 0 to z = L.

    The step is h = (delta/kappa) / (steps_per_unit * s) with s the
    :func:`stiffness` of the initial state.  With ``richardson=True`` the run is repeated at half the step and the
    endpoint difference / 15 is stored as ``error_estimate``.
    """
    y0 = _as_vector(initial)
    if y0.shape != (4,):
        raise ValueError("integrate expects a single state; use rk4 for batches")
    n = n_steps_for(params, steps_per_unit, stiffness(y0))
    path = rk4(y0, params, n, ac_stark)
    err = None
    if richardson:
        fine = rk4(y0, params, 2 * n, ac_stark, keep_path=False)
        err = float(np.max(np.abs(fine - path[-1])) / 15.0)
    z = np.linspace(0.0, params.length, n + 1)
    return Trajectory(z=z, y=path, params=params, conserved=conserved_arrays(path.T).T,
                      error_estimate=err)
