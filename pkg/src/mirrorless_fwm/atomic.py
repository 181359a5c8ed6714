"""Stationary response of the open double-Lambda atom.

Atoms are injected into b1 or b2 at rate r and every state decays out of the
system at gamma0; the excited states decay additionally at gamma.  Injection
into b1 and into b2 are solved separately and the density matrices added,
which models an incoherent 50/50 preparation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, SingularDenominatorError, SingularMatrixError
from .state import FieldState, MediumParams

# leading-order closed forms are compared against the exact solve; anything
# worse conditioned than this is reported instead of returned
_MAX_CONDITION = 1e14


class Channel(enum.Enum):
    INTO_B1 = "into-b1"
    INTO_B2 = "into-b2"


@dataclass(frozen=True)
class AtomicAmplitudes:
    a1: complex
    a2: complex
    b1: complex
    b2: complex
    channel: Channel

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.b1, self.b2], dtype=complex)

    @property
    def population(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))


@dataclass(frozen=True)
class Coherences:
    rho_a1b1: complex
    rho_a1b2: complex
    rho_a2b1: complex
    rho_a2b2: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.rho_a1b1, self.rho_a1b2, self.rho_a2b1, self.rho_a2b2], dtype=complex)

    @classmethod
    def from_amplitudes(cls, first: AtomicAmplitudes, second: AtomicAmplitudes) -> "Coherences":
        """Incoherent sum rho_{a_mu b_nu} = sum over channels of a_mu b_nu^*."""

        def rho(a, b):
            return getattr(first, a) * getattr(first, b).conjugate() + getattr(
                second, a
            ) * getattr(second, b).conjugate()

        return cls(rho("a1", "b1"), rho("a1", "b2"), rho("a2", "b1"), rho("a2", "b2"))


def _pump_norm(fields: FieldState) -> float:
    s = fields.pump_norm
    if not s > 0:
        raise DegenerateDenominatorError("|Omega1|^2 + |E1|^2 must be positive")
    return s


def pump_rate(fields: FieldState, params: MediumParams) -> float:
    """Injection rate fixed by unit total population at leading order.

    r = |Omega1 Omega2 - E1 E2|^2 / [delta (|Omega1|^2 + |E1|^2)]
    """
    s = _pump_norm(fields)
    dark = fields.omega1 * fields.omega2 - fields.e1 * fields.e2
    return abs(dark) ** 2 / (params.delta * s)


def leading_order_amplitudes(
    fields: FieldState, params: MediumParams, channel: Channel | str, r: float
) -> AtomicAmplitudes:
    """Closed-form amplitudes valid for delta >> gamma >> gamma0.

    The rate ``r`` is an explicit input; these forms diverge at the dark-state
    point and are never used to build coherences numerically.
    """
    channel = Channel(channel)
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    dark = abs(o1 * o2 - e1 * e2) ** 2
    if dark == 0.0:
        raise SingularDenominatorError("Omega1*Omega2 = E1*E2: leading-order amplitudes diverge")
    c = 1j * r / dark
    d = params.delta
    if channel is Channel.INTO_B1:
        return AtomicAmplitudes(
            a1=-c * (o1 * o2 * e2.conjugate() - e1 * abs(e2) ** 2),
            a2=c * (abs(o1) ** 2 * o2 - o1.conjugate() * e1 * e2),
            b1=c * d * abs(o1) ** 2,
            b2=-c * d * o1.conjugate() * e1,
            channel=channel,
        )
    return AtomicAmplitudes(
        a1=c * (o1 * abs(o2) ** 2 - e1 * e2 * o2.conjugate()),
        a2=-c * (o1 * o2 * e1.conjugate() - abs(e1) ** 2 * e2),
        b1=-c * d * o1 * e1.conjugate(),
        b2=c * d * abs(e1) ** 2,
        channel=channel,
    )


def steady_state_matrix(fields: FieldState, params: MediumParams) -> np.ndarray:
    """Matrix of the amplitude equations with all time derivatives set to zero.

    Unknowns are ordered (a1, a2, b1, b2); the injection rates form the
    right-hand side (0, 0, -r1, -r2).
    """
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    g_exc = params.gamma0 + params.gamma
    g0 = params.gamma0
    return np.array(
        [
            [-g_exc, 0.0, 1j * e1, 1j * o1],
            [0.0, -(g_exc + 1j * params.delta), 1j * o2, 1j * e2],
            [1j * e1.conjugate(), 1j * o2.conjugate(), -g0, 0.0],
            [1j * o1.conjugate(), 1j * e2.conjugate(), 0.0, -g0],
        ],
        dtype=complex,
    )


def exact_steady_state(
    fields: FieldState, params: MediumParams, channel: Channel | str, r: float
) -> AtomicAmplitudes:
    """Exact stationary amplitudes with full gamma, gamma0 and delta dependence."""
    channel = Channel(channel)
    m = steady_state_matrix(fields, params)
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > _MAX_CONDITION:
        raise SingularMatrixError(
            f"steady-state system is singular (condition estimate {cond:.3e})", condition=cond
        )
    rhs = np.zeros(4, dtype=complex)
    rhs[2 if channel is Channel.INTO_B1 else 3] = -r
    a1, a2, b1, b2 = np.linalg.solve(m, rhs)
    return AtomicAmplitudes(complex(a1), complex(a2), complex(b1), complex(b2), channel)


def exact_pump_rate(fields: FieldState, params: MediumParams) -> float:
    """Injection rate giving unit total population in the exact solution."""
    # populations scale as r^2
    total = sum(
        exact_steady_state(fields, params, ch, 1.0).population for ch in Channel
    )
    return float(1.0 / np.sqrt(total))


def exact_coherences(
    fields: FieldState, params: MediumParams, r: float | None = None
) -> Coherences:
    """Coherences assembled from the exact solve; the oracle for :func:`coherences`."""
    if r is None:
        r = exact_pump_rate(fields, params)
    return Coherences.from_amplitudes(
        exact_steady_state(fields, params, Channel.INTO_B1, r),
        exact_steady_state(fields, params, Channel.INTO_B2, r),
    )


def coherence_terms(o1, o2, e1, e2, delta):
    """Coupling and ac-Stark parts of the four coherences, array-friendly.

    Returns two tuples ``(coupling, stark)`` ordered (a1b1, a1b2, a2b1, a2b2);
    the full coherence is their sum.  The caller guarantees
    |Omega1|^2 + |E1|^2 > 0.
    """
    o1c, o2c, e1c, e2c = np.conj(o1), np.conj(o2), np.conj(e1), np.conj(e2)
    ao1, ao2, ae1, ae2 = (np.abs(v) ** 2 for v in (o1, o2, e1, e2))
    s = ao1 + ae1
    den = delta * s * s
    coupling = (
        -(ao1 * o1 * o2 * e2c - e1 * e1 * e2 * o1c * o2c) / den,
        (o1 * o1 * o2 * e1c * e2c - ae1 * e1 * e2 * o2c) / den,
        -e1 * e2 * o1c / (delta * s),
        -o1 * o2 * e1c / (delta * s),
    )
    # the a1b2 Stark term carries |Omega2|^2 - |E2|^2: this is what the
    # channel sum a1 b2^* of the leading-order amplitudes produces
    stark = (
        -ao1 * (ao2 - ae2) * e1 / den,
        ae1 * (ao2 - ae2) * o1 / den,
        ao1 * o2 / (delta * s),
        ae1 * e2 / (delta * s),
    )
    return coupling, stark


def coherences(fields: FieldState, params: MediumParams) -> Coherences:
    """Optical coherences in the cancelled closed form.

    The common factor r^2 delta / |Omega1 Omega2 - E1 E2|^4 has been cancelled
    against the pump rate, so the result stays finite at the dark-state point.
    """
    _pump_norm(fields)
    coupling, stark = coherence_terms(
        fields.omega1, fields.omega2, fields.e1, fields.e2, params.delta
    )
    return Coherences(*(complex(c + s) for c, s in zip(coupling, stark)))
