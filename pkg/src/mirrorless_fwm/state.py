"""Field and medium containers shared by all modules.

Rabi frequencies are carried in units of the pump input amplitude a10, so a
pump at the cell entrance has magnitude 1.  Only the ratio kappa/delta and
the product kappa*L/delta enter the propagation problem.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FieldState:
    """Complex Rabi frequencies of the two pumps and the two generated fields."""

    omega1: complex
    omega2: complex
    e1: complex
    e2: complex

    def __post_init__(self):
        for name in ("omega1", "omega2", "e1", "e2"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def pump_norm(self) -> float:
        """|Omega1|^2 + |E1|^2, the denominator of the atomic response."""
        return abs(self.omega1) ** 2 + abs(self.e1) ** 2

    def to_vector(self) -> np.ndarray:
        """Pack as the propagation vector (E1, E2*, Omega1, Omega2*)."""
        return np.array(
            [self.e1, self.e2.conjugate(), self.omega1, self.omega2.conjugate()],
            dtype=complex,
        )

    @classmethod
    def from_vector(cls, y) -> "FieldState":
        e1, e2c, o1, o2c = (complex(v) for v in y)
        return cls(omega1=o1, omega2=o2c.conjugate(), e1=e1, e2=e2c.conjugate())


@dataclass(frozen=True)
class MediumParams:
    """Medium constants and geometry.

    Parameters
    ----------
    kappa : float
        Coupling constant, wp^2 k_d N / (2 hbar eps0).
    delta : float
        One-photon detuning of the second pump, same units as the fields.
    delta_k : float
        Free-space phase mismatch k2 - k1.  Zero by default.
    gamma : float
        Excited-state decay rate out of the system.
    gamma0 : float
        Decay rate of every state, including the ground-state coherence.
    length : float
        Length L of the interaction region.
    min_delta_over_gamma : float
        Validity guard for the leading-order forms; a warning is issued
        when delta/gamma falls below it.
    """

    kappa: float = 1.0
    delta: float = 1.0
    delta_k: float = 0.0
    gamma: float = 1e-2
    gamma0: float = 1e-8
    length: float = 1.0
    min_delta_over_gamma: float = 100.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.gamma < 0 or self.gamma0 < 0:
            raise ValueError("decay rates must be non-negative")

    @property
    def coupling(self) -> float:
        """kappa / delta, the rate scale of every propagation equation."""
        return self.kappa / self.delta

    @property
    def kl_over_delta(self) -> float:
        return self.kappa * self.length / self.delta

    @classmethod
    def from_kl(cls, kl_over_delta: float, **kwargs) -> "MediumParams":
        """Medium with kappa = delta = 1 and L chosen to give kappa*L/delta."""
        kwargs.setdefault("kappa", 1.0)
        kwargs.setdefault("delta", 1.0)
        length = kl_over_delta * kwargs["delta"] / kwargs["kappa"]
        return cls(length=length, **kwargs)

    def check_hierarchy(self) -> bool:
        """Warn when delta/gamma is below the configured validity ratio."""
        if self.gamma > 0 and self.delta / self.gamma < self.min_delta_over_gamma:
            warnings.warn(
                f"delta/gamma = {self.delta / self.gamma:.3g} is below "
                f"{self.min_delta_over_gamma:g}; leading-order forms are unreliable",
                RuntimeWarning,
                stacklevel=2,
            )
            return False
        return True


def wrap_phase(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2 * math.pi)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class AmplitudePhaseState:
    """Real amplitudes of the four fields and their relative phase psi."""

    e1: float
    e2: float
    a1: float
    a2: float
    psi: float = math.pi / 2

    def __post_init__(self):
        for name in ("e1", "e2", "a1", "a2"):
            if getattr(self, name) < 0:
                raise ValueError(f"amplitude {name} must be non-negative")
        object.__setattr__(self, "psi", wrap_phase(self.psi))

    @classmethod
    def from_fields(cls, fields: FieldState) -> "AmplitudePhaseState":
        """Polar decomposition with E_n = e_n exp(-i phi_n), Omega_n = a_n exp(-i psi_n)."""
        p = fields.omega1 * fields.omega2 * fields.e1.conjugate() * fields.e2.conjugate()
        psi = math.atan2(p.imag, p.real) if p != 0 else math.pi / 2
        return cls(
            e1=abs(fields.e1),
            e2=abs(fields.e2),
            a1=abs(fields.omega1),
            a2=abs(fields.omega2),
            psi=psi,
        )

    def to_fields(self) -> FieldState:
        """A representative field state: pumps real, E2 real, E1 carrying psi."""
        return FieldState(
            omega1=self.a1,
            omega2=self.a2,
            e1=self.e1 * complex(math.cos(self.psi), -math.sin(self.psi)),
            e2=self.e2,
        )
