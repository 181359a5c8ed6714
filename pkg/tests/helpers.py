"""Random field-state generators shared by the tests."""

import math

import numpy as np
from mirrorless_fwm.state import FieldState


def random_phase(rng):
    return np.exp(1j * rng.uniform(-math.pi, math.pi))


def random_fields(rng, low=0.1, high=2.0) -> FieldState:
    """Four fields with magnitudes uniform in [low, high] and uniform phases."""
    mags = rng.uniform(low, high, 4)
    return FieldState(*(m * random_phase(rng) for m in mags))


def manifold_fields(rng) -> FieldState:
    """A state reachable inside an equal-pump cell: on the Manley-Rowe surface
    |Omega_n|^2 + |E_n|^2 = 1 with generated amplitudes below the pumps'."""
    eps = rng.uniform(0.05, 0.98)
    theta = rng.uniform(0.05, 0.5 * math.pi - 0.05)
    e1, e2 = eps * math.sin(theta), eps * math.cos(theta)
    a1, a2 = math.sqrt(1 - e1 * e1), math.sqrt(1 - e2 * e2)
    return FieldState(*(m * random_phase(rng) for m in (a1, a2, e1, e2)))


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
