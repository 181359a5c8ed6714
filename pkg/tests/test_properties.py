import cmath
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorless_fwm.atomic import coherences
from mirrorless_fwm.elliptic import complete_K, incomplete_F
from mirrorless_fwm.propagation import (
    conserved_arrays,
    field_derivatives,
    polar_derivatives,
    rhs_amplitude_phase,
)
from mirrorless_fwm.state import AmplitudePhaseState, FieldState, MediumParams, wrap_phase

magnitude = st.floats(0.05, 2.0)
phase = st.floats(-math.pi, math.pi)


@st.composite
def field_states(draw):
    return FieldState(*(draw(magnitude) * cmath.exp(1j * draw(phase)) for _ in range(4)))


@st.composite
def amp_phase_states(draw):
    return AmplitudePhaseState(*(draw(magnitude) for _ in range(4)), psi=draw(phase))


@given(field_states())
def test_sum_rule(f):
    c1, c2, c3, c4, _ = conserved_arrays(f.to_vector())
    assert math.isclose(c1 + c2, c3 + c4, rel_tol=1e-14)


@given(field_states(), st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_manley_rowe_rates_vanish(f, kappa, delta):
    p = MediumParams(kappa=kappa, delta=delta, delta_k=0.7)
    y = f.to_vector()
    dy = field_derivatives(y, p)
    rates = 2 * np.real(np.conj(y) * dy)
    scale = p.coupling * float(np.sum(np.abs(y) ** 2)) ** 2 / f.pump_norm
    assert abs(rates[0] + rates[2]) <= 1e-13 * scale
    assert abs(rates[1] + rates[3]) <= 1e-13 * scale
    assert abs(rates[2] + rates[3]) <= 1e-13 * scale


@given(amp_phase_states(), st.booleans())
@settings(max_examples=200)
def test_polar_equivalence(s, stark):
    p = MediumParams(kappa=1.3, delta=0.8)
    y = s.to_fields().to_vector()
    polar = polar_derivatives(y, field_derivatives(y, p, stark))
    direct = rhs_amplitude_phase(s, p, stark)
    # absolute floor: cancellations in the phase bracket lose digits
    scale = p.coupling * (1 + max(s.e1, s.e2, s.a1, s.a2) / min(s.e1, s.e2, s.a1, s.a2))
    assert np.allclose(direct, polar, rtol=1e-10, atol=1e-13 * scale)


@given(field_states(), phase, phase, phase)
def test_rhs_commutes_with_gauge(f, a, b, c):
    # pump-1 rotation (Omega1, E1), pump-2 rotation (Omega2, E2) and the
    # opposite rotation of the generated fields all leave the physics unchanged
    p = MediumParams()
    y = f.to_vector()
    u = np.exp(1j * np.array([a + c, c - b, a, -b]))
    lhs = field_derivatives(u * y, p)
    rhs = u * field_derivatives(y, p)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


@given(field_states())
def test_coherences_finite(f):
    assert np.all(np.isfinite(coherences(f, MediumParams()).as_array()))


@given(st.floats(-1e3, 1e3))
def test_wrap_phase_range(x):
    w = wrap_phase(x)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)


@given(st.floats(-100.0, 0.99), st.floats(1e-6, 0.5))
def test_K_increasing(m, dm):
    if m + dm < 1:
        assert complete_K(m + dm) > complete_K(m)


@given(st.floats(0.0, 0.5 * math.pi), st.floats(-50.0, 0.99))
def test_F_bounded_by_K(phi, m):
    f = incomplete_F(phi, m)
    assert 0.0 <= f <= complete_K(m) * (1 + 1e-15)
    assert math.isclose(incomplete_F(phi, 0.0), phi, rel_tol=1e-15, abs_tol=1e-300)
