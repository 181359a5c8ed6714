"""Elliptic integrals of the first kind in the parameter convention.

K(m) = F(pi/2 | m) and F(phi | m) = int_0^phi (1 - m sin^2 t)^(-1/2) dt,
for any real m < 1.  Negative parameters need no transformation: the
arithmetic-geometric mean of 1 and sqrt(1 - m) converges for every m < 1.
"""

from __future__ import annotations

import math

from .errors import EllipticDomainError

_HALF_PI = 0.5 * math.pi


def agm(a: float, b: float, rtol: float = 1e-16) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    if a <= 0 or b <= 0:
        raise ValueError("agm needs positive arguments")
    for _ in range(64):
        if abs(a - b) <= rtol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = pi / (2 agm(1, sqrt(1 - m)))."""
    m = float(m)
    if not m < 1.0 or math.isnan(m):
        raise EllipticDomainError(f"K(m) requires m < 1, got {m}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F by duplication.

    At most one argument may be zero.  The fifth-order series after the
    duplication loop gives full double precision once the spread of the
    arguments has shrunk below ~3e-3.
    """
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise EllipticDomainError("R_F needs non-negative arguments, at most one zero")
    mu = (x + y + z) / 3.0
    q = max(abs(mu - x), abs(mu - y), abs(mu - z)) / 3e-3
    for _ in range(100):
        if q < abs(mu):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = 0.25 * (mu + lam)
        q *= 0.25
    mu = (x + y + z) / 3.0
    dx, dy = 1.0 - x / mu, 1.0 - y / mu
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
    return series / math.sqrt(mu)


def incomplete_F(phi: float, m: float) -> float:
    """Incomplete elliptic integral F(phi | m) for phi in [0, pi/2] and m < 1.

    Uses F = sin(phi) R_F(cos^2 phi, 1 - m sin^2 phi, 1), which stays
    well conditioned for large negative m.
    """
    phi, m = float(phi), float(m)
    if not m < 1.0 or math.isnan(m):
        raise EllipticDomainError(f"F(phi|m) requires m < 1, got {m}")
    if not 0.0 <= phi <= _HALF_PI + 1e-15:
        raise EllipticDomainError(f"phi must lie in [0, pi/2], got {phi}")
    if phi == 0.0:
        return 0.0
    if phi >= _HALF_PI:
        return complete_K(m)
    s = math.sin(phi)
    c = math.cos(phi)
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
