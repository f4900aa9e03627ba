"""Closed-form quantities of the real Kostlan ensemble.

Everything here is a pure function of a few scalars: moment bounds and the
expected log-norm at a point with given ``||tau||``, the norm of ``tau``
pulled back by the Kodaira map for three explicit geometries, and the genus
and Harnack bounds for plane curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .polycore import tau_norm

OFF_VARIETY_TOL = 1e-9


@lru_cache(maxsize=1)
def log_rho_integral() -> float:
    """``int_0^inf e^{-rho} log(rho) d rho`` by adaptive quadrature (split at 1 for the log singularity)."""
    f = lambda r: math.exp(-r) * math.log(r)
    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(f, 1.0, math.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
    return head + tail


def _check_tau(tau: float, closed: bool) -> float:
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"||tau|| must lie in [0, 1], got {tau}")
    if not closed and tau >= 1.0:
        raise ValueError("the moment bound is void at real points (||tau|| = 1)")
    return tau


def moment_bound(m: int, k: int, tau: float) -> float:
    """Upper bound ``4 m! (k+1) / (1 - ||tau||)`` on the m-th moment of ``||sigma(z)||^2`` on CP^k."""
    if m < 1 or k < 1:
        raise ValueError("moment order and ambient dimension must be at least 1")
    tau = _check_tau(tau, closed=False)
    return 4.0 * math.factorial(m) * (k + 1) / (1.0 - tau)


def expected_log_norm(k: int, tau: float) -> float:
    """Expectation of ``log ||sigma(z)||^2`` for degree-one sections on CP^k at a point with this ``||tau||``."""
    if k < 1:
        raise ValueError("ambient dimension must be at least 1")
    tau = _check_tau(tau, closed=True)
    return math.log((k + 1) / 4.0) + log_rho_integral() + math.log1p(math.sqrt(1.0 - tau * tau))


def slice_tau(r: float) -> float:
    """``||tau||`` at ``[1 : i r : 0 : ... : 0]``."""
    return (1.0 - r * r) / (1.0 + r * r)


@dataclass(frozen=True)
class GeometryTag:
    """One of the explicit real geometries: ``projective``, ``ellipsoid`` or ``hyperboloid``."""

    kind: str
    n: int = 1
    a: int = 1
    b: int = 1

    def __post_init__(self):
        if self.kind not in ("projective", "ellipsoid", "hyperboloid"):
            raise ValueError(f"unknown geometry {self.kind!r}")
        if self.n < 1 or self.a < 1 or self.b < 1:
            raise ValueError("geometry parameters must be positive")


def projective_space(n: int) -> GeometryTag:
    return GeometryTag("projective", n=n)


def ellipsoid_quadric(n: int) -> GeometryTag:
    """``{x_0^2 = x_1^2 + ... + x_{n+1}^2}`` in CP^{n+1}."""
    return GeometryTag("ellipsoid", n=n)


def hyperboloid(a: int, b: int) -> GeometryTag:
    """CP^1 x CP^1 with the bundle O(a) (x) O(b)."""
    return GeometryTag("hyperboloid", a=a, b=b)


def tau_phi_norm(g: GeometryTag, point, d: int) -> float:
    """``||tau o Phi_d||`` at ``point`` for the geometry ``g``.

    Points are homogeneous coordinates: ``n+1`` of them on CP^n, ``n+2`` on
    the ellipsoid, and a pair of 2-vectors on the hyperboloid.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    if g.kind == "projective":
        z = np.asarray(point, dtype=complex)
        if z.size != g.n + 1:
            raise ValueError(f"expected {g.n + 1} homogeneous coordinates")
        return tau_norm(z) ** d
    if g.kind == "ellipsoid":
        z = np.asarray(point, dtype=complex)
        if z.size != g.n + 2:
            raise ValueError(f"expected {g.n + 2} homogeneous coordinates")
        mass = float(np.sum(np.abs(z) ** 2))
        if mass == 0.0:
            raise ValueError("zero vector is not a projective point")
        if abs(z[0] ** 2 - np.sum(z[1:] ** 2)) > OFF_VARIETY_TOL * mass:
            raise ValueError("point is not on the ellipsoid quadric")
        return float((2.0 * abs(z[0]) ** 2 / mass) ** d)
    p1, p2 = point
    return (tau_norm(np.asarray(p1, dtype=complex)) ** g.a * tau_norm(np.asarray(p2, dtype=complex)) ** g.b) ** d


def genus_plane_curve(d: int) -> int:
    """Genus of a smooth plane curve of degree ``d``."""
    if d < 1:
        raise ValueError("degree must be positive")
    return (d - 1) * (d - 2) // 2


def harnack_bound_plane(d: int) -> int:
    """Maximal number of connected components of a smooth real plane curve of degree ``d``."""
    return genus_plane_curve(d) + 1


def maximality_threshold(d: int, a) -> int:
    """Smallest ``b0`` counted as near-maximal: ``ceil(g + 1 - a d)``, floored at 0.

    ``a`` may be a Fraction or a string like ``"1/2"`` to keep the threshold exact.
    """
    a = Fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    return max(0, math.ceil(harnack_bound_plane(d) - a * d))
