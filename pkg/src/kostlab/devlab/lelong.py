"""Cutoff functions and the log-norm current balance on CP^1.

For a section with zeros ``z_j`` the Laplacian of ``log ||sigma||^2`` (metric
h^d) equals ``4 pi`` times the zero measure minus ``4 pi d`` times the
Fubini-Study density, so against a cutoff ``f`` the quantity

    R = (1/d) sum f(z_j) - int f omega_FS - (1/(4 pi d)) int log||sigma||^2 Laplacian(f) dA

vanishes identically. :func:`lelong_residual` evaluates all three terms
numerically and reports ``|R|``, which measures the quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..ensemble import KostlanSample, uniform_stream
from ..polycore import Poly1, _as_poly1, log_hd_norm_sq
from ..roots1d import complex_roots

DEFAULT_CENTER = 1j
DEFAULT_RADIUS = 0.5
DEFAULT_QUAD_GRID = 400
# nodes closer than this to a root trigger a shifted grid
NODE_CLEARANCE = 1e-9
JITTER_STREAM = 5


@dataclass(frozen=True)
class CutoffFn:
    """Radial bump ``(1 - t^2)^3`` with ``t = |z - center| / radius``, zero for ``t > 1``."""

    center: complex = DEFAULT_CENTER
    radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0.0:
            raise ValueError("cutoff radius must be positive")
        if not abs(self.center.imag) > self.radius:
            raise ValueError("cutoff support must stay off the real axis (|Im center| > radius)")

    def _s(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center) ** 2 / self.radius**2

    def value(self, z) -> np.ndarray:
        s = self._s(z)
        return np.where(s < 1.0, (1.0 - s) ** 3, 0.0)

    def laplacian(self, z) -> np.ndarray:
        # in s = t^2 the radial Laplacian is (4/r^2)(s F'' + F'), here F = (1 - s)^3
        s = self._s(z)
        return np.where(s < 1.0, 12.0 / self.radius**2 * (1.0 - s) * (3.0 * s - 1.0), 0.0)

    def __call__(self, z):
        return self.value(z)

    def to_json(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius}

    @classmethod
    def from_json(cls, obj) -> "CutoffFn":
        re, im = obj.get("center", [0.0, 1.0])
        return cls(complex(re, im), obj.get("radius", DEFAULT_RADIUS))


@dataclass(frozen=True)
class QuadGrid:
    """Midpoint nodes in the support disc of a cutoff, with cutoff data pre-evaluated."""

    z: np.ndarray
    weight: float
    f: np.ndarray
    lap: np.ndarray
    offset: float

    @classmethod
    def build(cls, f: CutoffFn, n: int, offset: float = 0.5) -> "QuadGrid":
        """``n`` cells per side; ``offset`` in (0, 1) places nodes inside cells (0.5 = midpoints).

        A non-midpoint offset adds one node per axis so the shifted grid still covers the disc.
        """
        if n < 2:
            raise ValueError("quadrature grid needs at least 2 cells per side")
        h = 2.0 * f.radius / n
        m = n if offset == 0.5 else n + 1
        t = (np.arange(m) + offset) * h - f.radius
        xx, yy = np.meshgrid(f.center.real + t, f.center.imag + t, indexing="ij")
        z = (xx + 1j * yy).ravel()
        keep = f._s(z) < 1.0
        z = z[keep]
        return cls(z, h * h, f.value(z), f.laplacian(z), offset)

    def clearance(self, roots: np.ndarray) -> float:
        if roots.size == 0 or self.z.size == 0:
            return math.inf
        return float(np.min(np.abs(self.z[None, :] - roots[:, None])))


def _grid_for(f: CutoffFn, n: int, roots: np.ndarray, seed: int, index: int) -> QuadGrid:
    grid = QuadGrid.build(f, n)
    near = roots[np.abs(roots - f.center) < f.radius + 1e-6] if roots.size else roots
    attempt = 0
    while grid.clearance(near) < NODE_CLEARANCE:
        u = float(uniform_stream(seed, index, attempt + 1, stream=JITTER_STREAM)[attempt])
        grid = QuadGrid.build(f, n, offset=0.05 + 0.9 * u)
        attempt += 1
    return grid


def log_norm_term(p: Poly1, grid: QuadGrid, d: int) -> float:
    """``(1/(4 pi d)) int log||sigma||^2 Laplacian(f) dA`` on the grid.

    The mean of the log-norm over the nodes is subtracted first. The exact
    integral of the Laplacian is 0, so this changes nothing in the limit and
    makes the discrete value independent of the overall scale of ``sigma``.
    """
    L = log_hd_norm_sq(p, grid.z)
    L = L - L.mean()
    return float(np.dot(L, grid.lap)) * grid.weight / (4.0 * math.pi * d)


def fs_mass_term(grid: QuadGrid) -> float:
    """``int f omega_FS`` with ``omega_FS = dA / (pi (1 + |z|^2)^2)``."""
    dens = 1.0 / (math.pi * (1.0 + np.abs(grid.z) ** 2) ** 2)
    return float(np.dot(grid.f, dens)) * grid.weight


@dataclass(frozen=True)
class LelongTerms:
    zeros: float
    fs_mass: float
    log_norm: float

    @property
    def residual(self) -> float:
        return abs(self.zeros - self.fs_mass - self.log_norm)


def lelong_terms(s, f: CutoffFn | None = None, quad_grid: int = DEFAULT_QUAD_GRID, seed: int = 0, index: int = 0) -> LelongTerms:
    f = f or CutoffFn()
    if isinstance(s, KostlanSample):
        seed, index = s.seed, s.index
    p = _as_poly1(s)
    if p.is_zero:
        raise ValueError("the zero section has no zero divisor")
    d = p.d
    if d < 1:
        raise ValueError("degree must be at least 1")
    roots = complex_roots(p)
    zeros = float(np.sum(f.value(roots))) / d
    grid = _grid_for(f, quad_grid, roots, seed, index)
    return LelongTerms(zeros, fs_mass_term(grid), log_norm_term(p, grid, d))


def lelong_residual(s, f: CutoffFn | None = None, quad_grid: int = DEFAULT_QUAD_GRID, seed: int = 0, index: int = 0) -> float:
    """``|R|`` for the section ``s`` (a degree-d KostlanSample with n = 1, or a possibly complex Poly1).

    Root-finder failures propagate as :class:`~kostlab.roots1d.RootFindingError`.
    """
    return lelong_terms(s, f, quad_grid, seed, index).residual


def deviation_variable(s, f: CutoffFn | None = None, quad_grid: int = DEFAULT_QUAD_GRID) -> float:
    """``Y = (1/(4 pi d)) |int log||sigma||^2 Laplacian(f) dA|``; needs no roots.

    Norms for h^d and for the pulled-back Fubini-Study metric differ by a
    constant factor, which the mean subtraction removes.
    """
    f = f or CutoffFn()
    p = _as_poly1(s)
    if p.is_zero:
        raise ValueError("the zero section has no pointwise norm")
    return abs(log_norm_term(p, QuadGrid.build(f, quad_grid), p.d))
