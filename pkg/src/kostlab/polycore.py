"""Polynomials, projective charts and the Hermitian norms of sections.

``Poly1`` and ``Poly2`` hold dense monomial coefficients of affine
representatives in the chart ``z_0 != 0``. Homogeneous ternary forms are
dense ``(d+1)^3`` arrays indexed by exponents ``(e0, e1, e2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

CHARTS = (0, 1, 2)


class Poly1:
    """Univariate polynomial, ``c[0]`` is the constant term.

    The nominal degree is ``len(c) - 1``; a vanishing leading coefficient is
    kept and reported through :attr:`degree_drop` rather than trimmed away.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = np.array(coeffs)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("Poly1 needs a non-empty 1-d coefficient array")
        if not np.iscomplexobj(c):
            c = c.astype(float)
        c.setflags(write=False)
        self.c = c

    @property
    def d(self) -> int:
        return self.c.size - 1

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.c) or not np.any(self.c.imag)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.c)

    @property
    def exact_degree(self) -> int:
        nz = np.flatnonzero(self.c)
        return int(nz[-1]) if nz.size else -1

    @property
    def degree_drop(self) -> int:
        """Number of roots at infinity relative to the nominal degree."""
        return self.d - self.exact_degree if not self.is_zero else 0

    def trimmed(self) -> "Poly1":
        return Poly1(self.c[: max(self.exact_degree, 0) + 1])

    def derivative(self) -> "Poly1":
        if self.d == 0:
            return Poly1(np.zeros(1, dtype=self.c.dtype))
        return Poly1(self.c[1:] * np.arange(1, self.d + 1))

    def reversed(self) -> "Poly1":
        """Coefficients of ``x^d p(1/x)``."""
        return Poly1(self.c[::-1])

    def __call__(self, x):
        x = np.asarray(x)
        acc = np.full(x.shape, self.c[-1], dtype=np.result_type(self.c, x))
        for coef in self.c[-2::-1]:
            acc = acc * x + coef
        return acc if acc.ndim else acc[()]

    def __mul__(self, other: "Poly1") -> "Poly1":
        return Poly1(np.convolve(self.c, other.c))

    def __neg__(self) -> "Poly1":
        return Poly1(-self.c)

    def scaled(self, factor) -> "Poly1":
        return Poly1(self.c * factor)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly1) and self.c.shape == other.c.shape and bool(np.all(self.c == other.c))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Poly1(d={self.d}, c={self.c.tolist()})"

    @classmethod
    def from_roots(cls, roots, lead=1.0) -> "Poly1":
        return cls(np.polynomial.polynomial.polyfromroots(roots) * lead)


class Poly2:
    """Bivariate polynomial of total degree ``<= d``; ``c[j, k]`` multiplies ``x^j y^k``."""

    __slots__ = ("d", "c")

    def __init__(self, d: int, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.shape != (d + 1, d + 1):
            raise ValueError(f"expected ({d + 1}, {d + 1}) coefficient array, got {c.shape}")
        j, k = np.indices(c.shape)
        if np.any(c[j + k > d]):
            raise ValueError("coefficients with j + k > d must vanish")
        c.setflags(write=False)
        self.d = d
        self.c = c

    @classmethod
    def from_terms(cls, d: int, terms: dict) -> "Poly2":
        c = np.zeros((d + 1, d + 1))
        for (j, k), v in terms.items():
            if j + k > d or j < 0 or k < 0:
                raise ValueError(f"monomial x^{j} y^{k} outside degree {d}")
            c[j, k] += v
        return cls(d, c)

    @property
    def terms(self) -> dict[tuple[int, int], float]:
        return {(j, k): float(self.c[j, k]) for j in range(self.d + 1) for k in range(self.d + 1 - j)}

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
        y = np.asarray(y, dtype=float) if not np.iscomplexobj(y) else np.asarray(y)
        acc = 0.0
        for j in range(self.d, -1, -1):
            row = self.c[j]
            inner = np.full(np.broadcast(x, y).shape, row[self.d - j], dtype=np.result_type(x, y, float))
            for k in range(self.d - j - 1, -1, -1):
                inner = inner * y + row[k]
            acc = acc * x + inner
        acc = np.asarray(acc)
        return acc if acc.ndim else acc[()]

    def dx(self) -> "Poly2":
        c = np.zeros_like(self.c)
        c[:-1] = self.c[1:] * np.arange(1, self.d + 1)[:, None]
        return Poly2(self.d, c)

    def dy(self) -> "Poly2":
        c = np.zeros_like(self.c)
        c[:, :-1] = self.c[:, 1:] * np.arange(1, self.d + 1)[None, :]
        return Poly2(self.d, c)

    def scaled(self, factor: float) -> "Poly2":
        return Poly2(self.d, self.c * factor)

    def __mul__(self, other: "Poly2") -> "Poly2":
        d = self.d + other.d
        c = np.zeros((d + 1, d + 1))
        for (j, k), v in self.terms.items():
            if v:
                c[j : j + other.d + 1, k : k + other.d + 1] += v * other.c
        return Poly2(d, c)

    def __sub__(self, other: "Poly2") -> "Poly2":
        d = max(self.d, other.d)
        c = np.zeros((d + 1, d + 1))
        c[: self.d + 1, : self.d + 1] += self.c
        c[: other.d + 1, : other.d + 1] -= other.c
        return Poly2(d, c)

    def __add__(self, other: "Poly2") -> "Poly2":
        return self - other.scaled(-1.0)

    def __repr__(self) -> str:
        nz = {jk: v for jk, v in self.terms.items() if v}
        return f"Poly2(d={self.d}, {nz})"

    def restrict_x(self, x0: float) -> Poly1:
        """Univariate ``y -> p(x0, y)``."""
        powers = x0 ** np.arange(self.d + 1)
        return Poly1(powers @ self.c)

    def restrict_y(self, y0: float) -> Poly1:
        powers = y0 ** np.arange(self.d + 1)
        return Poly1(self.c @ powers)


Poly = Union[Poly1, Poly2]


def evaluate(poly: Poly, point):
    """Horner evaluation; ``point`` is a scalar for Poly1 and an (x, y) pair for Poly2."""
    if isinstance(poly, Poly1):
        return poly(point)
    x, y = point
    return poly(x, y)


def gradient(p: Poly2, point) -> np.ndarray:
    x, y = point
    return np.array([p.dx()(x, y), p.dy()(x, y)])


# --- homogeneous forms and charts ---------------------------------------------------


def _other(chart: int) -> tuple[int, int]:
    if chart not in CHARTS:
        raise ValueError(f"chart must be one of {CHARTS}, got {chart!r}")
    a, b = (i for i in CHARTS if i != chart)
    return a, b


@dataclass(frozen=True)
class HomPoly:
    """Homogeneous ternary form of degree ``d``; ``h[e0, e1, e2]`` with ``e0+e1+e2 = d``."""

    d: int
    h: np.ndarray

    def __call__(self, z0, z1, z2):
        out = 0.0
        for (e0, e1, e2) in zip(*np.nonzero(self.h)):
            out = out + self.h[e0, e1, e2] * np.power(z0, e0) * np.power(z1, e1) * np.power(z2, e2)
        return out

    def rotated(self, q: np.ndarray) -> "HomPoly":
        """The form ``z -> h(q^T z)``; its zero set is the image of the old one under ``q``."""
        d = self.d
        out = np.zeros_like(self.h)
        # substitute z_i -> sum_m q[m, i] w_m, expanding by repeated multiplication
        lin = [np.zeros((2, 2, 2)) for _ in range(3)]
        for i in range(3):
            lin[i][1, 0, 0] = q[0, i]
            lin[i][0, 1, 0] = q[1, i]
            lin[i][0, 0, 1] = q[2, i]
        for (e0, e1, e2) in zip(*np.nonzero(self.h)):
            term = np.ones((1, 1, 1))
            for i, e in ((0, e0), (1, e1), (2, e2)):
                for _ in range(e):
                    term = _mul3(term, lin[i])
            out[: term.shape[0], : term.shape[1], : term.shape[2]] += self.h[e0, e1, e2] * term
        return HomPoly(d, out[: d + 1, : d + 1, : d + 1])


def _mul3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(tuple(sa + sb - 1 for sa, sb in zip(a.shape, b.shape)))
    for idx in zip(*np.nonzero(b)):
        i, j, k = idx
        out[i : i + a.shape[0], j : j + a.shape[1], k : k + a.shape[2]] += b[idx] * a
    return out


def homogenize(p: Poly2, chart: int = 0) -> HomPoly:
    """Lift an affine representative in ``chart`` to a degree-``p.d`` form."""
    a, b = _other(chart)
    d = p.d
    h = np.zeros((d + 1, d + 1, d + 1))
    for (j, k), v in p.terms.items():
        e = [0, 0, 0]
        e[chart], e[a], e[b] = d - j - k, j, k
        h[tuple(e)] = v
    return HomPoly(d, h)


def dehomogenize(H: HomPoly, chart: int) -> Poly2:
    """Set ``z_chart = 1``; the remaining coordinates in index order become (x, y)."""
    a, b = _other(chart)
    c = np.zeros((H.d + 1, H.d + 1))
    for e in zip(*np.nonzero(H.h)):
        c[e[a], e[b]] += H.h[e]
    return Poly2(H.d, c)


def chart_transfer(p: Poly2, from_chart: int, to_chart: int) -> Poly2:
    return dehomogenize(homogenize(p, from_chart), to_chart)


def chart_point(z, chart: int) -> tuple:
    """Affine coordinates of the homogeneous point ``z`` in ``chart``."""
    a, b = _other(chart)
    return z[a] / z[chart], z[b] / z[chart]


def chart_lift(x, y, chart: int) -> np.ndarray:
    a, b = _other(chart)
    z = np.empty(3, dtype=np.result_type(x, y, float))
    z[chart], z[a], z[b] = 1.0, x, y
    return z


# --- projective points and norms ------------------------------------------------------


class ProjPoint:
    """Point of CP^k given by homogeneous coordinates; equality is projective."""

    __slots__ = ("z",)
    TOL = 1e-12

    def __init__(self, coords):
        z = np.asarray(coords, dtype=complex)
        if z.ndim != 1 or z.size < 2:
            raise ValueError("need at least two homogeneous coordinates")
        if not np.any(z):
            raise ValueError("homogeneous coordinates must not all vanish")
        z.setflags(write=False)
        self.z = z

    @classmethod
    def slice_point(cls, r: float, k: int = 1) -> "ProjPoint":
        """``[1 : i r : 0 : ... : 0]`` in CP^k, interpolating RP^k (r=0) and the quadric (r=1)."""
        z = np.zeros(k + 1, dtype=complex)
        z[0], z[1] = 1.0, 1j * r
        return cls(z)

    @property
    def k(self) -> int:
        return self.z.size - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint) or other.z.size != self.z.size:
            return False
        u, v = self.z / np.linalg.norm(self.z), other.z / np.linalg.norm(other.z)
        wedge = np.abs(np.outer(u, v) - np.outer(v, u))
        return bool(wedge.max() <= self.TOL)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjPoint({self.z.tolist()})"


def tau_norm(p: ProjPoint | np.ndarray) -> float:
    """``|z_0^2 + ... + z_k^2| / |z|^2``: 1 on the real locus, 0 on the isotropic quadric."""
    z = p.z if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex)
    den = float(np.sum(np.abs(z) ** 2))
    if den == 0.0:
        raise ValueError("zero vector has no projective class")
    return float(abs(np.sum(z * z))) / den


def _as_poly1(s) -> Poly1:
    from .ensemble import KostlanSample

    if isinstance(s, KostlanSample):
        if s.n != 1:
            raise ValueError("section norms are implemented on CP^1 only (n = 1)")
        return s.to_poly()
    if isinstance(s, Poly1):
        return s
    return Poly1(s)


def log_abs_poly(p: Poly1, z) -> np.ndarray:
    """``log |p(z)|`` without overflow for large ``|z|`` (reversed Horner outside the unit disc)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape)
    inside = np.abs(z) <= 1.0
    with np.errstate(divide="ignore"):
        if np.any(inside):
            out[inside] = np.log(np.abs(p(z[inside])))
        if np.any(~inside):
            zo = z[~inside]
            out[~inside] = p.d * np.log(np.abs(zo)) + np.log(np.abs(p.reversed()(1.0 / zo)))
    return out


def log_hd_norm_sq(s, z) -> np.ndarray:
    """``log ||sigma(z)||^2`` for the metric h^d on O(d), affine coordinate ``z`` in chart z_0."""
    p = _as_poly1(s)
    if p.is_zero:
        raise ValueError("zero section has no pointwise norm")
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    return 2.0 * log_abs_poly(p, z) - p.d * np.log1p(r2)


def hd_section_norm_sq(s, z):
    out = np.exp(log_hd_norm_sq(s, z))
    return out if out.ndim else float(out)


def fs_section_norm_sq(s, z):
    """``|Q(z)|^2 / ((d+1)(1+|z|^2)^d)``: the norm pulled back through the Kostlan embedding.

    The divisor ``d+1`` is the Bergman sum of the orthonormal basis on CP^1.
    """
    p = _as_poly1(s)
    out = np.exp(log_hd_norm_sq(p, z) - math.log(p.d + 1))
    return out if out.ndim else float(out)
