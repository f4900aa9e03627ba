"""Outward-rounded interval arithmetic and polynomial enclosures over boxes.

:class:`RealInterval` rounds each endpoint away from the interval only when
the floating-point result was inexact (detected with error-free
transformations), so exact operations stay tight.

The quadtree does not use scalar intervals: it expands the polynomial in
Taylor form at many box centres at once and bounds the remainder, carrying a
priori rounding-error bounds for the shift. The enclosures are
inclusion-isotonic like the scalar ones, and their overestimation shrinks
quadratically with the box size instead of linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

EPS = np.finfo(float).eps
_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    if not math.isfinite(p) or abs(a) > 1e150 or abs(b) > 1e150:
        # splitting overflows here; report an unknown error so both sides widen
        return p, math.nan
    if p != 0.0 and abs(p) < 1e-290 or p == 0.0 and a != 0.0 and b != 0.0:
        # near the subnormal range the error term is no longer exact
        return p, math.nan
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _down(v: float, err: float) -> float:
    if err == 0.0 or not math.isfinite(v):
        return v
    return math.nextafter(v, -math.inf) if (err < 0 or math.isnan(err)) else v


def _up(v: float, err: float) -> float:
    if err == 0.0 or not math.isfinite(v):
        return v
    return math.nextafter(v, math.inf) if (err > 0 or math.isnan(err)) else v


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "RealInterval":
        return cls(float(x), float(x))

    @staticmethod
    def coerce(v) -> "RealInterval":
        return v if isinstance(v, RealInterval) else RealInterval.point(v)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, RealInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def excludes_zero(self) -> bool:
        return self.lo > 0.0 or self.hi < 0.0

    def __add__(self, other) -> "RealInterval":
        o = RealInterval.coerce(other)
        lo, elo = _two_sum(self.lo, o.lo)
        hi, ehi = _two_sum(self.hi, o.hi)
        return RealInterval(_down(lo, elo), _up(hi, ehi))

    __radd__ = __add__

    def __neg__(self) -> "RealInterval":
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RealInterval":
        return self + (-RealInterval.coerce(other))

    def __rsub__(self, other) -> "RealInterval":
        return RealInterval.coerce(other) - self

    def __mul__(self, other) -> "RealInterval":
        o = RealInterval.coerce(other)
        prods = [_two_prod(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        lo = min(_down(p, e) for p, e in prods)
        hi = max(_up(p, e) for p, e in prods)
        return RealInterval(lo, hi)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RealInterval":
        if k < 0 or int(k) != k:
            raise ValueError("only non-negative integer powers")
        out = RealInterval.point(1.0)
        for _ in range(k):
            out = out * self
        if k % 2 == 0 and self.lo < 0.0 < self.hi:
            # even powers of a zero-straddling interval are non-negative
            out = RealInterval(0.0, out.hi)
        return out

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class Box2:
    x: RealInterval
    y: RealInterval
    depth: int = 0

    @classmethod
    def from_bounds(cls, x0: float, x1: float, y0: float, y1: float, depth: int = 0) -> "Box2":
        return cls(RealInterval(float(x0), float(x1)), RealInterval(float(y0), float(y1)), depth)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return self.x.lo, self.x.hi, self.y.lo, self.y.hi

    def split(self, tx: float = 0.5, ty: float = 0.5) -> tuple["Box2", "Box2", "Box2", "Box2"]:
        """Four children meeting at the split point; they tile the parent exactly."""
        x0, x1, y0, y1 = self.bounds
        mx = x0 + (x1 - x0) * tx if tx != 0.5 else 0.5 * (x0 + x1)
        my = y0 + (y1 - y0) * ty if ty != 0.5 else 0.5 * (y0 + y1)
        d = self.depth + 1
        return (
            Box2.from_bounds(x0, mx, y0, my, d),
            Box2.from_bounds(mx, x1, y0, my, d),
            Box2.from_bounds(x0, mx, my, y1, d),
            Box2.from_bounds(mx, x1, my, y1, d),
        )

    def contains(self, pt) -> bool:
        return self.x.contains(pt[0]) and self.y.contains(pt[1])

    def to_json(self) -> list[float]:
        return list(self.bounds)


def interval_eval(p, b: Box2) -> RealInterval:
    """Enclosure of the bivariate polynomial ``p`` over ``b`` by interval Horner (outer in x, inner in y)."""
    c = np.asarray(p.c, dtype=float)
    rows = []
    for j in range(c.shape[0]):
        row = RealInterval.point(float(c[j, -1]))
        for k in range(c.shape[1] - 2, -1, -1):
            row = row * b.y + float(c[j, k])
        rows.append(row)
    acc = rows[-1]
    for j in range(len(rows) - 2, -1, -1):
        acc = acc * b.x + rows[j]
    return acc


# --- vectorised Taylor-form enclosures --------------------------------------------------


def _shift_matrices(c: np.ndarray, d: int):
    """``T[b, m, j] = binom(m, j) c_b^(m-j)`` for ``m >= j``, and its absolute-value twin."""
    m = np.arange(d + 1)
    binom = np.array([[comb(mm, jj) for jj in range(d + 1)] for mm in range(d + 1)], dtype=float)
    expo = m[:, None] - m[None, :]
    mask = expo >= 0
    e = np.where(mask, expo, 0)
    powc = c[:, None, None] ** e[None, :, :]
    T = np.where(mask[None], binom[None] * powc, 0.0)
    Tabs = np.where(mask[None], binom[None] * np.abs(c)[:, None, None] ** e[None, :, :], 0.0)
    return T, Tabs


def taylor_coeffs(A: np.ndarray, cx: np.ndarray, cy: np.ndarray):
    """Taylor coefficients ``b[j, k]`` of ``sum A[m, n] x^m y^n`` at each centre, with error bounds."""
    d = A.shape[0] - 1
    Tx, Tx_abs = _shift_matrices(np.asarray(cx, dtype=float), d)
    Ty, Ty_abs = _shift_matrices(np.asarray(cy, dtype=float), d)
    B = np.einsum("bmj,mn,bnk->bjk", Tx, A, Ty, optimize=True)
    Babs = np.einsum("bmj,mn,bnk->bjk", Tx_abs, np.abs(A), Ty_abs, optimize=True)
    # powers, two length-(d+1) dot products and the einsum reassociation all stay below this depth
    gamma = 6.0 * (d + 2) * EPS
    return B, gamma * Babs


@dataclass
class Enclosures:
    """Centre value and radius of p, dp/dx and dp/dy over each box (vectorised)."""

    p0: np.ndarray
    prad: np.ndarray
    px0: np.ndarray
    pxrad: np.ndarray
    py0: np.ndarray
    pyrad: np.ndarray

    def p_excludes_zero(self):
        return np.abs(self.p0) > self.prad

    def px_excludes_zero(self):
        return np.abs(self.px0) > self.pxrad

    def py_excludes_zero(self):
        return np.abs(self.py0) > self.pyrad


def box_enclosures(A: np.ndarray, cx, cy, rx, ry) -> Enclosures:
    """Taylor-form enclosures of p and its partials over boxes ``[cx +- rx] x [cy +- ry]``."""
    B, E = taylor_coeffs(A, cx, cy)
    d = A.shape[0] - 1
    rx = np.asarray(rx, dtype=float)
    ry = np.asarray(ry, dtype=float)
    j = np.arange(d + 1)
    px_pow = rx[:, None] ** j[None, :]
    py_pow = ry[:, None] ** j[None, :]
    mag = np.abs(B) + E
    grow = 1.0 + 1e-12  # covers rounding in the radius sums themselves
    P = px_pow[:, :, None] * py_pow[:, None, :]
    rad = (mag * P).sum(axis=(1, 2)) - mag[:, 0, 0] + E[:, 0, 0]
    # d/dx: coefficient j * b[j, k] multiplies u^(j-1) v^k
    Px = px_pow[:, :-1, None] * py_pow[:, None, :]
    magx = mag[:, 1:, :] * j[1:, None]
    radx = (magx * Px).sum(axis=(1, 2)) - magx[:, 0, 0] + E[:, 1, 0]
    Py = px_pow[:, :, None] * py_pow[:, None, :-1]
    magy = mag[:, :, 1:] * j[None, 1:]
    rady = (magy * Py).sum(axis=(1, 2)) - magy[:, 0, 0] + E[:, 0, 1]
    return Enclosures(
        p0=B[:, 0, 0],
        prad=rad * grow + 1e-300,
        px0=B[:, 1, 0] if d >= 1 else np.zeros(len(B)),
        pxrad=radx * grow + 1e-300,
        py0=B[:, 0, 1] if d >= 1 else np.zeros(len(B)),
        pyrad=rady * grow + 1e-300,
    )


def restrict_line(A: np.ndarray, axis: int, c: float):
    """Coefficients (low degree first) of ``p`` on the line ``x = c`` (axis 0) or ``y = c`` (axis 1), with error bounds."""
    d = A.shape[0] - 1
    powc = float(c) ** np.arange(d + 1)
    absc = abs(float(c)) ** np.arange(d + 1)
    if axis == 0:
        coef = powc @ A
        bound = absc @ np.abs(A)
    else:
        coef = A @ powc
        bound = np.abs(A) @ absc
    return coef, 4.0 * (d + 2) * EPS * bound
