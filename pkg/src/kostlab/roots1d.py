"""Real-root counting and isolation, and complex roots of univariate polynomials.

Three routes count distinct real roots and are kept independent so they can
check each other:

* Sturm chains in double precision, accepted only while no remainder
  suffers catastrophic cancellation;
* Sturm chains over the integers (primitive pseudo-remainders), exact for
  float input since every double is a dyadic rational;
* a certified subdivision of the projective circle ``x = tan(theta)``, where
  the section becomes a trigonometric polynomial whose derivatives are
  bounded by Bernstein's inequality. This route is vectorised over many
  polynomials and carries the Monte Carlo experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import Poly1

EPS = np.finfo(float).eps
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
# remainders shrinking below this fraction of their dividend are treated as unreliable
CANCELLATION_RATIO = 1e-10


class RootFindingError(RuntimeError):
    """Raised when an iteration fails to converge; ``partial`` holds the last iterate."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


def _as_real_poly(p) -> Poly1:
    p = p if isinstance(p, Poly1) else Poly1(p)
    if p.is_zero:
        raise ValueError("the zero polynomial has no finite root set")
    if not p.is_real:
        raise ValueError("real-root counting needs real coefficients")
    return Poly1(np.real(p.c)).trimmed()


# --- Sturm chains ---------------------------------------------------------------------


def _sign(v) -> int:
    return int(v > 0) - int(v < 0)


def _variations(signs: Sequence[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _int_coeffs(c: np.ndarray) -> list[int]:
    """Exact integer multiple (by a positive power of two) of float coefficients, high degree first."""
    fr = [float(x).as_integer_ratio() for x in c[::-1]]
    den = max(b for _, b in fr)
    return [a * (den // b) for a, b in fr]


def _prem_int(a: list[int], b: list[int]) -> list[int]:
    lb, nb = b[0], len(b)
    a = a[:]
    for _ in range(len(a) - nb + 1):
        f = a[0]
        a = [lb * x - f * y for x, y in zip(a[1:], b[1:])] + [lb * x for x in a[nb:]]
    while a and a[0] == 0:
        a.pop(0)
    return a


def _exact_chain(c: np.ndarray) -> list[list[int]]:
    """Positive integer multiples of the Sturm sequence of ``c`` (lists, high degree first)."""
    f = _int_coeffs(c)
    n = len(f) - 1
    g = [f[i] * (n - i) for i in range(n)]
    chain = [f, g]
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        delta = len(a) - len(b) + 1
        r = _prem_int(a, b)
        if not r:
            break
        # prem = lc(b)^delta * rem; flip so the new element is a positive multiple of -rem
        s = -1 if (b[0] < 0 and delta % 2 == 1) else 1
        content = math.gcd(*r)
        chain.append([(-s) * x // content for x in r])
    return chain


def _float_chain(c: np.ndarray) -> list[np.ndarray] | None:
    """Sturm sequence in doubles, or None once cancellation makes it untrustworthy."""
    p0 = c[::-1].astype(float)
    p1 = np.polyder(p0)
    chain = [p0, p1]
    while p1.size > 1:
        q, r = np.polydiv(p0, p1)
        r = -r
        scale = max(np.abs(p0).max(), np.abs(q).max() * np.abs(p1).max())
        r = np.trim_zeros(r, "f")
        if r.size == 0:
            break
        top = np.abs(r).max()
        if top < CANCELLATION_RATIO * scale or abs(r[0]) < CANCELLATION_RATIO * top or r.size != p1.size - 1:
            return None
        p0, p1 = p1, r
        chain.append(p1)
    return chain


@dataclass(frozen=True)
class SturmChain:
    """Sturm sequence ``p, p', -rem(p, p'), ...`` with strictly decreasing degrees.

    ``exact`` chains hold Python-int coefficient lists (positive multiples of the
    true elements); float chains hold numpy arrays. Both are high degree first.
    """

    polys: tuple
    exact: bool

    @property
    def degrees(self) -> list[int]:
        return [len(q) - 1 for q in self.polys]

    @property
    def gcd_degree(self) -> int:
        """Degree of gcd(p, p'); zero iff p is square-free."""
        return self.degrees[-1]

    def _lead_signs(self) -> list[int]:
        return [_sign(q[0]) for q in self.polys]

    def variations_at_infinity(self, positive: bool) -> int:
        signs = self._lead_signs()
        if not positive:
            signs = [s * (-1) ** dg for s, dg in zip(signs, self.degrees)]
        return _variations(signs)

    def signs_at(self, x) -> list[int]:
        if self.exact:
            x = Fraction(x)
            num, den = x.numerator, x.denominator
            out = []
            for q in self.polys:
                acc = 0
                # den^deg * q(num/den) keeps everything integral
                for i, coef in enumerate(q):
                    acc = acc * num + coef * den**i
                out.append(_sign(acc))
            return out
        return [_sign(np.polyval(q, float(x))) for q in self.polys]

    def variations_at(self, x) -> int:
        if x == math.inf:
            return self.variations_at_infinity(True)
        if x == -math.inf:
            return self.variations_at_infinity(False)
        return _variations(self.signs_at(x))

    def count(self, a=-math.inf, b=math.inf) -> int:
        """Distinct real roots in ``(a, b]``."""
        return self.variations_at(a) - self.variations_at(b)


def sturm_chain(p, exact: bool | None = None) -> SturmChain:
    """Sturm chain of ``p``; ``exact=None`` tries doubles first and falls back to integers."""
    q = _as_real_poly(p)
    if q.d == 0:
        return SturmChain(polys=(_int_coeffs(q.c) if exact else q.c[::-1].astype(float),), exact=bool(exact))
    if not exact:
        fc = _float_chain(q.c)
        if fc is not None:
            return SturmChain(polys=tuple(fc), exact=False)
        if exact is False:
            raise ArithmeticError("double-precision Sturm chain lost accuracy")
    return SturmChain(polys=tuple(_exact_chain(q.c)), exact=True)


def count_real_roots(p, method: str = "auto") -> int:
    """Number of distinct real roots of ``p``.

    ``method``: ``"sturm"`` (exact integer chain), ``"float"`` (double chain,
    raises when unreliable), ``"circle"`` (certified subdivision, raises when
    uncertified) or ``"auto"``: double chain when trustworthy, then the circle
    route, then the exact chain.
    """
    q = _as_real_poly(p)
    if q.d == 0:
        return 0
    if method == "sturm":
        return sturm_chain(q, exact=True).count()
    if method == "float":
        return sturm_chain(q, exact=False).count()
    if method == "circle":
        counts, ok = count_real_roots_circle(q.c[None, :] / _circle_scale(q.d), q.d)
        if not ok[0]:
            raise ArithmeticError("circle subdivision could not certify the count")
        return int(counts[0])
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    fc = _float_chain(q.c)
    if fc is not None:
        chain = SturmChain(polys=tuple(fc), exact=False)
        n = chain.count()
        # square-free real polynomials have as many real roots as their degree, mod 2
        if chain.gcd_degree == 0 and n % 2 == q.d % 2:
            return n
    counts, ok = count_real_roots_circle(q.c[None, :] / _circle_scale(q.d), q.d)
    if ok[0]:
        return int(counts[0])
    return sturm_chain(q, exact=True).count()


# --- isolation ------------------------------------------------------------------------


@dataclass(frozen=True)
class RootBracket:
    """Closed interval with rational endpoints holding exactly one distinct real root."""

    lo: Fraction
    hi: Fraction
    multiple: bool = False

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi


def _cauchy_bound_pow2(c: np.ndarray) -> Fraction:
    lead = abs(c[-1])
    bound = 1.0 + max(abs(x) / lead for x in c[:-1]) if c.size > 1 else 1.0
    return Fraction(2) ** max(1, math.ceil(math.log2(bound)) + 1)


def isolate_real_roots(p, tol: float | None = None) -> list[RootBracket]:
    """Disjoint brackets, one per distinct real root, via an exact Sturm chain.

    Repeated roots are reported once with ``multiple=True``. With ``tol`` the
    brackets are bisected further until narrower than ``tol``.
    """
    q = _as_real_poly(p)
    if q.d == 0:
        return []
    chain = sturm_chain(q, exact=True)
    sqfree = chain.gcd_degree == 0
    B = _cauchy_bound_pow2(q.c)
    found: list[tuple[Fraction, Fraction]] = []
    stack = [(-B, B, chain.count(-B, B))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            found.append((a, b))
            continue
        m = (a + b) / 2
        if chain.signs_at(m)[0] == 0:
            # exact root at the split point: give it a degenerate bracket
            found.append((m, m))
            eps = (b - a) / 4
            while chain.count(m - eps, m + eps) != 1 or chain.signs_at(m - eps)[0] == 0 or chain.signs_at(m + eps)[0] == 0:
                eps /= 2
            stack.append((a, m - eps, chain.count(a, m - eps)))
            stack.append((m + eps, b, chain.count(m + eps, b)))
            continue
        stack.append((a, m, chain.count(a, m)))
        stack.append((m, b, chain.count(m, b)))
    found.sort()
    mult = _multiple_roots(q, chain) if not sqfree else None
    out = []
    for a, b in found:
        if tol is not None:
            a, b = _refine(chain, a, b, Fraction(tol))
        multiple = bool(mult) and any(a <= Fraction(x) <= b for x in mult)
        out.append(RootBracket(a, b, multiple))
    return out


def _multiple_roots(q: Poly1, chain: SturmChain) -> list[float]:
    g = chain.polys[-1]
    gp = Poly1(np.array([float(Fraction(x, g[0])) for x in g[::-1]]))
    return [b.midpoint for b in isolate_real_roots(gp, tol=1e-12)] if gp.d > 0 else []


def _refine(chain: SturmChain, a: Fraction, b: Fraction, tol: Fraction):
    while b - a > tol:
        m = (a + b) / 2
        if chain.signs_at(m)[0] == 0:
            return m, m
        if chain.count(a, m) == 1:
            b = m
        else:
            a = m
    return a, b


def refine_bracket(p, bracket: RootBracket, tol: float = 1e-12) -> RootBracket:
    chain = sturm_chain(p, exact=True)
    a, b = _refine(chain, bracket.lo, bracket.hi, Fraction(tol))
    return RootBracket(a, b, bracket.multiple)


# --- certified circle subdivision -----------------------------------------------------


def _circle_scale(d: int) -> np.ndarray:
    """``sqrt(binom(d, j))``: monomial coefficients divided by this are circle coordinates."""
    return np.exp(0.5 * np.array([math.lgamma(d + 1) - math.lgamma(j + 1) - math.lgamma(d - j + 1) for j in range(d + 1)]))


def _circle_basis(theta: np.ndarray, d: int) -> np.ndarray:
    """Rows ``sqrt(binom(d, j)) cos^(d-j) sin^j`` at each angle; every row has unit norm."""
    c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
    j = np.arange(d + 1)[None, :]
    half_logc = 0.5 * np.array([math.lgamma(d + 1) - math.lgamma(k + 1) - math.lgamma(d - k + 1) for k in range(d + 1)])
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = half_logc[None, :] + np.where(j < d, (d - j) * np.log(np.abs(c)), 0.0) + np.where(j > 0, j * np.log(np.abs(s)), 0.0)
    sign = np.where((c < 0) & ((d - j) % 2 == 1), -1.0, 1.0) * np.where((s < 0) & (j % 2 == 1), -1.0, 1.0)
    return sign * np.exp(logmag)


def _circle_derivative(a: np.ndarray, d: int) -> np.ndarray:
    """Circle coordinates of ``d/dtheta`` of the form with coordinates ``a`` (rows)."""
    k = np.arange(d + 1)
    out = np.zeros_like(a)
    up = np.sqrt((k[:-1] + 1) * (d - k[:-1]))
    down = np.sqrt(k[1:] * (d - k[1:] + 1))
    out[:, :-1] += up * a[:, 1:]
    out[:, 1:] -= down * a[:, :-1]
    return out


def count_real_roots_circle(a, d: int, cells: int | None = None, max_depth: int = 40, phase: float = 0.1234567):
    """Certified real-root counts on RP^1 for many degree-``d`` forms at once.

    ``a`` holds one row per polynomial in circle coordinates, i.e. the form
    ``sum_j a_j sqrt(binom(d,j)) cos^(d-j) sin^j``; for a Kostlan sample these
    are its orthonormal coordinates. A root at ``theta = pi/2`` is the root at
    infinity. Returns ``(counts, certified)``; uncertified rows carry count -1.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    nb = a.shape[0]
    if cells is None:
        cells = max(64, 1 << math.ceil(math.log2(8 * d)))
    h = math.pi / cells
    if d * h / 2 >= 0.5:
        raise ValueError("too few cells for the Bernstein bound")
    ap = _circle_derivative(a, d)
    theta = phase + h * np.arange(cells + 1)
    E = _circle_basis(theta, d)
    F = E @ a.T  # (cells+1, nb)
    Fp = E @ ap.T
    # rounding error of a dot product against a unit-norm basis row
    err0 = 4.0 * (d + 2) * EPS * np.linalg.norm(a, axis=1)
    err1 = 4.0 * (d + 2) * EPS * np.linalg.norm(ap, axis=1)
    shrink = 1.0 - d * h / 2
    M1 = (np.abs(Fp).max(axis=0) + err1) / shrink
    M2 = d * M1

    certified = np.ones(nb, dtype=bool)
    sign_ok = np.abs(F) > err0
    certified &= sign_ok.all(axis=0)
    counts = np.zeros(nb, dtype=np.int64)

    def classify(fa, fb, ga, gb, width, rows):
        free = np.abs(fa) + np.abs(fb) > width * M1[rows] + 2 * err0[rows]
        mono = ~free & (np.abs(ga) + np.abs(gb) > width * M2[rows] + 2 * err1[rows])
        return free, mono

    rows = np.broadcast_to(np.arange(nb)[None, :], F[:-1].shape)
    fa, fb, ga, gb = F[:-1], F[1:], Fp[:-1], Fp[1:]
    free, mono = classify(fa, fb, ga, gb, h, rows)
    crossing = mono & (np.sign(fa) != np.sign(fb))
    counts += crossing.sum(axis=0)
    todo = ~(free | mono)
    cell_idx, row_idx = np.nonzero(todo)
    lo = theta[cell_idx]
    hi = theta[cell_idx + 1]
    wfa, wfb = F[cell_idx, row_idx], F[cell_idx + 1, row_idx]
    wga, wgb = Fp[cell_idx, row_idx], Fp[cell_idx + 1, row_idx]
    width = h
    depth = 0
    while row_idx.size:
        depth += 1
        width /= 2
        if depth > max_depth:
            certified[row_idx] = False
            break
        mid = (lo + hi) / 2
        Em = _circle_basis(mid, d)
        fm = np.einsum("ij,ij->i", Em, a[row_idx])
        gm = np.einsum("ij,ij->i", Em, ap[row_idx])
        certified[row_idx[np.abs(fm) <= err0[row_idx]]] = False
        # children: [lo, mid] and [mid, hi]
        c_row = np.concatenate([row_idx, row_idx])
        c_lo = np.concatenate([lo, mid])
        c_hi = np.concatenate([mid, hi])
        c_fa = np.concatenate([wfa, fm])
        c_fb = np.concatenate([fm, wfb])
        c_ga = np.concatenate([wga, gm])
        c_gb = np.concatenate([gm, wgb])
        free, mono = classify(c_fa, c_fb, c_ga, c_gb, width, c_row)
        crossing = mono & (np.sign(c_fa) != np.sign(c_fb))
        np.add.at(counts, c_row[crossing], 1)
        keep = ~(free | mono)
        row_idx, lo, hi = c_row[keep], c_lo[keep], c_hi[keep]
        wfa, wfb, wga, wgb = c_fa[keep], c_fb[keep], c_ga[keep], c_gb[keep]
    counts[~certified] = -1
    return counts, certified


def count_real_roots_batch(a, d: int) -> np.ndarray:
    """Real-root counts for rows of orthonormal coordinates; uncertified rows go through Sturm."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    counts, ok = count_real_roots_circle(a, d)
    if not ok.all():
        scale = _circle_scale(d)
        for i in np.flatnonzero(~ok):
            counts[i] = count_real_roots(Poly1(a[i] * scale), method="sturm")
    return counts


# --- isolation on many short segments (used for curve/box-edge crossings) -------------


def _taylor_at(c: np.ndarray, m: np.ndarray):
    """Taylor coefficients at ``m`` of each row polynomial (low degree first), with error bounds."""
    nrow, n1 = c.shape
    b = np.zeros_like(c)
    babs = np.zeros_like(c)
    ca = np.abs(c)
    ma = np.abs(m)
    # synthetic division repeated n1 times yields the shifted coefficients
    work = c.copy()
    wabs = ca.copy()
    for j in range(n1):
        acc = np.zeros(nrow)
        accabs = np.zeros(nrow)
        for i in range(n1 - 1, j - 1, -1):
            acc = acc * m + work[:, i]
            accabs = accabs * ma + wabs[:, i]
            work[:, i] = acc
            wabs[:, i] = accabs
        b[:, j] = work[:, j]
        babs[:, j] = wabs[:, j]
    err = 4.0 * (2 * n1 + 2) * EPS * babs
    return b, err


def _horner_rows(c: np.ndarray, x: np.ndarray):
    acc = np.zeros(c.shape[0])
    accabs = np.zeros(c.shape[0])
    xa = np.abs(x)
    for i in range(c.shape[1] - 1, -1, -1):
        acc = acc * x + c[:, i]
        accabs = accabs * xa + np.abs(c[:, i])
    return acc, 4.0 * (2 * c.shape[1] + 2) * EPS * accabs


@dataclass
class SegmentRoots:
    """Roots of one univariate polynomial inside one closed segment."""

    roots: list
    ok: bool


def isolate_on_segments(c, lo, hi, coeff_err=None, max_depth: int = 48, refine_steps: int = 60) -> list[SegmentRoots]:
    """Certified isolation of the real roots of row polynomial ``c[i]`` in ``[lo[i], hi[i]]``.

    Interval subdivision with centred (Taylor-form) enclosures: a piece is
    settled when the enclosure of the polynomial excludes zero, or when that
    of its derivative does and the endpoint signs decide the single crossing.
    Roots are refined by bisection to near machine precision. A segment whose
    endpoint value cannot be signed, or that needs more than ``max_depth``
    halvings (tangency, multiple root), is returned with ``ok=False``.
    ``coeff_err`` bounds the absolute error already present in ``c`` (same
    shape); it widens every enclosure so the result holds for the exact input.
    """
    c = np.atleast_2d(np.asarray(c, dtype=float))
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    cerr = np.zeros_like(c) if coeff_err is None else np.atleast_2d(np.asarray(coeff_err, dtype=float))
    nseg = c.shape[0]
    out = [SegmentRoots([], True) for _ in range(nseg)]
    n1 = c.shape[1]
    dcoef = np.arange(n1, dtype=float)

    v_lo, e_lo = _horner_rows(c, lo)
    v_hi, e_hi = _horner_rows(c, hi)
    e_lo += _horner_rows(cerr, np.abs(lo))[0]
    e_hi += _horner_rows(cerr, np.abs(hi))[0]
    bad = (np.abs(v_lo) <= e_lo) | (np.abs(v_hi) <= e_hi)
    for i in np.flatnonzero(bad):
        out[i].ok = False

    seg = np.flatnonzero(~bad)
    a, b = lo[seg], hi[seg]
    fa, fb = v_lo[seg], v_hi[seg]
    found_seg, found_a, found_b, found_fa = [], [], [], []
    depth = 0
    while seg.size:
        m = (a + b) / 2
        r = (b - a) / 2
        tb, terr = _taylor_at(c[seg], m)
        powers = r[:, None] ** np.arange(n1)[None, :]
        reach = np.abs(m) + r
        pert0 = _horner_rows(cerr[seg], reach)[0]
        pert1 = _horner_rows(cerr[seg, 1:] * dcoef[1:], reach)[0] if n1 > 1 else 0.0
        rad0 = ((np.abs(tb[:, 1:]) + terr[:, 1:]) * powers[:, 1:]).sum(axis=1) + terr[:, 0] + pert0
        no_root = np.abs(tb[:, 0]) > rad0 * (1 + 4 * EPS)
        if n1 > 1:
            rad1 = ((np.abs(tb[:, 2:]) + terr[:, 2:]) * dcoef[2:] * powers[:, 1:-1]).sum(axis=1) + terr[:, 1] + pert1
            mono = ~no_root & (np.abs(tb[:, 1]) > rad1 * (1 + 4 * EPS))
        else:
            mono = np.zeros_like(no_root)
        cross = mono & (np.sign(fa) != np.sign(fb))
        found_seg.append(seg[cross])
        found_a.append(a[cross])
        found_b.append(b[cross])
        found_fa.append(fa[cross])
        keep = ~(no_root | mono)
        if not keep.any():
            break
        depth += 1
        seg, a, b, fa, fb, m = seg[keep], a[keep], b[keep], fa[keep], fb[keep], m[keep]
        if depth > max_depth:
            for i in np.unique(seg):
                out[i].ok = False
            break
        fm, em = _horner_rows(c[seg], m)
        em += _horner_rows(cerr[seg], np.abs(m))[0]
        unsure = np.abs(fm) <= em
        for i in np.unique(seg[unsure]):
            out[i].ok = False
        seg = np.concatenate([seg, seg])
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])

    if found_seg:
        s = np.concatenate(found_seg)
        a, b, fa = np.concatenate(found_a), np.concatenate(found_b), np.concatenate(found_fa)
        sa = np.sign(fa)
        for _ in range(refine_steps):
            m = (a + b) / 2
            fm, _ = _horner_rows(c[s], m)
            left = np.sign(fm) == sa
            a = np.where(left, m, a)
            b = np.where(left, b, m)
        roots = (a + b) / 2
        for i, x in zip(s.tolist(), roots.tolist()):
            out[i].roots.append(x)
        for sr in out:
            sr.roots.sort()
    return out


# --- complex roots --------------------------------------------------------------------


def fujiwara_bound(c: np.ndarray) -> float:
    """Fujiwara's bound on root moduli for coefficients ``c`` (low degree first, c[-1] != 0)."""
    n = c.size - 1
    lead = abs(c[-1])
    terms = [abs(c[n - k]) / lead for k in range(1, n + 1)]
    terms[-1] /= 2.0
    return 2.0 * max(t ** (1.0 / k) for k, t in enumerate(terms, start=1))


def initial_guesses(c: np.ndarray) -> np.ndarray:
    """Starting points on circles read off the Newton polygon of ``log|c_j|``.

    Each edge of the upper convex hull spanning ``m`` indices contributes
    ``m`` points on a circle whose radius is the edge's slope; radii are capped
    by the Fujiwara bound and angles carry a golden-angle offset. A single
    circle of radius equal to the bound is the degenerate one-edge case.
    """
    n = c.size - 1
    R = fujiwara_bound(c)
    with np.errstate(divide="ignore"):
        logc = np.log(np.abs(c))
    pts = [i for i in range(n + 1) if np.isfinite(logc[i])]
    hull: list[int] = []
    for i in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or below the chord a -> i
            if (logc[b] - logc[a]) * (i - a) <= (logc[i] - logc[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    if hull[0] != 0:
        hull.insert(0, 0)
    z = np.empty(n, dtype=complex)
    pos = 0
    for k, (a, b) in enumerate(zip(hull, hull[1:])):
        m = b - a
        if np.isfinite(logc[a]):
            radius = min(R, math.exp((logc[a] - logc[b]) / m))
        else:
            radius = R * EPS
        ang = 2 * np.pi * np.arange(m) / m + 2 * np.pi * k / n + GOLDEN_ANGLE
        z[pos : pos + m] = radius * np.exp(1j * ang)
        pos += m
    return z


def _newton_ratio(c: np.ndarray, z: np.ndarray):
    """``p(z)/p'(z)`` and the backward-error ratio ``|p(z)| / sum |c_j||z|^j``, stable for large |z|."""
    n = c.size - 1
    ratio = np.empty(z.shape, dtype=complex)
    berr = np.empty(z.shape)
    inside = np.abs(z) <= 1.0
    if inside.any():
        zi = z[inside]
        p = np.full(zi.shape, c[-1], dtype=complex)
        dp = np.zeros(zi.shape, dtype=complex)
        s = np.full(zi.shape, abs(c[-1]))
        za = np.abs(zi)
        for coef in c[-2::-1]:
            dp = dp * zi + p
            p = p * zi + coef
            s = s * za + abs(coef)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[inside] = p / dp
        berr[inside] = np.abs(p) / s
    if (~inside).any():
        w = 1.0 / z[~inside]
        rc = c[::-1]
        q = np.full(w.shape, rc[-1], dtype=complex)
        dq = np.zeros(w.shape, dtype=complex)
        s = np.full(w.shape, abs(rc[-1]))
        wa = np.abs(w)
        for coef in rc[-2::-1]:
            dq = dq * w + q
            q = q * w + coef
            s = s * wa + abs(coef)
        # p(z) = z^n q(1/z)  =>  p/p' = z q / (n q - w q')
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[~inside] = z[~inside] * q / (n * q - w * dq)
        berr[~inside] = np.abs(q) / s
    return ratio, berr


def complex_roots(p, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """All ``d`` complex roots of ``p`` (with multiplicity) by Aberth-Ehrlich iteration.

    Starts from :func:`initial_guesses`. Every returned root
    has backward error ``|p(z)| <= tol * sum |c_j| |z|^j``; otherwise
    :class:`RootFindingError` is raised with the last iterate attached.
    A vanishing leading coefficient lowers the degree (roots at infinity are
    not returned).
    """
    q = p if isinstance(p, Poly1) else Poly1(p)
    if q.is_zero:
        raise ValueError("the zero polynomial has no finite root set")
    q = q.trimmed()
    c = q.c.astype(complex)
    # exact zero roots are split off so the iteration only sees c[0] != 0
    nz = int(np.argmax(c != 0))
    if nz:
        return np.concatenate([np.zeros(nz, dtype=complex), complex_roots(Poly1(c[nz:]), tol, max_iter)])
    n = q.d
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    z = initial_guesses(c)
    active = np.ones(n, dtype=bool)
    polish_tol = 4 * n * EPS
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ratio, berr = _newton_ratio(c, z[idx])
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        s = (1.0 / diff).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = ratio / (1.0 - ratio * s)
        finite = np.isfinite(step)
        z[idx] -= np.where(finite, step, 0.0)
        done = (berr <= polish_tol) | (finite & (np.abs(step) <= 4 * EPS * np.abs(z[idx])))
        active[idx[done]] = False
    _, berr = _newton_ratio(c, z)
    if not np.all(berr <= tol):
        raise RootFindingError(
            f"Aberth iteration did not converge for degree {n} (worst backward error {berr.max():.2e})", partial=z
        )
    return z


def real_roots_from_complex(roots: np.ndarray, p=None, imag_tol: float = 1e-8) -> np.ndarray:
    """Real parts of roots whose imaginary part is negligible (after one Newton polish if ``p`` given)."""
    z = np.asarray(roots, dtype=complex)
    if p is not None:
        c = (p if isinstance(p, Poly1) else Poly1(p)).trimmed().c.astype(complex)
        ratio, _ = _newton_ratio(c, z)
        z = z - np.where(np.isfinite(ratio), ratio, 0.0)
    tol = imag_tol * np.maximum(1.0, np.abs(z))
    return np.sort(z[np.abs(z.imag) < tol].real)
