"""Independent reference computations used only by the tests."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def grid_values(c: np.ndarray, window, n: int) -> np.ndarray:
    """Values of ``sum c[j, k] x^j y^k`` on an (n+1) x (n+1) vertex grid, indexed [ix, iy]."""
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    # Horner in x of Horner-in-y rows, on the full grid
    d = c.shape[0] - 1
    rows = [np.polynomial.polynomial.polyval(ys, c[j]) for j in range(d + 1)]
    out = np.zeros((n + 1, n + 1))
    for j in range(d, -1, -1):
        out = out * xs[:, None] + rows[j][None, :]
    return out


def sign_grid_b0(c: np.ndarray, window, n: int) -> int:
    """Components of the marching-squares approximation of ``p = 0`` on an n x n cell grid.

    Sign-change edges are graph nodes; each cell joins its sign-change edges,
    resolving saddles by the sign at the cell centre.
    """
    v = grid_values(c, window, n)
    s = v >= 0
    x0, x1, y0, y1 = window
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    # horizontal edge (i, j)-(i+1, j) has id i*(n+1)+j; vertical edge (i, j)-(i, j+1) comes after
    nh = n * (n + 1)
    hchg = s[:-1, :] != s[1:, :]
    vchg = s[:, :-1] != s[:, 1:]
    hid = np.arange(nh).reshape(n, n + 1)
    vid = nh + np.arange((n + 1) * n).reshape(n + 1, n)
    bottom, top = hid[:, :-1], hid[:, 1:]
    left, right = vid[:-1, :], vid[1:, :]
    cb, ct, cl, cr = hchg[:, :-1], hchg[:, 1:], vchg[:-1, :], vchg[1:, :]
    cnt = cb.astype(int) + ct + cl + cr
    src, dst = [], []

    def join(mask, a, b):
        src.append(a[mask])
        dst.append(b[mask])

    two = cnt == 2
    pairs = [(cb, ct, bottom, top), (cb, cl, bottom, left), (cb, cr, bottom, right),
             (ct, cl, top, left), (ct, cr, top, right), (cl, cr, left, right)]
    for ma, mb, a, b in pairs:
        join(two & ma & mb, a, b)
    four = cnt == 4
    if four.any():
        ii, jj = np.nonzero(four)
        xc = x0 + (ii + 0.5) * hx
        yc = y0 + (jj + 0.5) * hy
        centre = np.zeros(ii.size)
        d = c.shape[0] - 1
        for j in range(d, -1, -1):
            centre = centre * xc + np.polynomial.polynomial.polyval(yc, c[j])
        bl = s[ii, jj]
        same_as_bl = (centre >= 0) == bl
        m = np.zeros_like(four)
        m[ii[same_as_bl], jj[same_as_bl]] = True
        # centre joins bl and tr: the curve cuts off br and tl
        join(m, bottom, right)
        join(m, top, left)
        m2 = four & ~m
        join(m2, bottom, left)
        join(m2, top, right)
    nodes = np.concatenate([hid[hchg], vid[vchg]])
    if nodes.size == 0:
        return 0
    src = np.concatenate(src) if src else np.zeros(0, dtype=int)
    dst = np.concatenate(dst) if dst else np.zeros(0, dtype=int)
    total = nh + (n + 1) * n
    g = coo_matrix((np.ones(src.size), (src, dst)), shape=(total, total))
    _, labels = connected_components(g, directed=False)
    return int(np.unique(labels[nodes]).size)


def stable_sign_grid_b0(c: np.ndarray, window, n0: int = 1024, n_max: int = 8192) -> int | None:
    """Oracle value once doubling the grid leaves it unchanged; None if it never settles."""
    prev = sign_grid_b0(c, window, n0)
    n = n0
    while n < n_max:
        n *= 2
        cur = sign_grid_b0(c, window, n)
        if cur == prev:
            return cur
        prev = cur
    return None


@lru_cache(maxsize=4)
def _cube_surface(n: int):
    """Lattice points on the surface of the cube ``[-n, n]^3`` and their axis-neighbour pairs."""
    r = np.arange(-n, n + 1)
    a, b = np.meshgrid(r, r, indexing="ij")
    a, b = a.ravel(), b.ravel()
    faces = []
    for ax in range(3):
        for side in (-n, n):
            f = np.empty((a.size, 3), dtype=np.int64)
            others = [k for k in range(3) if k != ax]
            f[:, ax] = side
            f[:, others[0]] = a
            f[:, others[1]] = b
            faces.append(f)
    pts = np.unique(np.concatenate(faces), axis=0)
    # encode lattice points as integers to look neighbours up by binary search
    w = 2 * n + 1
    key = ((pts[:, 0] + n) * w + pts[:, 1] + n) * w + pts[:, 2] + n
    order = np.argsort(key)
    key_sorted = key[order]
    src, dst = [], []
    for ax in range(3):
        step = np.zeros(3, dtype=np.int64)
        step[ax] = 1
        nb = pts + step
        ok = nb[:, ax] <= n
        nkey = ((nb[:, 0] + n) * w + nb[:, 1] + n) * w + nb[:, 2] + n
        pos = np.clip(np.searchsorted(key_sorted, nkey), 0, key.size - 1)
        hit = ok & (key_sorted[pos] == nkey)
        src.append(np.flatnonzero(hit))
        dst.append(order[pos[hit]])
    return pts / float(n), np.concatenate(src), np.concatenate(dst)


def sphere_sign_b0(H, n: int = 200) -> int:
    """``b0`` of the real projective curve of the ternary form ``H`` from sign regions on the sphere.

    On S^2 the curve lifts to circles (two per oval, one per pseudo-line) that
    cut the sphere into ``circles + 1`` regions, giving ``b0 = (regions - 1) / 2``
    for even degree and ``regions / 2`` for odd degree.
    """
    pts, src, dst = _cube_surface(n)
    v = H(pts[:, 0], pts[:, 1], pts[:, 2])
    s = v >= 0
    same = s[src] == s[dst]
    m = len(pts)
    g = coo_matrix((np.ones(int(same.sum())), (src[same], dst[same])), shape=(m, m))
    regions, _ = connected_components(g, directed=False)
    return (regions - 1) // 2 if H.d % 2 == 0 else regions // 2


def stable_sphere_sign_b0(H, n0: int = 100, n_max: int = 400) -> int | None:
    """:func:`sphere_sign_b0` once two successive resolutions agree, else None."""
    prev = sphere_sign_b0(H, n0)
    n = 2 * n0
    while n <= n_max:
        cur = sphere_sign_b0(H, n)
        if cur == prev:
            return cur
        prev, n = cur, 2 * n
    return None
