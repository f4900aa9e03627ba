"""Certified count of connected components of real plane curves.

A quadtree splits the window until every leaf either misses the curve or has
a partial derivative of constant sign. In a leaf where ``dp/dx != 0`` the
curve is a union of graphs ``x = g(y)``, so the crossings on the leaf's
boundary, listed bottom to top, pair up consecutively into arcs (and
symmetrically for ``dp/dy``). Crossings are located once per grid line by
certified univariate isolation, so neighbouring leaves share them exactly;
a union-find over the arcs then counts the components.

Projective mode runs the same on the unit box of each of the three standard
charts of RP^2 and glues crossings on the box boundaries, which are the
overlaps between charts.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .ensemble import normal_stream, uniform_stream
from .interval import Box2, box_enclosures, interval_eval, restrict_line
from .polycore import CHARTS, HomPoly, Poly2, chart_lift, chart_point, dehomogenize, homogenize
from .roots1d import isolate_on_segments

CERTIFIED = "certified"
UNCERTIFIED = "uncertified"
SINGULAR_SUSPECT = "singular-suspect"

NO_CURVE = "no-curve"
SMOOTH_ARCS = "smooth-arcs"
UNKNOWN = "unknown"

DEFAULT_WINDOW = (-8.0, 8.0, -8.0, 8.0)
GLUE_TOL = 1e-9
# auxiliary random stream for shears and split jitter, disjoint from coefficients
TOPOLOGY_STREAM = 3


@dataclass(frozen=True)
class TopologyOptions:
    max_depth: int = 12
    edge_root_tol: float = 1e-12
    max_attempts: int = 3


@dataclass
class ArcGraph:
    """Boundary crossings (vertices) joined by in-leaf arcs and chart gluings (edges)."""

    vertices: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    on_boundary: list = field(default_factory=list)

    def components(self) -> list[int]:
        """Component label per vertex."""
        uf = _UnionFind(len(self.vertices))
        for a, b in self.edges:
            uf.union(a, b)
        return [uf.find(i) for i in range(len(self.vertices))]

    def to_json(self) -> dict:
        return {
            "vertices": [list(map(float, v[:2])) + list(v[2:]) for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "on_boundary": list(self.on_boundary),
        }


@dataclass
class TopologyResult:
    b0: int
    status: str
    arc_graph: ArcGraph
    max_depth_used: int
    window: object
    truncated: int = 0
    attempts: int = 1
    transform: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self, include_graph: bool = False) -> dict:
        out = {
            "b0": self.b0,
            "status": self.status,
            "max_depth_used": self.max_depth_used,
            "window": self.window if isinstance(self.window, str) else self.window.to_json(),
            "truncated": self.truncated,
            "attempts": self.attempts,
            "transform": self.transform,
        }
        if include_graph:
            out["arc_graph"] = self.arc_graph.to_json()
        return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so labels do not depend on union order
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class _Degenerate(Exception):
    """Non-generic position (crossing at a corner, tangency to an edge, failed gluing)."""


def certify_smooth(p: Poly2, b: Box2) -> str:
    """``no-curve`` if p has no zero on ``b``; ``smooth-arcs`` if a partial keeps its sign; else ``unknown``."""
    if interval_eval(p, b).excludes_zero():
        return NO_CURVE
    if p.d >= 1 and (interval_eval(p.dx(), b).excludes_zero() or interval_eval(p.dy(), b).excludes_zero()):
        return SMOOTH_ARCS
    return UNKNOWN


# --- quadtree ---------------------------------------------------------------------------


@dataclass
class _Leaves:
    boxes: np.ndarray  # (n, 4): x0, x1, y0, y1
    kind: np.ndarray  # 0: x-monotone (dp/dx != 0), 1: y-monotone
    unknown: int
    singular: int
    max_depth_used: int


def _subdivide(A: np.ndarray, window, max_depth: int, jitter=None) -> _Leaves:
    x0, x1, y0, y1 = (np.array([v], dtype=float) for v in window)
    depth = 0
    smooth_boxes, smooth_kind = [], []
    unknown = singular = 0
    used = 0
    while x0.size:
        used = depth
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        grow = 1.0 + 4.0 * np.finfo(float).eps
        rx = np.maximum(cx - x0, x1 - cx) * grow
        ry = np.maximum(cy - y0, y1 - cy) * grow
        enc = box_enclosures(A, cx, cy, rx, ry)
        nocurve = enc.p_excludes_zero()
        sx = ~nocurve & enc.px_excludes_zero()
        sy = ~nocurve & ~sx & enc.py_excludes_zero()
        smooth = sx | sy
        if smooth.any():
            smooth_boxes.append(np.stack([x0[smooth], x1[smooth], y0[smooth], y1[smooth]], axis=1))
            smooth_kind.append(np.where(sx[smooth], 0, 1))
        rest = ~(nocurve | smooth)
        if not rest.any():
            break
        if depth >= max_depth:
            unknown = int(rest.sum())
            # no sign certificate for p, dp/dx or dp/dy: a singular point may sit here
            singular = int((~enc.px_excludes_zero() & ~enc.py_excludes_zero() & rest).sum())
            break
        x0, x1, y0, y1 = x0[rest], x1[rest], y0[rest], y1[rest]
        t = 0.5 if jitter is None else jitter[depth]
        mx = 0.5 * (x0 + x1) if t == 0.5 else x0 + (x1 - x0) * t
        my = 0.5 * (y0 + y1) if t == 0.5 else y0 + (y1 - y0) * t
        x0, x1 = np.concatenate([x0, mx, x0, mx]), np.concatenate([mx, x1, mx, x1])
        y0, y1 = np.concatenate([y0, y0, my, my]), np.concatenate([my, my, y1, y1])
        depth += 1
    boxes = np.concatenate(smooth_boxes) if smooth_boxes else np.zeros((0, 4))
    kind = np.concatenate(smooth_kind) if smooth_kind else np.zeros(0, dtype=int)
    return _Leaves(boxes, kind, unknown, singular, used)


# --- crossings on leaf edges ------------------------------------------------------------


@dataclass
class _Crossings:
    """Crossings found on every leaf edge of one chart or window."""

    points: list  # (x, y)
    boundary: list  # bool: lies on the window boundary
    per_edge: dict  # (leaf, side) -> list of crossing ids ordered along the edge


def _edge_crossings(A: np.ndarray, leaves: _Leaves, window, tol: float) -> _Crossings:
    wx0, wx1, wy0, wy1 = window
    # lines: (axis, coordinate) -> list of (lo, hi, leaf, side); axis 0 is x = const
    lines: dict = {}
    for i, (x0, x1, y0, y1) in enumerate(leaves.boxes.tolist()):
        lines.setdefault((0, x0), []).append((y0, y1, i, "left"))
        lines.setdefault((0, x1), []).append((y0, y1, i, "right"))
        lines.setdefault((1, y0), []).append((x0, x1, i, "bottom"))
        lines.setdefault((1, y1), []).append((x0, x1, i, "top"))

    rows, errs, lo, hi, seg_ref = [], [], [], [], []
    line_info = {}
    for key in sorted(lines):
        axis, c = key
        edges = lines[key]
        ends = sorted({e[0] for e in edges} | {e[1] for e in edges})
        pos = {v: k for k, v in enumerate(ends)}
        covered = np.zeros(len(ends) - 1, dtype=bool)
        for a, b, _, _ in edges:
            covered[pos[a] : pos[b]] = True
        coef, cerr = restrict_line(A, axis, c)
        first = len(lo)
        for k in np.flatnonzero(covered):
            rows.append(coef)
            errs.append(cerr)
            lo.append(ends[k])
            hi.append(ends[k + 1])
            seg_ref.append((key, k))
        line_info[key] = (ends, pos, first)

    points, boundary = [], []
    seg_ids: dict = {}
    if rows:
        res = isolate_on_segments(np.array(rows), np.array(lo), np.array(hi), coeff_err=np.array(errs))
        for (key, k), sr in zip(seg_ref, res):
            if not sr.ok:
                raise _Degenerate(f"edge isolation failed on line {key}")
            axis, c = key
            on_bd = (axis == 0 and c in (wx0, wx1)) or (axis == 1 and c in (wy0, wy1))
            ids = []
            for t in sr.roots:
                ids.append(len(points))
                points.append((c, t) if axis == 0 else (t, c))
                boundary.append(on_bd)
            seg_ids[(key, k)] = ids

    per_edge = {}
    for key, edges in lines.items():
        ends, pos, _ = line_info[key]
        for a, b, leaf, side in edges:
            ids = []
            for k in range(pos[a], pos[b]):
                ids.extend(seg_ids.get((key, k), ()))
            per_edge[(leaf, side)] = ids
    return _Crossings(points, boundary, per_edge)


def _pair_leaf(kind: int, leaf: int, cr: _Crossings, scale: float, tol: float) -> list[tuple[int, int]]:
    """Arcs inside one monotone leaf as pairs of crossing ids."""
    pe = cr.per_edge
    if kind == 0:
        first, last, sides, coord = pe[(leaf, "bottom")], pe[(leaf, "top")], ("left", "right"), 1
    else:
        first, last, sides, coord = pe[(leaf, "left")], pe[(leaf, "right")], ("bottom", "top"), 0
    if len(first) > 1 or len(last) > 1:
        raise _Degenerate("monotone edge with several crossings")
    middle = sorted(pe[(leaf, sides[0])] + pe[(leaf, sides[1])], key=lambda i: cr.points[i][coord])
    vals = [cr.points[i][coord] for i in middle]
    if any(b - a <= tol * scale for a, b in zip(vals, vals[1:])):
        raise _Degenerate("crossings on opposite edges too close to order")
    seq = list(first) + middle + list(last)
    if len(seq) % 2:
        raise _Degenerate("odd number of crossings in a monotone leaf")
    return [(seq[i], seq[i + 1]) for i in range(0, len(seq), 2)]


@dataclass
class _ChartGraph:
    crossings: _Crossings
    arcs: list
    leaves: _Leaves


def _chart_graph(A: np.ndarray, window, opts: TopologyOptions, jitter=None) -> _ChartGraph:
    leaves = _subdivide(A, window, opts.max_depth, jitter)
    cr = _edge_crossings(A, leaves, window, opts.edge_root_tol)
    scale = max(abs(v) for v in window) or 1.0
    arcs = []
    for leaf, kind in enumerate(leaves.kind.tolist()):
        arcs.extend(_pair_leaf(kind, leaf, cr, scale, opts.edge_root_tol))
    return _ChartGraph(cr, arcs, leaves)


def _status(leaves_list) -> str:
    if any(lv.singular for lv in leaves_list):
        return SINGULAR_SUSPECT
    if any(lv.unknown for lv in leaves_list):
        return UNCERTIFIED
    return CERTIFIED


def _check_degrees(graph: ArcGraph, expected_boundary: int) -> None:
    deg = [0] * len(graph.vertices)
    for a, b in graph.edges:
        deg[a] += 1
        deg[b] += 1
    for v, on_bd in enumerate(graph.on_boundary):
        if deg[v] != (expected_boundary if on_bd else 2):
            raise _Degenerate("crossing not shared by exactly two arcs")


def _count(graph: ArcGraph) -> tuple[int, int]:
    labels = graph.components()
    comps = set(labels)
    truncated = {labels[i] for i, bd in enumerate(graph.on_boundary) if bd}
    return len(comps), len(truncated)


def _as_poly2(p) -> Poly2:
    if isinstance(p, Poly2):
        return p
    if hasattr(p, "to_poly"):
        return p.to_poly()
    raise TypeError("expected a Poly2 or a bivariate KostlanSample")


def _trivial(p: Poly2, window) -> TopologyResult | None:
    if not np.any(p.c):
        raise ValueError("the zero polynomial has no curve")
    if not np.any(p.c.ravel()[1:]):
        return TopologyResult(0, CERTIFIED, ArcGraph(), 0, window)
    return None


def b0_affine(p, window: Box2 | None = None, opts: TopologyOptions | None = None, seed: int = 0, index: int = 0) -> TopologyResult:
    """Connected components of the curve ``p = 0`` inside ``window`` (default ``[-8, 8]^2``).

    Components meeting the window boundary are counted (each piece inside
    the window separately) and reported in ``truncated``. If a crossing lands
    in non-generic position the split points are jittered deterministically
    from ``(seed, index)`` and the computation is repeated.
    """
    p = _as_poly2(p)
    opts = opts or TopologyOptions()
    window = window or Box2.from_bounds(*DEFAULT_WINDOW)
    if window.x.width <= 0 or window.y.width <= 0:
        raise ValueError("window must have positive width and height")
    triv = _trivial(p, window)
    if triv is not None:
        return triv
    bounds = window.bounds
    jit = uniform_stream(seed, index, opts.max_depth * opts.max_attempts, stream=TOPOLOGY_STREAM)
    for attempt in range(opts.max_attempts):
        jitter = None if attempt == 0 else (0.45 + 0.1 * jit[attempt * opts.max_depth : (attempt + 1) * opts.max_depth]).tolist()
        try:
            cg = _chart_graph(p.c, bounds, opts, jitter)
            graph = ArcGraph(
                vertices=list(cg.crossings.points), edges=cg.arcs, on_boundary=list(cg.crossings.boundary)
            )
            status = _status([cg.leaves])
            if status == CERTIFIED:
                _check_degrees(graph, 1)
            b0, truncated = _count(graph)
            transform = {} if jitter is None else {"split_fractions": jitter}
            return TopologyResult(b0, status, graph, cg.leaves.max_depth_used, window, truncated, attempt + 1, transform)
        except _Degenerate:
            continue
    return TopologyResult(-1, UNCERTIFIED, ArcGraph(), opts.max_depth, window, 0, opts.max_attempts)


def _random_rotation(seed: int, index: int, attempt: int) -> np.ndarray:
    q = normal_stream(seed, index, 4 * (attempt + 1), stream=TOPOLOGY_STREAM + 1)[4 * attempt :]
    return Rotation.from_quat(q / np.linalg.norm(q)).as_matrix()


def _glue(charts: list[_ChartGraph]) -> ArcGraph:
    """Merge the chart graphs, joining each box-boundary crossing to its image in the neighbouring chart."""
    graph = ArcGraph()
    offset = []
    for ci, cg in enumerate(charts):
        offset.append(len(graph.vertices))
        graph.vertices.extend((x, y, ci) for x, y in cg.crossings.points)
        graph.on_boundary.extend([False] * len(cg.crossings.points))
        graph.edges.extend((a + offset[ci], b + offset[ci]) for a, b in cg.arcs)
    # boundary crossings of each chart, with their homogeneous lifts
    bd = {ci: [i for i, b in enumerate(cg.crossings.boundary) if b] for ci, cg in enumerate(charts)}
    glued = set()
    for ci, cg in enumerate(charts):
        for i in bd[ci]:
            gi = i + offset[ci]
            if gi in glued:
                continue
            z = chart_lift(*cg.crossings.points[i], ci)
            partner = None
            for cj in CHARTS:
                if cj == ci or z[cj] == 0:
                    continue
                u, v = chart_point(z, cj)
                if max(abs(u), abs(v)) > 1.0 + GLUE_TOL:
                    continue
                for k in bd[cj]:
                    pu, pv = charts[cj].crossings.points[k]
                    if abs(pu - u) <= GLUE_TOL and abs(pv - v) <= GLUE_TOL:
                        if partner is not None:
                            raise _Degenerate("ambiguous gluing")
                        partner = k + offset[cj]
            if partner is None or partner in glued:
                raise _Degenerate("boundary crossing without a partner in the neighbouring chart")
            glued.update((gi, partner))
            graph.edges.append((gi, partner))
    return graph


def b0_projective(p_hom, opts: TopologyOptions | None = None, seed: int = 0, index: int = 0) -> TopologyResult:
    """Connected components of the real projective curve of a ternary form.

    Accepts a :class:`HomPoly`, a :class:`Poly2` (homogenised from chart 0)
    or a bivariate KostlanSample. Each chart's closed unit box is processed
    and crossings on the box boundaries are glued across charts. On
    non-generic position the form is rotated by an element of SO(3) drawn
    from ``(seed, index)``, which leaves the real topology unchanged.
    """
    if isinstance(p_hom, HomPoly):
        H = p_hom
    else:
        H = homogenize(_as_poly2(p_hom), 0)
    opts = opts or TopologyOptions()
    if not np.any(H.h):
        raise ValueError("the zero form has no curve")
    if H.d == 0:
        return TopologyResult(0, CERTIFIED, ArcGraph(), 0, "projective")
    unit = (-1.0, 1.0, -1.0, 1.0)
    for attempt in range(opts.max_attempts):
        transform = {}
        Hq = H
        if attempt > 0:
            q = _random_rotation(seed, index, attempt - 1)
            Hq = H.rotated(q)
            transform = {"rotation": q.tolist()}
        try:
            charts = [_chart_graph(dehomogenize(Hq, ci).c, unit, opts) for ci in CHARTS]
            graph = _glue(charts)
            status = _status([cg.leaves for cg in charts])
            if status == CERTIFIED:
                _check_degrees(graph, 2)
            b0, _ = _count(graph)
            depth = max(cg.leaves.max_depth_used for cg in charts)
            return TopologyResult(b0, status, graph, depth, "projective", 0, attempt + 1, transform)
        except _Degenerate:
            continue
    return TopologyResult(-1, UNCERTIFIED, ArcGraph(), opts.max_depth, "projective", 0, opts.max_attempts)
