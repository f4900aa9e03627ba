"""Monte Carlo runners over the Kostlan ensemble.

Every runner draws sample ``i`` from ``(seed, i)`` alone and splits the index
range into fixed chunks, so the chunk results, and every statistic reduced
from them in index order, do not depend on how many threads ran them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from ..closedforms import harnack_bound_plane, maximality_threshold
from ..curvetopo import CERTIFIED, TopologyOptions, b0_affine, b0_projective
from ..ensemble import KostlanSampler
from ..interval import Box2
from ..roots1d import complex_roots, count_real_roots_batch
from .config import default_config, normalize_config, parse_a_value
from .lelong import CutoffFn, QuadGrid, lelong_residual, log_norm_term
from .stats import TailEstimate, nonincreasing, strictly_decreasing, tail_fit, wilson_ci

COUNT_CHUNK = 1000
HEAVY_CHUNK = 25
UNRELIABLE_QUARANTINE = 0.2
LELONG_TOL = 1e-3


def map_chunks(fn: Callable[[int, int], list], trials: int, chunk: int, threads: int = 1) -> list:
    """``fn(start, stop)`` over consecutive index chunks, concatenated in index order."""
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]
    if threads <= 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    return [x for part in parts for x in part]


# --- real roots in one variable -------------------------------------------------------


def real_root_counts(d: int, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    sampler = KostlanSampler(1, d)

    def work(a, b):
        return count_real_roots_batch(sampler.sample_matrix(seed, range(a, b)), d).tolist()

    return np.asarray(map_chunks(work, trials, COUNT_CHUNK, threads), dtype=np.int64)


def run_mean_roots(d: int, trials: int, seed: int, threads: int = 1) -> dict:
    """Mean and standard error of the number of real roots (on RP^1) over Kostlan draws."""
    if d < 1 or trials < 100:
        raise ValueError("need d >= 1 and trials >= 100")
    counts = real_root_counts(d, trials, seed, threads)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials))
    return {"d": d, "trials": trials, "mean": mean, "stderr": stderr, "sqrt_d": math.sqrt(d),
            "z_score": (mean - math.sqrt(d)) / stderr if stderr > 0 else 0.0}


def run_tail_1d(d: int, epsilons: Sequence[float], trials: int, seed: int, threads: int = 1) -> dict:
    """``P[#real roots >= eps sqrt(d)]`` per eps, and a fit of ``log p`` against ``eps^2``."""
    counts = real_root_counts(d, trials, seed, threads)
    root_d = math.sqrt(d)
    cells = [TailEstimate.from_counts(e, int(np.count_nonzero(counts >= e * root_d)), trials) for e in epsilons]
    fit = tail_fit(cells, transform=lambda e: e * e)
    p = [c.p_hat for c in cells]
    return {"d": d, "cells": [c.to_json() for c in cells], "decay_fit": fit,
            "monotone": nonincreasing(p), "strictly_decreasing": strictly_decreasing(p)}


# --- plane curves ----------------------------------------------------------------------


def _topology(sampler: KostlanSampler, seed: int, mode: str, opts: TopologyOptions, window: Box2):
    def work(a, b):
        out = []
        for i in range(a, b):
            s = sampler.sample(seed, i)
            if mode == "projective":
                r = b0_projective(s, opts, seed=seed, index=i)
            else:
                r = b0_affine(s.to_poly(), window, opts, seed=seed, index=i)
            out.append((r.b0, r.status))
        return out

    return work


def run_tail_2d(d: int, a_values: Sequence, trials: int, seed: int, mode: str = "projective",
                topology_opts: dict | None = None, threads: int = 1) -> dict:
    """Distribution of ``b0`` over Kostlan plane curves of degree ``d``.

    Non-certified samples go to a quarantine bucket, so histogram mass plus
    quarantine equals ``trials``. Tail estimates are over certified samples.
    """
    topo = {**default_config("tail2d")["topology_opts"], **(topology_opts or {})}
    opts = TopologyOptions(topo["max_depth"], topo["edge_root_tol"], topo["max_attempts"])
    window = Box2.from_bounds(*topo["window"])
    sampler = KostlanSampler(2, d)
    results = map_chunks(_topology(sampler, seed, mode, opts, window), trials, HEAVY_CHUNK, threads)
    b0 = np.array([r[0] for r in results if r[1] == CERTIFIED], dtype=np.int64)
    quarantine: dict[str, int] = {}
    for _, status in results:
        if status != CERTIFIED:
            quarantine[status] = quarantine.get(status, 0) + 1
    n_q = sum(quarantine.values())
    certified = int(b0.size)
    harnack = harnack_bound_plane(d)
    hist = {str(k): int(v) for k, v in zip(*np.unique(b0, return_counts=True))} if certified else {}
    cells = []
    maximal = None
    if certified:
        for a in a_values:
            t = maximality_threshold(d, parse_a_value(a))
            est = TailEstimate.from_counts(t, int(np.count_nonzero(b0 >= t)), certified)
            cells.append({"a": str(parse_a_value(a)), **est.to_json()})
        hits = int(np.count_nonzero(b0 == harnack))
        lo, hi = wilson_ci(hits, certified)
        maximal = {"b0": harnack, "hits": hits, "trials": certified, "p_hat": hits / certified, "ci_lo": lo, "ci_hi": hi}
    return {
        "d": d,
        "mode": mode,
        "trials": trials,
        "certified": certified,
        "histogram": hist,
        "quarantine": quarantine,
        "quarantine_fraction": n_q / trials,
        "unreliable": n_q / trials > UNRELIABLE_QUARANTINE,
        "harnack_bound": harnack,
        # an affine window can cut one oval into several pieces, so only projective counts are bounded
        "harnack_violations": int(np.count_nonzero(b0 > harnack)) if mode == "projective" else None,
        "max_b0": int(b0.max()) if certified else None,
        "mean_b0": float(b0.mean()) if certified else None,
        "cells": cells,
        "maximal": maximal,
    }


# --- log-norm currents on CP^1 --------------------------------------------------------


def _cutoff(q: dict) -> CutoffFn:
    return CutoffFn(complex(*q["center"]), q["radius"])


def run_lelong(d: int, trials: int, seed: int, quadrature_opts: dict | None = None, threads: int = 1) -> dict:
    """Current-balance residuals for ``trials`` samples, optionally also on a grid twice as fine."""
    q = {**default_config("lelong")["quadrature_opts"], **(quadrature_opts or {})}
    f = _cutoff(q)
    sampler = KostlanSampler(1, d)
    grids = [q["quad_grid"], 2 * q["quad_grid"]] if q["compare_refined"] else [q["quad_grid"]]

    def work(a, b):
        return [[lelong_residual(sampler.sample(seed, i), f, g) for g in grids] for i in range(a, b)]

    res = np.array(map_chunks(work, trials, HEAVY_CHUNK, threads))
    out = {"d": d, "trials": trials, "quad_grid": q["quad_grid"], "cutoff": f.to_json(),
           "residuals": res[:, 0].tolist(), "max": float(res[:, 0].max()), "median": float(np.median(res[:, 0])),
           "within_tol": int(np.count_nonzero(res[:, 0] <= LELONG_TOL)), "tol": LELONG_TOL}
    if q["compare_refined"]:
        fine = float(np.median(res[:, 1]))
        out["refined"] = {"quad_grid": grids[1], "median": fine,
                          "shrink": out["median"] / fine if fine > 0 else math.inf}
    return out


def run_large_deviation(d: int, epsilons: Sequence[float], trials: int, seed: int,
                        quadrature_opts: dict | None = None, threads: int = 1) -> dict:
    """Tail of ``Y = (1/(4 pi d)) |int log||sigma||^2 Laplacian(f) dA|`` over the ensemble."""
    q = {**default_config("large-dev")["quadrature_opts"], **(quadrature_opts or {})}
    f = _cutoff(q)
    grid = QuadGrid.build(f, q["quad_grid"])
    sampler = KostlanSampler(1, d)

    def work(a, b):
        return [abs(log_norm_term(sampler.sample(seed, i).to_poly(), grid, d)) for i in range(a, b)]

    y = np.array(map_chunks(work, trials, HEAVY_CHUNK, threads))
    cells = [TailEstimate.from_counts(e, int(np.count_nonzero(y >= e)), trials) for e in epsilons]
    p = [c.p_hat for c in cells]
    return {"d": d, "trials": trials, "cutoff": f.to_json(), "mean_y": float(y.mean()), "max_y": float(y.max()),
            "cells": [c.to_json() for c in cells], "monotone": nonincreasing(p)}


# --- equidistribution of complex roots ---------------------------------------------------


def latitude(z) -> np.ndarray:
    """Signed angular distance from the image of the real line on the round sphere (stereographic)."""
    z = np.asarray(z, dtype=complex)
    return np.arcsin(np.clip(2.0 * z.imag / (1.0 + np.abs(z) ** 2), -1.0, 1.0))


def band_edges(bands_per_side: int, exclusion: float) -> np.ndarray:
    """Edges in ``[exclusion, pi/2]`` cutting the kept cap into equal-area bands."""
    edges = np.arcsin(np.linspace(math.sin(exclusion), 1.0, bands_per_side + 1))
    edges[0], edges[-1] = exclusion, math.pi / 2
    return edges


def run_equidist(d: int, trials: int, seed: int, bands: int = 10, exclusion: float = 0.2, threads: int = 1) -> dict:
    """Chi-square comparison of pooled complex-root latitudes with uniform area on the sphere.

    Bands are equal-area, half in each hemisphere, outside ``|latitude| < exclusion``.
    Real coefficients make the two hemispheres mirror images root by root, so
    the test statistic uses one root per conjugate pair (upper hemisphere);
    the lower hemisphere is compared with it band by band.
    """
    if d < 50:
        raise ValueError("equidistribution runs need d >= 50")
    if bands < 2 or bands % 2:
        raise ValueError("bands must be a positive even number")
    sampler = KostlanSampler(1, d)
    half = bands // 2
    edges = band_edges(half, exclusion)

    def work(a, b):
        out = []
        for i in range(a, b):
            phi = latitude(complex_roots(sampler.sample(seed, i).to_poly()))
            up = np.histogram(phi[phi > 0], bins=edges)[0]
            down = np.histogram(-phi[phi < 0], bins=edges)[0]
            out.append((up, down, int(phi.size)))
        return out

    parts = map_chunks(work, trials, HEAVY_CHUNK, threads)
    upper = np.sum([p[0] for p in parts], axis=0)
    lower = np.sum([p[1] for p in parts], axis=0)
    total_roots = int(sum(p[2] for p in parts))
    kept = int(upper.sum())
    expected = np.full(half, kept / half)
    chi2, pval = sps.chisquare(upper, expected)
    sigma = np.sqrt(np.maximum(upper + lower, 1))
    z = (upper - lower) / sigma
    band_counts = np.concatenate([lower[::-1], upper]).tolist()
    return {
        "d": d,
        "trials": trials,
        "bands": bands,
        "exclusion": exclusion,
        "band_edges": edges.tolist(),
        "band_counts": band_counts,
        "expected_per_band": kept / half,
        "total_roots": total_roots,
        "kept_roots": int(upper.sum() + lower.sum()),
        "chi2": float(chi2),
        "dof": half - 1,
        "p_value": float(pval),
        "hemisphere_z": z.tolist(),
        "hemisphere_max_abs_z": float(np.abs(z).max()),
    }


# --- records -------------------------------------------------------------------------


@dataclass
class ExperimentRecord:
    kind: str
    seed: int
    config: dict
    payload: dict
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "config": self.config, "payload": self.payload, "meta": self.meta}

    def csv_rows(self) -> tuple[list[str], list[list]]:
        """Flat rows for plotting: one per (d, threshold) cell for tail experiments."""
        blocks = self.payload["per_d"]
        if self.kind in ("tail1d", "tail2d", "large-dev"):
            head = ["d", "threshold", "hits", "trials", "p_hat", "ci_lo", "ci_hi"]
            rows = [[b["d"]] + [c[k] for k in head[1:]] for b in blocks for c in b["cells"]]
            return head, rows
        if self.kind == "mean-roots":
            head = ["d", "trials", "mean", "stderr"]
        elif self.kind == "lelong":
            head = ["d", "trials", "quad_grid", "max", "median", "within_tol"]
        else:
            head = ["d", "trials", "chi2", "dof", "p_value", "hemisphere_max_abs_z"]
        return head, [[b[k] for k in head] for b in blocks]


def _code_version() -> str:
    from .. import __version__

    return __version__


def run_config(raw: dict, threads: int = 1) -> ExperimentRecord:
    """Validate a config, run it over every degree in ``d_list`` and wrap the result."""
    import time

    cfg = normalize_config(raw)
    kind, seed = cfg["kind"], cfg["seed"]
    t0 = time.perf_counter()
    per_d = []
    for d in cfg["d_list"]:
        if kind == "mean-roots":
            per_d.append(run_mean_roots(d, cfg["trials"], seed, threads))
        elif kind == "tail1d":
            per_d.append(run_tail_1d(d, cfg["thresholds"], cfg["trials"], seed, threads))
        elif kind == "tail2d":
            per_d.append(run_tail_2d(d, cfg["thresholds"], cfg["trials"], seed, cfg["mode"], cfg["topology_opts"], threads))
        elif kind == "lelong":
            per_d.append(run_lelong(d, cfg["trials"], seed, cfg["quadrature_opts"], threads))
        elif kind == "large-dev":
            per_d.append(run_large_deviation(d, cfg["thresholds"], cfg["trials"], seed, cfg["quadrature_opts"], threads))
        else:
            eq = cfg["equidist_opts"]
            per_d.append(run_equidist(d, cfg["trials"], seed, eq["bands"], eq["exclusion"], threads))
    payload = {"per_d": per_d}
    if kind == "tail2d":
        means = [b["mean_b0"] for b in per_d]
        payload["mean_b0_nondecreasing"] = None if None in means else all(y >= x for x, y in zip(means, means[1:]))
    if kind == "large-dev" and len(per_d) > 1:
        # at each eps, does the tail shrink as d grows
        payload["decreasing_in_d"] = [
            nonincreasing([b["cells"][j]["p_hat"] for b in per_d]) for j in range(len(cfg["thresholds"]))
        ]
    meta = {"wall_clock_s": time.perf_counter() - t0, "version": _code_version(), "threads": threads}
    return ExperimentRecord(kind, seed, cfg, payload, meta)
