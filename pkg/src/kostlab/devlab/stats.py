"""Binomial confidence intervals, tail estimates and decay fits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

# cells with fewer hits than this stay out of the decay regression
MIN_FIT_HITS = 20


def wilson_ci(hits: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= hits <= trials:
        raise ValueError(f"hits must lie in [0, {trials}], got {hits}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    z = float(ndtri(0.5 + level / 2.0))
    n = float(trials)
    p = hits / n
    z2n = z * z / n
    centre = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n)
    lo = 0.0 if hits == 0 else max(0.0, min(p, centre - half))
    hi = 1.0 if hits == trials else min(1.0, max(p, centre + half))
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    hits: int
    trials: int
    p_hat: float
    ci_lo: float
    ci_hi: float

    @classmethod
    def from_counts(cls, threshold: float, hits: int, trials: int, level: float = 0.95) -> "TailEstimate":
        lo, hi = wilson_ci(hits, trials, level)
        return cls(float(threshold), int(hits), int(trials), hits / trials, lo, hi)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    n_points: int

    def to_json(self) -> dict:
        return asdict(self)


def fit_decay(points: Sequence[tuple[float, float]]) -> DecayFit:
    """Ordinary least squares of ``y`` on ``x`` for points ``(x, y)``, typically ``y = log p``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise ValueError("need at least three (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 1e-300 * max(1.0, float(x @ x)):
        raise ValueError("x values are degenerate (all equal)")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if sst == 0.0 else 1.0 - float(resid @ resid) / sst
    return DecayFit(slope, intercept, r2, int(pts.shape[0]))


def tail_fit(cells: Sequence[TailEstimate], transform=lambda t: t) -> dict:
    """Fit ``log p_hat`` against ``transform(threshold)`` over cells with enough hits."""
    used = [c for c in cells if c.hits >= MIN_FIT_HITS and c.hits < c.trials]
    info = {"used_thresholds": [c.threshold for c in used], "censored_thresholds": [c.threshold for c in cells if c not in used]}
    if len(used) < 3:
        return {"status": "censored", "fit": None, **info}
    try:
        fit = fit_decay([(transform(c.threshold), math.log(c.p_hat)) for c in used])
    except ValueError:
        return {"status": "censored", "fit": None, **info}
    return {"status": "fitted", "fit": fit.to_json(), **info}


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def nonincreasing(values: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))
