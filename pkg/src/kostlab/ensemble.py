"""Gaussian ensemble of real polynomial sections of O(d) over CP^1 and CP^2.

Coefficients are drawn in the weighted monomial basis ``w(j) x^j`` which is
orthonormal for the L^2 product induced by the Fubini-Study metric, so a
sample is fully described by ``(n, d, a)`` with ``a`` i.i.d. standard normal.

Randomness is counter based: the j-th coefficient of sample ``index`` under
master ``seed`` is a pure function of ``(seed, index, j)``, independent of how
many samples are drawn or in which order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator

import numpy as np
from scipy.special import ndtri

SUPPORTED_N = (1, 2)
_U64 = 1 << 64

# Variance of one orthonormal coordinate under the measure pi^{-N/2} e^{-|x|^2} dx.
# Samples use unit variance; scale squared norms by this to get that measure.
MEASURE_VARIANCE = 0.5


def multi_indices(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent multi-indices ``j`` with ``sum(j) <= d`` in lexicographic order."""
    _check_nd(n, d)
    if n == 1:
        return [(j,) for j in range(d + 1)]
    return [(j, k) for j in range(d + 1) for k in range(d + 1 - j)]


def _check_nd(n: int, d: int) -> None:
    if n not in SUPPORTED_N:
        raise ValueError(f"unsupported variable count n={n}; expected 1 or 2")
    if int(d) != d or d < 1:
        raise ValueError(f"degree must be a positive integer, got {d!r}")


@dataclass(frozen=True)
class KostlanWeights:
    n: int
    d: int
    indices: tuple[tuple[int, ...], ...]
    log_w: np.ndarray = field(repr=False)

    @property
    def w(self) -> np.ndarray:
        return np.exp(self.log_w)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(zip(self.indices, self.w.tolist()))

    def __len__(self) -> int:
        return len(self.indices)


def kostlan_weights(n: int, d: int) -> KostlanWeights:
    """Weights ``sqrt((d+n)! / (n! j_1! ... j_n! (d-|j|)!))``, accumulated in log space."""
    _check_nd(n, d)
    idx = multi_indices(n, d)
    top = math.lgamma(d + n + 1) - math.lgamma(n + 1)
    log_w = np.array(
        [0.5 * (top - sum(math.lgamma(ji + 1) for ji in j) - math.lgamma(d - sum(j) + 1)) for j in idx]
    )
    log_w.setflags(write=False)
    return KostlanWeights(n=n, d=d, indices=tuple(idx), log_w=log_w)


def _stream_key(seed: int, index: int) -> int:
    if not (0 <= seed < _U64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not (0 <= index < _U64):
        raise ValueError(f"sample index must be in [0, 2^64), got {index}")
    return int(seed) | (int(index) << 64)


def uniform_stream(seed: int, index: int, count: int, stream: int = 0) -> np.ndarray:
    """``count`` uniforms in (0, 1) for the pair (seed, index).

    ``stream`` selects a disjoint counter range; stream 0 feeds coefficients,
    higher streams feed auxiliary per-sample randomness (jitter, shears).
    """
    gen = np.random.Philox(key=_stream_key(seed, index), counter=[0, 0, 0, stream])
    raw = gen.random_raw(count)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normal_stream(seed: int, index: int, count: int, stream: int = 0) -> np.ndarray:
    # inverse CDF keeps exactly one uniform per variate
    return ndtri(uniform_stream(seed, index, count, stream))


@dataclass(frozen=True)
class KostlanSample:
    n: int
    d: int
    a: np.ndarray
    seed: int
    index: int

    @cached_property
    def weights(self) -> KostlanWeights:
        return kostlan_weights(self.n, self.d)

    @property
    def indices(self) -> tuple[tuple[int, ...], ...]:
        return self.weights.indices

    @property
    def coeffs(self) -> np.ndarray:
        """Monomial-basis coefficients ``a(j) * w(j)``."""
        return self.a * self.weights.w

    def to_poly(self):
        from .polycore import Poly1, Poly2

        c = self.coeffs
        if self.n == 1:
            return Poly1(c)
        return Poly2.from_terms(self.d, dict(zip(self.indices, c)))

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "seed": self.seed, "index": self.index, "coeffs": self.a.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "KostlanSample":
        n, d = int(obj["n"]), int(obj["d"])
        a = np.asarray(obj["coeffs"], dtype=float)
        if a.shape != (math.comb(d + n, n),):
            raise ValueError(f"expected {math.comb(d + n, n)} coefficients for n={n}, d={d}, got {a.shape}")
        return cls(n=n, d=d, a=a, seed=int(obj["seed"]), index=int(obj["index"]))


@dataclass(frozen=True)
class KostlanSampler:
    """Immutable sampler; ``sample`` is a pure function of ``(seed, index)``."""

    n: int
    d: int

    def __post_init__(self):
        _check_nd(self.n, self.d)

    @cached_property
    def weights(self) -> KostlanWeights:
        return kostlan_weights(self.n, self.d)

    @property
    def dim(self) -> int:
        return math.comb(self.d + self.n, self.n)

    def draw(self, seed: int, index: int) -> np.ndarray:
        a = normal_stream(seed, index, self.dim)
        # a zero draw needs every uniform to be exactly 1/2, which ndtri never produces
        # from the half-offset grid; keep the guard anyway
        if not np.any(a):
            raise RuntimeError("sampler produced the zero section")
        return a

    def sample(self, seed: int, index: int) -> KostlanSample:
        return KostlanSample(n=self.n, d=self.d, a=self.draw(seed, index), seed=seed, index=index)

    def sample_matrix(self, seed: int, indices: Iterable[int]) -> np.ndarray:
        """Orthonormal-basis coefficients, one row per sample index."""
        idx = list(indices)
        out = np.empty((len(idx), self.dim))
        for row, i in enumerate(idx):
            out[row] = self.draw(seed, i)
        return out


def sample(n: int, d: int, seed: int, index: int) -> KostlanSample:
    return KostlanSampler(n, d).sample(seed, index)


def write_jsonl(samples: Iterable[KostlanSample], fh: IO[str]) -> int:
    count = 0
    for s in samples:
        fh.write(json.dumps(s.to_json()) + "\n")
        count += 1
    return count


def read_jsonl(fh: IO[str]) -> Iterator[KostlanSample]:
    for line in fh:
        line = line.strip()
        if line:
            yield KostlanSample.from_json(json.loads(line))
