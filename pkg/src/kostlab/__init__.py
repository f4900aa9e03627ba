"""Random real polynomials in the Kostlan ensemble: sampling, certified root
counting, plane-curve topology, closed-form moments and Monte Carlo experiments."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .ensemble import KostlanSample, KostlanSampler, kostlan_weights, sample
from .polycore import HomPoly, Poly1, Poly2, ProjPoint, tau_norm
from .roots1d import complex_roots, count_real_roots, isolate_real_roots
from .curvetopo import TopologyResult, b0_affine, b0_projective

__all__ = [
    "HomPoly",
    "KostlanSample",
    "KostlanSampler",
    "Poly1",
    "Poly2",
    "ProjPoint",
    "TopologyResult",
    "__version__",
    "b0_affine",
    "b0_projective",
    "complex_roots",
    "count_real_roots",
    "isolate_real_roots",
    "kostlan_weights",
    "sample",
    "tau_norm",
]
