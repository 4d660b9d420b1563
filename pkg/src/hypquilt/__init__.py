"""Quilted flute surfaces: group construction, Dirichlet boundaries, ray profiles."""

from ._kernels import BACKEND
from .hyp_core import HPoint, Isometry, Semicircle, Vertical
from .quilt import CompactSetSpec, QuiltSpec, build_quilt_spec

__version__ = "0.1.0"

__all__ = ["BACKEND", "HPoint", "Isometry", "Semicircle", "Vertical", "CompactSetSpec",
           "QuiltSpec", "build_quilt_spec", "__version__"]
