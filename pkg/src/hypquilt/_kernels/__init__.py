"""Kernel selection: the compiled extension when it imports, numpy otherwise.

Set HYPQUILT_PURE=1 to force the numpy versions.
"""

import os

from . import _pykernels as py

BACKEND = "python"
if os.environ.get("HYPQUILT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = py
else:
    _impl = py

act_points = _impl.act_points
displacements = _impl.displacements
orbit_distances = _impl.orbit_distances
orbit_min_distance = _impl.orbit_min_distance
min_dist_to_centered = _impl.min_dist_to_centered
bisectors = _impl.bisectors

__all__ = ["BACKEND", "act_points", "displacements", "orbit_distances", "orbit_min_distance",
           "min_dist_to_centered", "bisectors", "py"]
