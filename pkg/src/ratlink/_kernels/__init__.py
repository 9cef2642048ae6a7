"""Hot numeric kernels with a compiled core and a NumPy fallback.

The compiled extension is selected at import time when available; set
RATLINK_NO_NATIVE=1 to force the fallback.  `IMPLEMENTATION` names the
active backend ("native" or "fallback").
"""
import os

if os.environ.get("RATLINK_NO_NATIVE"):
    from .fallback import IMPLEMENTATION, polyvec_eval, segment_min_distances
else:
    try:
        from ._native import IMPLEMENTATION, polyvec_eval, segment_min_distances
    except ImportError:
        from .fallback import IMPLEMENTATION, polyvec_eval, segment_min_distances

__all__ = ["IMPLEMENTATION", "polyvec_eval", "segment_min_distances"]
