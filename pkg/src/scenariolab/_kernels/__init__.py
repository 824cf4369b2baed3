"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension (built from _core.pyx) is preferred when importable;
otherwise the numpy implementations in _pure take over. Both backends are
bit-compatible, so which one is active never changes results. Set
SCENARIOLAB_KERNELS=python or =compiled to force a backend (compiled raises
if the extension is missing); the default is auto.
"""

import os

from . import _pure

_requested = os.environ.get("SCENARIOLAB_KERNELS", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        f"SCENARIOLAB_KERNELS={_requested!r}: expected auto, compiled or python"
    )

if _requested == "python":
    _impl = _pure
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _pure
        BACKEND = "python"

pairwise_sq_dists = _impl.pairwise_sq_dists
split_scan_sorted = _impl.split_scan_sorted
hist_split_scan = _impl.hist_split_scan

__all__ = [
    "BACKEND",
    "pairwise_sq_dists",
    "split_scan_sorted",
    "hist_split_scan",
]
