"""Backend selection for the hot loops.

Uses the compiled ``_kernels`` extension when it imports, otherwise the
pure-Python ``_fallback``. Setting ``FACESTYLE_PURE_PYTHON=1`` forces the
fallback. Both backends produce bit-identical results.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("FACESTYLE_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"


def _c64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def dtw_cost(pred, gt, impl=None):
    """Accumulated optimal warping cost between two [T][N][3] arrays (unnormalized)."""
    return float((impl or _impl).dtw_cost(_c64(pred), _c64(gt)))


def splitmix64_block(state, n, impl=None):
    return (impl or _impl).splitmix64_block(int(state), int(n))


def uniforms(state, n, impl=None):
    """n doubles in [0, 1) from the top 53 bits of consecutive SplitMix64 outputs."""
    return (impl or _impl).uniforms(int(state), int(n))


def normals(state, n, impl=None):
    """n standard normals via Box-Muller on uniform pairs (cos branch, then sin)."""
    return (impl or _impl).normals(int(state), int(n))


def sinusoids(amps, bins, phases, T, impl=None):
    return (impl or _impl).sinusoids(_c64(amps), _c64(bins), _c64(phases), int(T))


def backends():
    """Available implementations, keyed by name."""
    found = {"python": _fallback}
    try:
        from . import _kernels

        found["compiled"] = _kernels
    except ImportError:
        pass
    return found
