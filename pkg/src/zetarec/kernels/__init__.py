"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback keeps the package
usable on installs without a C toolchain.  ZETAREC_KERNELS=python|compiled
forces a backend (compiled raises if the extension is missing).  The wrappers
below coerce dtypes so both backends accept the same inputs.
"""

import os

import numpy as np

_requested = os.environ.get("ZETAREC_KERNELS")
if _requested not in (None, "", "compiled", "python"):
    raise ImportError(f"ZETAREC_KERNELS must be 'compiled' or 'python', got {_requested!r}")

if _requested == "python":
    from . import pure as _impl
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import pure as _impl
        BACKEND = "python"


def dirichlet_sums(coef, logn, ts):
    """out[i] = sum_j coef[j] * exp(-1i * ts[i] * logn[j])."""
    return _impl.dirichlet_sums(
        np.ascontiguousarray(coef, dtype=np.float64),
        np.ascontiguousarray(logn, dtype=np.float64),
        np.ascontiguousarray(ts, dtype=np.float64))


def torus_product_diff(theta, j, k, base):
    """Per-node difference of j- and k-twisted Euler products over base[node, p]."""
    return _impl.torus_product_diff(
        np.ascontiguousarray(theta, dtype=np.float64), int(j), int(k),
        np.ascontiguousarray(base, dtype=np.complex128))


def kron_mask(taus, freqs, deltas):
    """mask[i] = all_c ( 2*|sin(taus[i]*freqs[c]/2)| < deltas[c] )."""
    return _impl.kron_mask(
        np.ascontiguousarray(taus, dtype=np.float64),
        np.ascontiguousarray(freqs, dtype=np.float64),
        np.ascontiguousarray(deltas, dtype=np.float64))


__all__ = ["BACKEND", "dirichlet_sums", "torus_product_diff", "kron_mask"]
