"""NumPy implementations of the hot kernels.

Same contracts as the compiled module `zetarec.kernels._core`; selected at
import time when the extension is missing (or forced via ZETAREC_KERNELS).
Inputs must be contiguous float64 / complex128 arrays.
"""

import numpy as np

# Bound on the scratch matrix built per block (rows x series length).
_BLOCK_ELEMS = 2_000_000


def dirichlet_sums(coef, logn, ts):
    """out[i] = sum_j coef[j] * exp(-1i * ts[i] * logn[j])."""
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    logn = np.ascontiguousarray(logn, dtype=np.float64)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    m = coef.shape[0]
    out = np.empty(ts.shape[0], dtype=np.complex128)
    if m == 0:
        out[:] = 0.0
        return out
    rows = max(1, _BLOCK_ELEMS // max(m, 1))
    for lo in range(0, ts.shape[0], rows):
        block = ts[lo:lo + rows, None] * logn[None, :]
        # exp(-i*phase) accumulated against real coefficients
        out[lo:lo + rows] = np.exp(block * (-1j)) @ coef.astype(np.complex128)
    return out


def torus_product_diff(theta, j, k, base):
    """Difference of two phase-twisted Euler products per grid node.

    base[node, p] holds p^{-s_node}; theta[p] the unit phase of prime p.
    Returns prod_p (1 - e^{ij theta_p} base)^-1 - prod_p (1 - e^{ik theta_p} base)^-1.
    Raises ZeroDivisionError when a factor vanishes exactly.
    """
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.complex128)
    wj = np.exp(1j * j * theta)
    wk = np.exp(1j * k * theta)
    dj = 1.0 - wj[None, :] * base
    dk = 1.0 - wk[None, :] * base
    if (dj == 0).any() or (dk == 0).any():
        raise ZeroDivisionError("vanishing Euler factor")
    return 1.0 / np.prod(dj, axis=1) - 1.0 / np.prod(dk, axis=1)


def kron_mask(taus, freqs, deltas):
    """mask[i] = all_c ( 2*|sin(taus[i]*freqs[c]/2)| < deltas[c] )."""
    taus = np.ascontiguousarray(taus, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    deltas = np.ascontiguousarray(deltas, dtype=np.float64)
    n = taus.shape[0]
    mask = np.ones(n, dtype=np.uint8)
    rows = max(1, _BLOCK_ELEMS // max(freqs.shape[0], 1))
    for lo in range(0, n, rows):
        chunk = taus[lo:lo + rows, None] * (freqs[None, :] * 0.5)
        ok = (2.0 * np.abs(np.sin(chunk)) < deltas[None, :]).all(axis=1)
        mask[lo:lo + rows] = ok.astype(np.uint8)
    return mask
