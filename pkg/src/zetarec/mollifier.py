"""Smoothed Dirichlet series sum n^-s exp(-(n/N)^sigma1) and its finite form.

The exponential damping makes the series converge absolutely for every
sigma > 0; the adaptive cut keeps the dropped tail under the caller's error
budget.  mean_gap measures, in normalized mean over a shift range, how far
the smoothed series sits from zeta itself on a rectangle -- the quantity
driving the smoothing step of the recurrence argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AccuracyExhausted
from .zetaeval import CompactRect, EvalConfig, em_cut, log_integers, power_coeffs

_ZETA2 = math.pi ** 2 / 6.0


@dataclass(frozen=True)
class MollifierParams:
    """Smoothing scale N, damping exponent sigma1 > 1/2, cut M (None = adaptive).

    M = 0 is allowed and means the empty sum.
    """

    N: int
    sigma1: float
    M: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("smoothing scale N must be >= 1")
        if not self.sigma1 > 0.5:
            raise ValueError("damping exponent must exceed 1/2")
        if self.M is not None and self.M < 0:
            raise ValueError("cut M must be >= 0 (0 = empty sum)")


def weights(params: MollifierParams, m: int) -> np.ndarray:
    """exp(-(n/N)^sigma1) for n = 1..m."""
    n = np.arange(1, m + 1, dtype=np.float64)
    return np.exp(-((n / params.N) ** params.sigma1))


def adaptive_cut(params: MollifierParams, target: float, max_terms: int) -> int:
    """First n past which the dropped tail is provably below target.

    Cuts where the weight falls under target/(n^2 zeta(2)); past the point
    where weight*n^2 is decreasing, the comparison with sum 1/n^2 bounds the
    whole tail by target.
    """
    # weight*n^2 decreasing needs (n/N)^sigma1 > 2/sigma1
    floor = int(params.N * (2.0 / params.sigma1) ** (1.0 / params.sigma1)) + 1
    n = max(floor, 1)
    block = 1024
    while n <= max_terms:
        ns = np.arange(n, min(n + block, max_terms + 1), dtype=np.float64)
        w = np.exp(-((ns / params.N) ** params.sigma1))
        ok = w < target / (ns ** 2 * _ZETA2)
        if ok.any():
            return int(ns[int(np.argmax(ok))])
        n += block
        block *= 2
    raise AccuracyExhausted("adaptive mollifier cut exceeds max_terms", target)


def _resolve_cut(params: MollifierParams, cfg: EvalConfig) -> int:
    if params.M is not None:
        return params.M
    return adaptive_cut(params, cfg.target_abs_error, cfg.max_terms)


def zeta_mollified(s: complex, params: MollifierParams,
                   cfg: EvalConfig | None = None) -> complex:
    """sum_{n<=M'} n^-s exp(-(n/N)^sigma1), tail below cfg.target_abs_error."""
    cfg = cfg or EvalConfig()
    s = complex(s)
    if s.real <= 0:
        raise ValueError(f"need Re(s) > 0, got {s}")
    m = _resolve_cut(params, cfg)
    if m == 0:
        return 0.0 + 0.0j
    coef = power_coeffs(s.real, m) * weights(params, m)
    out = kernels.dirichlet_sums(np.ascontiguousarray(coef), log_integers(m),
                                 np.array([s.imag]))
    return complex(out[0])


def mollified_row(sigma: float, ts: np.ndarray, params: MollifierParams,
                  cfg: EvalConfig) -> np.ndarray:
    """Batched zeta_mollified at one sigma, many t."""
    m = _resolve_cut(params, cfg)
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    if m == 0:
        return np.zeros(ts.shape[0], dtype=np.complex128)
    coef = np.ascontiguousarray(power_coeffs(sigma, m) * weights(params, m))
    return kernels.dirichlet_sums(coef, log_integers(m), ts)


def mean_gap(T: float, params: MollifierParams, j: int, k: int,
             rect: CompactRect, tau_samples: int,
             cfg: EvalConfig | None = None) -> float:
    """Normalized mean over tau in (0,T] of the grid max of

        |zeta_N(s+ij*tau) - zeta_N(s+ik*tau) - zeta(s+ij*tau) + zeta(s+ik*tau)|

    via the midpoint rule on tau_samples equispaced points.  The smoothed
    series approximates zeta in this mean, so the gap shrinks as N grows.
    """
    from .zetaeval import zeta_row  # local import to keep module load light

    cfg = cfg or EvalConfig()
    if T <= 0 or tau_samples < 1:
        raise ValueError("need T > 0 and tau_samples >= 1")
    if rect.region not in ("absolute", "critical-strip"):
        raise ValueError("mean_gap needs a region-tagged rectangle")
    if math.gcd(abs(j), abs(k)) != 1 or j == 0 or k == 0:
        raise ValueError("shift multipliers must be nonzero coprime integers")
    taus = (np.arange(tau_samples) + 0.5) * (T / tau_samples)
    sups = np.zeros(tau_samples)
    chunk = 1024
    t_off = rect.ts()
    for lo in range(0, tau_samples, chunk):
        tc = taus[lo:lo + chunk]
        node_gap = np.zeros((rect.grid_sigma, rect.grid_t, tc.shape[0]))
        for a, sigma in enumerate(rect.sigmas()):
            for b, t0 in enumerate(t_off):
                diff = np.zeros(tc.shape[0], dtype=np.complex128)
                for mult, sign in ((j, 1.0), (k, -1.0)):
                    ts = t0 + mult * tc
                    smoothed = mollified_row(sigma, ts, params, cfg)
                    exact = zeta_row(sigma, ts, cfg)
                    diff += sign * (smoothed - exact)
                node_gap[a, b] = np.abs(diff)
        sups[lo:lo + chunk] = node_gap.max(axis=(0, 1))
    return float(sups.mean())
