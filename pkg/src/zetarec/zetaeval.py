"""Zeta evaluation to controlled accuracy for sigma > 0 (s != 1).

The workhorse is Euler-Maclaurin summation with a rigorous remainder bound:

    zeta(s) = sum_{n<M} n^-s + M^(1-s)/(s-1) + M^-s/2
              + sum_{k=1..q} B_{2k}/(2k)! (s)_{2k-1} M^(-s-2k+1) + R

    |R| <= |B_{2q+2}|/(2q+2)! * |(s)_{2q+1}| * M^(-sigma-2q-1)
           * (|s|+2q+1)/(sigma+2q+1)

with (s)_m the rising factorial.  The cut M is solved from the bound, so the
returned value carries a tracked truncation error <= cfg.target_abs_error.
Truncated phase-twisted Euler products and the prime-tail bound that drives
truncation choices live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels, primes
from .errors import AccuracyExhausted, PoleError, SingularFactor

_POLE_TOL = 1e-9


@dataclass(frozen=True)
class EvalConfig:
    """Accuracy knobs for all series evaluation.

    target_abs_error is the truncation budget per value; max_terms caps every
    internal summation; em_order is the number of Euler-Maclaurin correction
    terms; mp_dps switches the scalar path to mpmath arithmetic with that many
    digits (guards comparisons running near tolerance).
    """

    target_abs_error: float = 1e-9
    max_terms: int = 5_000_000
    em_order: int = 12
    mp_dps: int | None = None

    def __post_init__(self):
        if self.target_abs_error <= 0:
            raise ValueError("target_abs_error must be positive")
        if self.max_terms < 4:
            raise ValueError("max_terms must be at least 4")
        if self.em_order < 1:
            raise ValueError("em_order must be >= 1")
        if self.mp_dps is not None and self.mp_dps < 15:
            raise ValueError("mp_dps below double precision is pointless")


@dataclass(frozen=True)
class CompactRect:
    """Axis-aligned rectangle in the s-plane with a sampling grid.

    region, when set, pins the rectangle to a named strip: "absolute" needs
    sigma_min > 1, "critical-strip" needs 1/2 < sigma_min <= sigma_max < 1.
    """

    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    grid_sigma: int = 5
    grid_t: int = 5
    region: str | None = None

    def __post_init__(self):
        if not (self.sigma_min <= self.sigma_max and self.t_min <= self.t_max):
            raise ValueError("rectangle bounds out of order")
        if self.grid_sigma < 1 or self.grid_t < 1:
            raise ValueError("grid counts must be >= 1")
        if self.region == "absolute":
            if not self.sigma_min > 1:
                raise ValueError("'absolute' region needs sigma_min > 1")
        elif self.region == "critical-strip":
            if not (0.5 < self.sigma_min and self.sigma_max < 1):
                raise ValueError("'critical-strip' region needs 1/2 < sigma < 1")
        elif self.region is not None:
            raise ValueError(f"unknown region tag {self.region!r}")

    def sigmas(self) -> np.ndarray:
        return np.linspace(self.sigma_min, self.sigma_max, self.grid_sigma)

    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.grid_t)

    def s_grid(self) -> np.ndarray:
        """Complex grid, shape (grid_sigma, grid_t)."""
        return self.sigmas()[:, None] + 1j * self.ts()[None, :]

    def spacing(self) -> tuple[float, float]:
        ds = (self.sigma_max - self.sigma_min) / max(self.grid_sigma - 1, 1)
        dt = (self.t_max - self.t_min) / max(self.grid_t - 1, 1)
        return ds, dt


# ---------------------------------------------------------------------------
# Bernoulli ratios B_{2k}/(2k)!  (exact recurrence, cached as floats)

_bern_cache: list[Fraction] = [Fraction(1)]  # B_0, B_1, ... (B_1 = -1/2)


def _bernoulli(m: int) -> Fraction:
    while len(_bern_cache) <= m:
        mm = len(_bern_cache)
        acc = Fraction(0)
        for j in range(mm):
            acc += math.comb(mm + 1, j) * _bern_cache[j]
        _bern_cache.append(-acc / (mm + 1))
    return _bern_cache[m]


def _bern_ratio(k: int) -> float:
    """B_{2k} / (2k)! as a float."""
    return float(_bernoulli(2 * k) / math.factorial(2 * k))


# ---------------------------------------------------------------------------
# Coefficient caches shared by every batched evaluation

_table: dict = {"logn": np.zeros(0), "pow": {}}


def log_integers(m: int) -> np.ndarray:
    """log n for n = 1..m (cached, grown on demand)."""
    cur = _table["logn"]
    if cur.shape[0] < m:
        grown = max(m, 2 * cur.shape[0], 1 << 12)
        _table["logn"] = np.log(np.arange(1, grown + 1, dtype=np.float64))
        _table["pow"] = {s: np.exp(-s * _table["logn"]) for s in _table["pow"]}
    return _table["logn"][:m]


def power_coeffs(sigma: float, m: int) -> np.ndarray:
    """n^-sigma for n = 1..m (cached per sigma)."""
    logn = log_integers(m)
    cur = _table["pow"].get(sigma)
    if cur is None or cur.shape[0] < m:
        cur = np.exp(-sigma * _table["logn"])
        _table["pow"][sigma] = cur
    return cur[:m]


# ---------------------------------------------------------------------------
# Euler-Maclaurin machinery

def _em_log_constant(sigma: float, tmax: float, q: int) -> float:
    """log of C with remainder bound C * M^-(sigma+2q+1)."""
    smod = math.hypot(sigma, tmax)
    logc = math.log(abs(_bern_ratio(q + 1)))
    for i in range(2 * q + 1):
        logc += math.log(smod + i)
    logc += math.log((smod + 2 * q + 1) / (sigma + 2 * q + 1))
    return logc


def em_cut(sigma: float, tmax: float, cfg: EvalConfig) -> int:
    """Smallest correction anchor M meeting cfg.target_abs_error."""
    q = cfg.em_order
    expo = sigma + 2 * q + 1
    logc = _em_log_constant(sigma, tmax, q)
    m = int(math.ceil(math.exp((logc - math.log(cfg.target_abs_error)) / expo)))
    m = max(m, 2)
    if m - 1 > cfg.max_terms:
        achieved = math.exp(logc - expo * math.log(cfg.max_terms))
        raise AccuracyExhausted(
            f"Euler-Maclaurin cut {m} exceeds max_terms {cfg.max_terms}", achieved)
    return m


def _em_corrections(sigma: float, ts: np.ndarray, m: int, q: int) -> np.ndarray:
    """Boundary terms of the formula, vectorized over the imaginary parts."""
    s = sigma + 1j * ts
    logm = math.log(m)
    mneg = np.exp(-s * logm)                       # M^-s
    out = m * mneg / (s - 1.0) + 0.5 * mneg
    rising = np.ones_like(s)
    for k in range(1, q + 1):
        if k == 1:
            rising = s.copy()
        else:
            rising = rising * (s + (2 * k - 3)) * (s + (2 * k - 2))
        out += _bern_ratio(k) * rising * mneg * math.exp(-(2 * k - 1) * logm)
    return out


def zeta_row(sigma: float, ts: np.ndarray, cfg: EvalConfig) -> np.ndarray:
    """zeta(sigma + i t) for an array of t at one sigma.

    Pole entries (s within 1e-9 of 1) come back NaN so batch callers can
    count them as per-sample failures; scalar users get a raised PoleError
    via zeta().  The cut is sized for max |t| in the batch, so split widely
    varying t ranges into chunks before calling.
    """
    if sigma <= 0:
        raise ValueError(f"need sigma > 0, got {sigma}")
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size == 0:
        return np.zeros(0, dtype=np.complex128)
    m = em_cut(sigma, float(np.max(np.abs(ts))), cfg)
    coef = power_coeffs(sigma, m - 1)
    logn = log_integers(m - 1)
    out = kernels.dirichlet_sums(coef, logn, np.ascontiguousarray(ts))
    out += _em_corrections(sigma, ts, m, cfg.em_order)
    pole = (abs(sigma - 1.0) < _POLE_TOL) & (np.abs(ts) < _POLE_TOL)
    if np.any(pole):
        out[pole] = np.nan
    return out


def _zeta_mpmath(s: complex, cfg: EvalConfig) -> complex:
    import mpmath as mp

    q = cfg.em_order
    m = em_cut(s.real, abs(s.imag), cfg)
    with mp.workdps(cfg.mp_dps):
        sm = mp.mpc(s)
        acc = mp.nsum(lambda n: mp.power(n, -sm), [1, m - 1]) if m > 1 else mp.mpc(0)
        acc += mp.power(m, 1 - sm) / (sm - 1) + mp.power(m, -sm) / 2
        rising = mp.mpc(1)
        for k in range(1, q + 1):
            if k == 1:
                rising = sm
            else:
                rising = rising * (sm + 2 * k - 3) * (sm + 2 * k - 2)
            acc += (mp.bernoulli(2 * k) / mp.factorial(2 * k)) * rising \
                * mp.power(m, -sm - 2 * k + 1)
        return complex(acc)


def zeta(s: complex, cfg: EvalConfig | None = None) -> complex:
    """zeta(s) for Re(s) > 0, s != 1, within cfg.target_abs_error."""
    cfg = cfg or EvalConfig()
    s = complex(s)
    if abs(s - 1.0) < _POLE_TOL:
        raise PoleError(f"zeta pole at s = {s}")
    if s.real <= 0:
        raise ValueError(f"need Re(s) > 0, got {s}")
    if cfg.mp_dps is not None:
        return _zeta_mpmath(s, cfg)
    return complex(zeta_row(s.real, np.array([s.imag]), cfg)[0])


# ---------------------------------------------------------------------------
# Truncated Euler products and tail control

def euler_product(s: complex, omega, power: int, n_primes: int,
                  cfg: EvalConfig | None = None) -> complex:
    """prod_{n<=N} (1 - w(p_n)^power * p_n^-s)^-1 with unit phases from omega."""
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError(f"need Re(s) > 1/2, got {s}")
    if n_primes < 1:
        raise ValueError("need at least one factor")
    if n_primes > omega.R:
        raise ValueError(f"N={n_primes} exceeds phase support R={omega.R}")
    ps = primes.first_n_primes(n_primes).astype(np.float64)
    w = np.exp(1j * power * omega.angles[:n_primes])
    factors = 1.0 - w * np.exp(-s * np.log(ps))
    if np.any(factors == 0):
        bad = int(np.flatnonzero(factors == 0)[0])
        raise SingularFactor(f"factor vanished at prime {int(ps[bad])}")
    return complex(1.0 / np.prod(factors))


def log_tail_bound(sigma_min: float, n_cut: int) -> float:
    """Upper bound for |sum_{n>N} log(1 - z p_n^-s)^-1| over |z|=1, Re s >= sigma_min.

    Uses |log(1-x)^-1| <= |x|/(1-|x|) and an integral comparison for the prime
    tail, so the bound is valid (not asymptotic).
    """
    if sigma_min <= 1:
        raise ValueError("tail bound diverges for sigma_min <= 1")
    if n_cut < 0:
        raise ValueError("cut must be >= 0")
    p_next = float(primes.first_n_primes(n_cut + 1)[-1])
    top = p_next ** -sigma_min
    tail_sum = top + p_next ** (1.0 - sigma_min) / (sigma_min - 1.0)
    return tail_sum / (1.0 - top)


def choose_truncation(rect: CompactRect, eps: float) -> int:
    """Minimal N with log_tail_bound(rect.sigma_min, N) < eps/2."""
    if rect.region != "absolute":
        raise ValueError("truncation choice needs an 'absolute'-tagged rectangle")
    if eps <= 0:
        raise ValueError("eps must be positive")
    sigma = rect.sigma_min
    target = eps / 2.0
    # feasibility: the bound needs p_{N+1} beyond roughly the inversion of its
    # integral term; refuse rather than sieve into the billions
    p_star = ((sigma - 1.0) * target / 2.0) ** (-1.0 / (sigma - 1.0))
    if p_star > 1e8:
        raise AccuracyExhausted(
            f"eps/2 = {target:.3e} needs primes past {p_star:.3e}", target)
    lo, hi = 1, 1
    while log_tail_bound(sigma, hi) >= target:
        lo, hi = hi, hi * 2
    while lo < hi:
        mid = (lo + hi) // 2
        if log_tail_bound(sigma, mid) < target:
            hi = mid
        else:
            lo = mid + 1
    return lo


# ---------------------------------------------------------------------------
# Grid sup

@dataclass(frozen=True)
class GridSup:
    """Grid maximum of |f| with the spacing callers need for safety margins."""

    value: float
    arg: complex
    spacing_sigma: float
    spacing_t: float


def sup_on_grid(f, rect: CompactRect) -> GridSup:
    """max |f(s)| over the rectangle grid; needs >= 2 nodes per axis."""
    if rect.grid_sigma < 2 or rect.grid_t < 2:
        raise ValueError("sup needs >= 2 grid nodes per axis")
    if rect.sigma_min == rect.sigma_max or rect.t_min == rect.t_max:
        raise ValueError("sup needs nonzero extent on both axes")
    best, arg = -1.0, complex(rect.sigma_min, rect.t_min)
    for s in rect.s_grid().ravel():
        try:
            v = abs(f(s))
        except Exception as exc:
            raise type(exc)(f"evaluation failed at s={s}: {exc}") from exc
        if v > best:
            best, arg = v, s
    ds, dt = rect.spacing()
    return GridSup(value=best, arg=complex(arg), spacing_sigma=ds, spacing_t=dt)
