"""Simultaneous phase approximation: find and certify shift values tau with
every |exp(i tau log p) - 1| below a per-condition threshold.

Windows come from two routes: an exhaustive lattice scan over [0, T] with a
no-skip step bound, and a simultaneous-approximation lattice search (LLL)
that reaches far beyond scannable ranges.  Both re-verify candidates against
the stored conditions before reporting anything as certified.

A condition (freq, delta) reads  2*|sin(tau*freq/2)| < delta,  which is the
same as |exp(i*tau*freq) - 1| < delta.  delta >= 2 is vacuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import PreconditionFailed, SingularDirection, WindowNotFound
from .primes import Factorization

_REFINE_FRACTION = 100.0   # endpoint refinement: tolerance = step / this
_MP_TAU = 1e9              # beyond this, certify with extended precision


@dataclass(frozen=True)
class KroneckerQuery:
    """Primes sharing one threshold, plus explicit (log-value, delta) targets."""

    primes: tuple[int, ...]
    delta: float
    extra_targets: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ps = list(self.primes)
        if ps != sorted(set(ps)):
            raise ValueError("primes must be distinct and ascending")
        if not 0 < self.delta <= 2:
            raise ValueError("delta must lie in (0, 2]")
        for freq, d in self.extra_targets:
            if freq <= 0:
                raise ValueError("extra target frequencies must be positive")
            if not 0 < d <= 2:
                raise ValueError("extra target deltas must lie in (0, 2]")
        if not ps and not self.extra_targets:
            raise ValueError("query needs at least one condition")

    def conditions(self) -> list[tuple[float, float]]:
        out = [(math.log(p), self.delta) for p in self.primes]
        out.extend(self.extra_targets)
        return out


@dataclass(frozen=True)
class TauWindow:
    """One interval of admissible tau; certified means endpoints and midpoint
    re-verified against every condition."""

    tau_lo: float
    tau_hi: float
    certified: bool = False

    def __post_init__(self):
        if not self.tau_lo < self.tau_hi:
            raise ValueError("window endpoints out of order")

    @property
    def width(self) -> float:
        return self.tau_hi - self.tau_lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.tau_lo + self.tau_hi)


def holds_at(query: KroneckerQuery, tau: float) -> bool:
    """All conditions at one tau; extended precision once tau is large."""
    conds = query.conditions()
    if abs(tau) > _MP_TAU:
        import mpmath as mp
        with mp.workdps(40):
            t = mp.mpf(tau)
            return all(2 * abs(mp.sin(t * mp.mpf(freq) / 2)) < d for freq, d in conds)
    return all(2.0 * abs(math.sin(tau * freq / 2.0)) < d for freq, d in conds)


def verify_window(query: KroneckerQuery, window: TauWindow, points: int = 10) -> bool:
    """Re-verify every condition on interior points plus both endpoints."""
    taus = np.linspace(window.tau_lo, window.tau_hi, points + 2)
    return all(holds_at(query, float(t)) for t in taus)


def max_safe_step(query: KroneckerQuery) -> float:
    """Largest scan step that cannot jump across a whole window.

    |exp(i tau f) - 1| moves at rate <= f in tau, so a window at threshold d
    is wider than d/f; half of that is a safe lattice step.
    """
    return min(min(d, 2.0) / (2.0 * freq) for freq, d in query.conditions())


def _bisect_edge(query: KroneckerQuery, inside: float, outside: float,
                 tol: float) -> float:
    """Boundary between a holding and a failing tau, returned on the inside."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if holds_at(query, mid):
            inside = mid
        else:
            outside = mid
    return inside


def find_tau_scan(query: KroneckerQuery, T: float, step: float) -> list[TauWindow]:
    """All maximal windows in [0, T] on the scan lattice, edges refined.

    step must not exceed max_safe_step(query), which keeps every single
    condition's admissible interval visible on the lattice; endpoints are
    refined by bisection to step/100 and certified in place.  Intersection
    slivers narrower than the step can still fall between lattice points,
    so the reported total measure is a slight underestimate.
    """
    if T <= 0:
        raise ValueError("need T > 0")
    safe = max_safe_step(query)
    if not 0 < step <= safe * (1 + 1e-12):
        raise ValueError(f"step {step:.6g} too coarse; safe bound {safe:.6g}")
    n = int(math.floor(T / step)) + 1
    taus = np.arange(n, dtype=np.float64) * step
    freqs = np.array([f for f, _ in query.conditions()])
    deltas = np.array([d for _, d in query.conditions()])
    mask = kernels.kron_mask(taus, freqs, deltas).astype(bool)
    tol = step / _REFINE_FRACTION
    windows: list[TauWindow] = []
    i = 0
    while i < n:
        if not mask[i]:
            i += 1
            continue
        run_start = i
        while i + 1 < n and mask[i + 1]:
            i += 1
        run_end = i
        i += 1
        lo = taus[run_start]
        if run_start > 0:
            lo = _bisect_edge(query, lo, taus[run_start] - step, tol)
        hi = taus[run_end]
        if run_end + 1 < n:
            hi = _bisect_edge(query, hi, taus[run_end] + step, tol)
        elif holds_at(query, T):
            hi = T
        if not lo < hi:
            continue
        w = TauWindow(tau_lo=float(lo), tau_hi=float(hi), certified=False)
        certified = (holds_at(query, w.tau_lo) and holds_at(query, w.mid)
                     and holds_at(query, w.tau_hi))
        windows.append(TauWindow(w.tau_lo, w.tau_hi, certified=certified))
    return windows


def theoretical_density(query: KroneckerQuery, extras_independent: bool = False) -> float:
    """Product of per-condition arc densities 2*arcsin(delta/2)/pi.

    Valid because prime logarithms are linearly independent over the
    rationals; extra targets join the product only when the caller declares
    them independent too.
    """
    dens = 1.0
    for _ in query.primes:
        dens *= 2.0 * math.asin(min(query.delta, 2.0) / 2.0) / math.pi
    if extras_independent:
        for _, d in query.extra_targets:
            dens *= 2.0 * math.asin(min(d, 2.0) / 2.0) / math.pi
    return dens


# ---------------------------------------------------------------------------
# Lattice search

def _lll_reduce(basis: np.ndarray, delta: float = 0.75) -> np.ndarray:
    """Textbook LLL on row vectors (float64; exactness comes from the
    downstream candidate verification, not from here)."""
    b = basis.astype(np.float64).copy()
    n = b.shape[0]

    def gso():
        q = np.zeros_like(b)
        mu = np.zeros((n, n))
        for i in range(n):
            q[i] = b[i]
            for jj in range(i):
                denom = q[jj] @ q[jj]
                mu[i, jj] = (b[i] @ q[jj]) / denom if denom > 0 else 0.0
                q[i] = q[i] - mu[i, jj] * q[jj]
        return q, mu

    q, mu = gso()
    k = 1
    guard = 0
    while k < n and guard < 10_000:
        guard += 1
        for jj in range(k - 1, -1, -1):
            r = round(mu[k, jj])
            if r:
                b[k] -= r * b[jj]
                q, mu = gso()
        if q[k] @ q[k] >= (delta - mu[k, k - 1] ** 2) * (q[k - 1] @ q[k - 1]):
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            q, mu = gso()
            k = max(k - 1, 1)
    return b


def lattice_candidates(query: KroneckerQuery, search_bound: float,
                       limit: int = 64) -> list[float]:
    """Verified admissible tau values from simultaneous approximation.

    Anchors the first condition exactly at tau = 2 pi m / f0 and reduces the
    weighted approximation lattice for the remaining conditions over a
    geometric sweep of scalings; every returned tau passes holds_at.
    """
    conds = [(f, d) for f, d in query.conditions()]
    live = [(f, d) for f, d in conds if d < 2.0]
    if not live:
        live = conds[:1]
    f0, _ = live[0]
    others = live[1:]
    period = 2.0 * math.pi / f0
    found: set[int] = set()
    out: list[float] = []
    if not others:
        m = 1
        while m * period <= search_bound and len(out) < limit:
            if holds_at(query, m * period):
                out.append(m * period)
            m += 1
        return out
    betas = np.array([f / f0 for f, _ in others])
    etas = np.array([math.asin(min(d, 2.0) / 2.0) / math.pi for _, d in others])
    d = len(others)
    q_max = search_bound / period
    q_scale = 16.0
    while q_scale <= 4.0 * q_max and len(out) < limit:
        basis = np.zeros((d + 1, d + 1))
        basis[0, 0] = 1.0 / q_scale
        basis[0, 1:] = betas / etas
        for c in range(d):
            basis[c + 1, c + 1] = 1.0 / etas[c]
        reduced = _lll_reduce(basis)
        rows = [reduced[i] for i in range(d + 1)]
        rows += [rows[i] + rows[jj] for i in range(d + 1) for jj in range(i + 1, d + 1)]
        rows += [rows[i] - rows[jj] for i in range(d + 1) for jj in range(i + 1, d + 1)]
        for row in rows:
            m = int(round(abs(row[0]) * q_scale))
            if m == 0 or m in found or m > q_max:
                continue
            found.add(m)
            tau = m * period
            if holds_at(query, tau):
                out.append(tau)
        q_scale *= 4.0
    out.sort()
    return out[:limit]


def _window_around(query: KroneckerQuery, tau: float) -> TauWindow:
    """Grow the admissible interval containing tau and certify it."""
    step = max_safe_step(query)
    tol = step / _REFINE_FRACTION

    def edge(direction: float) -> float:
        probe = tau
        while holds_at(query, probe + direction * step):
            probe += direction * step
        return _bisect_edge(query, probe, probe + direction * step, tol)

    lo = max(0.0, edge(-1.0))
    hi = edge(+1.0)
    # pull endpoints inside by the refinement tolerance so they re-verify
    lo, hi = lo + tol, hi - tol
    if not lo < hi:
        lo, hi = tau - tol, tau + tol
    certified = (holds_at(query, lo) and holds_at(query, 0.5 * (lo + hi))
                 and holds_at(query, hi))
    return TauWindow(tau_lo=lo, tau_hi=hi, certified=certified)


def find_tau_lattice(query: KroneckerQuery, search_bound: float) -> TauWindow:
    """One certified window located via lattice reduction (smallest tau found)."""
    if search_bound <= 0:
        raise ValueError("need search_bound > 0")
    for tau in lattice_candidates(query, search_bound):
        window = _window_around(query, tau)
        if window.certified:
            return window
    raise WindowNotFound(search_bound)


# ---------------------------------------------------------------------------
# Rational lift identity and condition transfer

def rational_lift_check(j: int, k: int, tau: float, p: int) -> tuple[float, float]:
    """Both sides of the phase-lift identity at theta = tau log(p)/|k|:

        |e^{i j theta} - 1| = |e^{i k theta} - 1| * |sum_{m<|j|} e^{im theta}|
                                                  / |sum_{m<|k|} e^{im theta}|

    The caller asserts equality to tolerance; a denominator modulus under
    1e-6 raises SingularDirection instead of returning garbage.
    """
    if k == 0 or j == 0:
        raise ValueError("j and k must be nonzero")
    if math.gcd(abs(j), abs(k)) != 1:
        raise ValueError("j and k must be coprime")
    jj, kk = abs(j), abs(k)
    # reduce once so both sides see the same angle at full precision
    theta = math.fmod(tau * math.log(p) / kk, 2.0 * math.pi)
    lhs = abs(np.exp(1j * jj * theta) - 1.0)
    num = abs(np.sum(np.exp(1j * theta * np.arange(jj))))
    den = abs(np.sum(np.exp(1j * theta * np.arange(kk))))
    if den <= 1e-6:
        raise SingularDirection(f"denominator phase sum {den:.3e} at theta={theta:.6g}")
    if den < 5e-2:
        # cancellation in the sums amplifies roundoff by ~200 eps / den; redo
        # both routes termwise in extended precision near singular directions
        import mpmath as mp
        with mp.workdps(40):
            th = mp.mpf(theta)
            lhs_mp = abs(mp.expjpi(jj * th / mp.pi) - 1)
            num_mp = abs(mp.fsum(mp.expjpi(m * th / mp.pi) for m in range(jj)))
            den_mp = abs(mp.fsum(mp.expjpi(m * th / mp.pi) for m in range(kk)))
            rhs_mp = abs(mp.expjpi(kk * th / mp.pi) - 1) * num_mp / den_mp
            return float(lhs_mp), float(rhs_mp)
    rhs = abs(np.exp(1j * kk * theta) - 1.0) * num / den
    return float(lhs), float(rhs)


def rational_condition_transfer(j: int, k: int, query: KroneckerQuery) -> KroneckerQuery:
    """Tighten a query so satisfying it controls both the plain and the
    (j/k)-scaled phase conditions.

    Pinning theta = tau log(p)/|k| with |e^{i theta} - 1| < delta/max(|j|,|k|)
    gives |e^{i tau log p} - 1| <= min(delta, |k/j| delta) (the telescoped
    lift bound) and |e^{i (j/k) tau log p} - 1| <= delta.  Conditioning the
    raw phase alone is NOT enough: tau log p can sit near 2 pi m with m not
    divisible by k, which the division by k then magnifies.
    """
    if j == 0 or k == 0:
        raise ValueError("j and k must be nonzero")
    if math.gcd(abs(j), abs(k)) != 1:
        raise ValueError("j and k must be coprime")
    scale = max(abs(j), abs(k))
    tightened = query.delta / scale
    if abs(k) == 1:
        return KroneckerQuery(primes=query.primes, delta=tightened,
                              extra_targets=query.extra_targets)
    extra = tuple((math.log(p) / abs(k), tightened) for p in query.primes)
    return KroneckerQuery(primes=(), delta=query.delta,
                          extra_targets=extra + query.extra_targets)


def combination_bound_check(target: Factorization, tau: float,
                            delta: float) -> tuple[float, float]:
    """Phase error of a rational prime-power combination against its budget.

    target encodes log a = sum alpha_n log p_n with rational alpha_n.  Each
    base prime must satisfy the k-division condition for its exponent's
    denominator (checked here; PreconditionFailed lists the offender).
    Returns (|e^{i tau log a} - 1|, delta * sum |alpha_n|).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    total = Fraction(0)
    log_a = 0.0
    for p, alpha in target.entries:
        b = alpha.denominator
        phase = 2.0 * abs(math.sin(tau * math.log(p) / (2.0 * b)))
        if phase >= delta / b:
            raise PreconditionFailed(
                f"prime {p}: scaled phase {phase:.6g} >= {delta / b:.6g} "
                f"(exponent {alpha})")
        total += abs(alpha)
        log_a += float(alpha) * math.log(p)
    achieved = 2.0 * abs(math.sin(tau * log_a / 2.0))
    return float(achieved), float(delta * float(total))
