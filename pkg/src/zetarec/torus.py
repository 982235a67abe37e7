"""Haar-random unit phases on the primes and the support-witness construction.

A TorusPoint assigns one angle per prime p_1..p_R; the derived multiplicative
phases twist Euler factors.  The witness construction pins the first N phases
to 0 so both twisted products share their leading factors exactly, leaving
only tails -- which makes the product difference uniformly small on a
rectangle in the absolute region.  support_mass then measures how much Haar
mass stays within 2*eps of that witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, primes
from .errors import WitnessFailed
from .stats import wilson_interval
from .zetaeval import (CompactRect, EvalConfig, choose_truncation, euler_product,
                       log_tail_bound, zeta)

_MIN_SUPPORT = 1000


@dataclass(frozen=True)
class TorusPoint:
    """Angles in [0, 2pi) for the first R primes; phases derived on demand.

    Storing angles (never drifting complex pairs) keeps |w(p)| = 1 exact.
    """

    angles: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=np.float64)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("angles must be a nonempty 1-d array")
        if np.any(a < 0) or np.any(a >= 2 * math.pi):
            raise ValueError("angles must lie in [0, 2pi)")
        object.__setattr__(self, "angles", a)

    @property
    def R(self) -> int:
        return int(self.angles.shape[0])

    def phases(self, power: int = 1) -> np.ndarray:
        """e^{i * power * angle} per prime."""
        return np.exp(1j * power * self.angles)

    def value_at(self, n: int) -> complex:
        """Multiplicative phase of the integer n, prod_p w(p)^v(n;p)."""
        if n < 1:
            raise ValueError("need n >= 1")
        total = 0.0
        sup = primes.first_n_primes(self.R)
        ordinals = {int(p): i for i, p in enumerate(sup)}
        for p, e in primes.factorize(n).entries:
            if p not in ordinals:
                raise ValueError(f"prime {p} outside phase support")
            total += float(e) * self.angles[ordinals[p]]
        return complex(np.exp(1j * total))


def sample_phases(R: int, seed: int) -> TorusPoint:
    """R independent angles uniform on [0, 2pi), reproducible from seed."""
    if R < 1:
        raise ValueError("need R >= 1")
    rng = np.random.default_rng(seed)
    return TorusPoint(angles=rng.uniform(0.0, 2.0 * math.pi, R))


def twisted_product_diff(s: complex, point: TorusPoint, j: int, k: int,
                         n_primes: int, cfg: EvalConfig | None = None) -> complex:
    """Difference of the j- and k-power twisted truncated Euler products.

    Twist powers must be coprime; equal powers are allowed as the degenerate
    case (identically zero difference).
    """
    if j != k and math.gcd(abs(j), abs(k)) != 1:
        raise ValueError("twist powers must be coprime")
    if j == k:
        return 0.0 + 0.0j
    return (euler_product(s, point, j, n_primes, cfg)
            - euler_product(s, point, k, n_primes, cfg))


def _pns_matrix(rect: CompactRect, R: int) -> np.ndarray:
    """p^{-s} for every grid node (rows) and the first R primes (cols)."""
    logp = np.log(primes.first_n_primes(R).astype(np.float64))
    s = rect.s_grid().ravel()
    return np.ascontiguousarray(np.exp(-s[:, None] * logp[None, :]))


@dataclass(frozen=True)
class WitnessFunction:
    """Grid samples of a verified small product difference.

    The generating point has its first prefix_n angles at 0; sup_norm is the
    verified grid maximum, strictly below the eps it was built for.
    """

    rect: CompactRect
    eps: float
    j: int
    k: int
    prefix_n: int
    point: TorusPoint = field(repr=False)
    values: np.ndarray = field(repr=False)
    sup_norm: float
    seed: int
    tail_bound: float
    log_budget: float
    value_bound: float

    def summary(self) -> dict:
        return {
            "eps": self.eps, "j": self.j, "k": self.k,
            "prefix_n": self.prefix_n, "support": self.point.R,
            "sup_norm": self.sup_norm, "seed": self.seed,
            "tail_bound": self.tail_bound, "log_budget": self.log_budget,
            "value_bound": self.value_bound,
            "grid": [self.rect.grid_sigma, self.rect.grid_t],
        }


def support_witness(rect: CompactRect, eps: float, j: int, k: int, seed: int,
                    cfg: EvalConfig | None = None, safety: float = 0.95) -> WitnessFunction:
    """Construct and verify a witness difference with sup below eps.

    Chooses the phase-pinning prefix so both log-product tails stay below half
    the log budget log(1 + safety*eps/B), B an upper bound for the product
    modulus; then |e^y - e^{y'}| = |e^{y'}||e^{y-y'} - 1| turns that into a
    value bound of safety*eps.  The grid sup is verified directly on top.
    """
    cfg = cfg or EvalConfig()
    if rect.region != "absolute":
        raise ValueError("witness construction needs an 'absolute' rectangle")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if math.gcd(abs(j), abs(k)) != 1 or j == 0 or k == 0:
        raise ValueError("twist powers must be nonzero coprime integers")
    bound = abs(zeta(rect.sigma_min, cfg)) + cfg.target_abs_error
    log_budget = math.log1p(safety * eps / bound)
    prefix = choose_truncation(rect, log_budget)
    support = max(prefix, _MIN_SUPPORT)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, support)
    angles[:prefix] = 0.0
    point = TorusPoint(angles=angles)
    base = _pns_matrix(rect, support)
    vals = kernels.torus_product_diff(point.angles, j, k, base)
    vals = vals.reshape(rect.grid_sigma, rect.grid_t)
    sup = float(np.abs(vals).max())
    if sup >= eps:
        raise WitnessFailed(sup, eps)
    return WitnessFunction(
        rect=rect, eps=eps, j=j, k=k, prefix_n=prefix, point=point,
        values=vals, sup_norm=sup, seed=seed,
        tail_bound=log_tail_bound(rect.sigma_min, prefix),
        log_budget=log_budget, value_bound=bound * math.expm1(log_budget))


@dataclass(frozen=True)
class SupportMass:
    """Monte Carlo estimate of Haar mass near a witness, with its interval."""

    value: float
    hits: int
    trials: int
    confidence: float
    ci_low: float
    ci_high: float

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def support_mass(rect: CompactRect, eps: float, witness: WitnessFunction,
                 j: int, k: int, trials: int, seed: int,
                 cfg: EvalConfig | None = None,
                 confidence: float = 0.95) -> SupportMass:
    """Fraction of Haar samples within grid-sup distance 2*eps of the witness.

    Trial i draws its own stream from (seed, i), so results are independent
    of evaluation order and reproducible under parallel fan-out.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    support = witness.point.R
    base = _pns_matrix(rect, support)
    target = witness.values.reshape(rect.grid_sigma, rect.grid_t)
    if (rect.grid_sigma, rect.grid_t) != witness.values.shape:
        raise ValueError("rect grid must match witness grid")
    hits = 0
    for i in range(trials):
        rng = np.random.default_rng((seed, i))
        angles = rng.uniform(0.0, 2.0 * math.pi, support)
        diff = kernels.torus_product_diff(angles, j, k, base)
        sup = float(np.abs(diff.reshape(target.shape) - target).max())
        if sup < 2.0 * eps:
            hits += 1
    lo, hi = wilson_interval(hits, trials, confidence)
    return SupportMass(value=hits / trials, hits=hits, trials=trials,
                       confidence=confidence, ci_low=lo, ci_high=hi)
