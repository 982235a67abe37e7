"""Prime generation and exact factorization bookkeeping.

Every other module pulls its primes from here.  Tables are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# Segments of this many integers keep the segmented sieve inside L2-ish memory.
_SEGMENT = 1 << 21


def _simple_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit))
    chunks = [base]
    lo = math.isqrt(limit) + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT, limit + 1)  # exclusive
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                mask[start - lo:: p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeTable:
    """All primes <= limit, with 1-based ordinal lookup (index[2] == 1)."""

    limit: int
    primes: np.ndarray
    index: dict[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def nth(self, n: int) -> int:
        """The n-th prime, 1-based."""
        if not 1 <= n <= len(self.primes):
            raise ValueError(f"prime ordinal {n} outside table (size {len(self.primes)})")
        return int(self.primes[n - 1])


def sieve(limit: int) -> PrimeTable:
    """All primes <= limit via (segmented) Eratosthenes."""
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    primes = _simple_sieve(limit) if limit <= _SEGMENT else _segmented_sieve(limit)
    index = {int(p): i + 1 for i, p in enumerate(primes)}
    return PrimeTable(limit=limit, primes=primes, index=index)


def first_n_primes(n: int) -> np.ndarray:
    """The first n primes (grows a shared cached table on demand)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    table = _shared_table(_upper_bound_nth_prime(n))
    if len(table) < n:  # bound was somehow short; extend geometrically
        limit = table.limit
        while len(table) < n:
            limit *= 2
            table = _shared_table(limit)
    return table.primes[:n]


def _upper_bound_nth_prime(n: int) -> int:
    # p_n <= n(ln n + ln ln n) for n >= 6 (Rosser-Schoenfeld)
    if n < 6:
        return 13
    x = float(n)
    return int(x * (math.log(x) + math.log(math.log(x)))) + 10


_cache: dict[str, PrimeTable] = {}


def _shared_table(limit: int) -> PrimeTable:
    table = _cache.get("table")
    if table is None or table.limit < limit:
        table = sieve(max(limit, 1 << 10))
        _cache["table"] = table
    return table


@dataclass(frozen=True)
class Factorization:
    """Sorted (prime, exponent) pairs; exponents are exact rationals.

    Integer inputs always factor with integer exponents; rational exponents
    exist so prime-power combinations like 6^(1/2) share the type.
    """

    entries: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        ps = [p for p, _ in self.entries]
        if ps != sorted(set(ps)):
            raise ValueError("factor primes must be distinct and ascending")
        if any(e == 0 for _, e in self.entries):
            raise ValueError("zero exponents are not stored")

    def as_integer(self) -> int:
        """Reconstruct the source integer; requires integer exponents >= 1."""
        value = 1
        for p, e in self.entries:
            if e.denominator != 1 or e < 0:
                raise ValueError(f"exponent {e} of {p} is not a positive integer")
            value *= p ** int(e)
        return value

    def log_value(self) -> float:
        """log of the represented positive real, sum of e * log p."""
        return float(sum(float(e) * math.log(p) for p, e in self.entries))


def factorize(n: int, table: PrimeTable | None = None) -> Factorization:
    """Exact factorization by trial division; n = 1 gives the empty product."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    if n == 1:
        return Factorization(entries=())
    if table is None:
        table = _shared_table(max(math.isqrt(n) + 1, 2))
    entries = []
    rest = n
    for p in table.primes:
        p = int(p)
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            entries.append((p, Fraction(e)))
    if rest > 1:
        entries.append((rest, Fraction(1)))
    return Factorization(entries=tuple(entries))
