import math
from fractions import Fraction

import numpy as np
import pytest

from zetarec import kernels
from zetarec.errors import PreconditionFailed, SingularDirection, WindowNotFound
from zetarec.kronecker import (KroneckerQuery, TauWindow, combination_bound_check,
                               find_tau_lattice, find_tau_scan, holds_at,
                               lattice_candidates, max_safe_step,
                               rational_condition_transfer, rational_lift_check,
                               theoretical_density, verify_window)
from zetarec.primes import Factorization


def test_query_validation():
    with pytest.raises(ValueError):
        KroneckerQuery(primes=(3, 2), delta=0.5)
    with pytest.raises(ValueError):
        KroneckerQuery(primes=(2,), delta=2.5)
    with pytest.raises(ValueError):
        KroneckerQuery(primes=(2,), delta=0.0)
    with pytest.raises(ValueError):
        KroneckerQuery(primes=(), delta=0.5)
    with pytest.raises(ValueError):
        TauWindow(tau_lo=1.0, tau_hi=1.0)


def test_scan_single_prime_window_arithmetic():
    q = KroneckerQuery(primes=(2,), delta=0.5)
    windows = find_tau_scan(q, 30.0, max_safe_step(q))
    period = 2 * math.pi / math.log(2)          # ~9.0647
    half = 2 * math.asin(0.25) / math.log(2)    # ~0.7291
    assert len(windows) == 4
    tol = max_safe_step(q) / 50
    for m, w in enumerate(windows):
        assert w.certified
        lo_expect = max(0.0, m * period - half)
        assert abs(w.tau_lo - lo_expect) < tol
        assert abs(w.tau_hi - (m * period + half)) < tol


def test_scan_vacuous_delta_gives_full_range():
    q = KroneckerQuery(primes=(2, 3), delta=2.0)
    windows = find_tau_scan(q, 50.0, max_safe_step(q))
    assert len(windows) == 1
    assert windows[0].tau_lo == 0.0 and windows[0].tau_hi == 50.0


def test_scan_rejects_coarse_step():
    q = KroneckerQuery(primes=(2, 3, 5), delta=0.5)
    with pytest.raises(ValueError):
        find_tau_scan(q, 100.0, 2 * max_safe_step(q))


def test_scan_measure_against_finer_oracle():
    q = KroneckerQuery(primes=(2, 3, 5), delta=0.5)
    step = max_safe_step(q)
    coarse = find_tau_scan(q, 2e4, step)
    fine = find_tau_scan(q, 2e4, step / 10.0)
    m_coarse = sum(w.width for w in coarse)
    m_fine = sum(w.width for w in fine)
    # the coarse lattice can only lose intersection slivers, never gain
    edge_budget = len(coarse) * 2 * (step / 100 + step / 1000)
    assert m_coarse <= m_fine + edge_budget
    assert m_fine - m_coarse <= 0.10 * m_fine
    theory = theoretical_density(q)
    assert abs(m_coarse / 2e4 - theory) < 0.25 * theory
    assert abs(m_fine / 2e4 - theory) < 0.25 * theory


def test_certified_windows_reverify_interior_points():
    q = KroneckerQuery(primes=(2, 3), delta=0.6)
    for w in find_tau_scan(q, 500.0, max_safe_step(q)):
        assert w.certified
        assert verify_window(q, w, points=10)


def test_theoretical_density_values():
    assert theoretical_density(KroneckerQuery(primes=(2,), delta=2.0)) == 1.0
    half = theoretical_density(KroneckerQuery(primes=(2,), delta=math.sqrt(2)))
    assert abs(half - 0.5) < 1e-15
    got = theoretical_density(KroneckerQuery(primes=(2, 3, 5), delta=0.5))
    assert abs(got - (2 * math.asin(0.25) / math.pi) ** 3) < 1e-15
    q = KroneckerQuery(primes=(2,), delta=2.0, extra_targets=((1.0, math.sqrt(2)),))
    assert theoretical_density(q) == 1.0
    assert abs(theoretical_density(q, extras_independent=True) - 0.5) < 1e-15


# --- lattice search ----------------------------------------------------------

def test_lattice_single_prime_exact():
    q = KroneckerQuery(primes=(2,), delta=0.3)
    w = find_tau_lattice(q, 100.0)
    assert w.certified
    assert w.tau_lo <= 2 * math.pi / math.log(2) <= w.tau_hi


def test_lattice_two_primes_cross_checked_with_scan():
    q = KroneckerQuery(primes=(2, 3), delta=0.3)
    w = find_tau_lattice(q, 1e4)
    assert w.certified and w.tau_hi <= 1e4
    scan = find_tau_scan(q, w.tau_hi + 1.0, max_safe_step(q))
    starts = [sw.tau_lo for sw in scan if sw.width > 1e-6]
    # the exhaustive scan must reach the lattice window no later than it
    assert min(starts) <= w.tau_lo + 1e-6
    assert any(sw.tau_lo - 1e-3 <= w.mid <= sw.tau_hi + 1e-3 for sw in scan)


def test_lattice_five_primes():
    q = KroneckerQuery(primes=(2, 3, 5, 7, 11), delta=0.4)
    w = find_tau_lattice(q, 1e7)
    assert w.certified
    assert verify_window(q, w)
    scan = find_tau_scan(q, w.tau_hi + 1.0, max_safe_step(q))
    assert min(sw.tau_lo for sw in scan) <= w.tau_lo + 1e-6


def test_lattice_not_found_reports_bound():
    q = KroneckerQuery(primes=(2, 3, 5, 7), delta=0.05)
    with pytest.raises(WindowNotFound):
        find_tau_lattice(q, 50.0)


def test_lattice_candidates_all_admissible():
    q = KroneckerQuery(primes=(2, 3, 5), delta=0.35)
    taus = lattice_candidates(q, 1e8, limit=16)
    assert taus == sorted(taus) and len(taus) > 0
    for tau in taus:
        assert holds_at(q, tau)


# --- lift identity -----------------------------------------------------------

def test_lift_identity_trivial_and_exact_cases():
    lhs, rhs = rational_lift_check(1, 1, 3.7, 5)
    assert abs(lhs - rhs) < 1e-15
    # theta = pi/3 via tau = (pi/3)*1/log 5, j=2, k=1: both sides sqrt(3)
    tau = (math.pi / 3) / math.log(5)
    lhs, rhs = rational_lift_check(2, 1, tau, 5)
    assert abs(lhs - math.sqrt(3)) < 1e-12
    assert abs(lhs - rhs) < 1e-12


def test_lift_identity_random_sweep():
    rng = np.random.default_rng(1234)
    ps = [2, 3, 5, 7, 11, 13, 17, 19, 23]
    checked = 0
    for _ in range(10**4):
        j = int(rng.integers(1, 10)) * int(rng.choice([-1, 1]))
        k = int(rng.integers(1, 10)) * int(rng.choice([-1, 1]))
        if math.gcd(abs(j), abs(k)) != 1:
            continue
        tau = float(rng.uniform(0.0, 100.0))
        p = int(rng.choice(ps))
        try:
            lhs, rhs = rational_lift_check(j, k, tau, p)
        except SingularDirection:
            continue
        checked += 1
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
    assert checked > 5000


def test_lift_identity_guards():
    with pytest.raises(ValueError):
        rational_lift_check(2, 0, 1.0, 2)
    with pytest.raises(ValueError):
        rational_lift_check(2, 4, 1.0, 2)
    # k-th root direction: theta = 2 pi/3 -> sum over m<3 vanishes
    tau = (2 * math.pi / 3) * 3 / math.log(2)
    with pytest.raises(SingularDirection):
        rational_lift_check(2, 3, tau, 2)


# --- condition transfer ------------------------------------------------------

def test_transfer_identity_cases():
    q = KroneckerQuery(primes=(2, 3), delta=0.4)
    assert rational_condition_transfer(1, 1, q) == q
    t21 = rational_condition_transfer(2, 1, q)
    assert t21.primes == (2, 3) and abs(t21.delta - 0.2) < 1e-15
    t13 = rational_condition_transfer(1, 3, KroneckerQuery(primes=(2,), delta=0.3))
    assert t13.primes == ()
    (freq, d), = t13.extra_targets
    assert abs(freq - math.log(2) / 3) < 1e-15
    assert abs(d - 0.1) < 1e-15


def _shifted_ok(j, k, tau, ps, delta):
    return all(abs(np.exp(1j * (j / k) * tau * math.log(p)) - 1) < delta for p in ps)


def _plain_ok(j, k, tau, ps, delta):
    return all(abs(np.exp(1j * tau * math.log(p)) - 1) < delta for p in ps)


@pytest.mark.parametrize("j,k", [(1, 3), (2, 3), (3, 2), (2, 1)])
def test_transfer_implication_no_counterexample(j, k):
    delta = 0.4
    q = KroneckerQuery(primes=(2,), delta=delta)
    tq = rational_condition_transfer(j, k, q)
    conds = tq.conditions()
    freqs = np.array([f for f, _ in conds])
    deltas = np.array([d for _, d in conds])
    rng = np.random.default_rng(99)
    taus = rng.uniform(0.0, 1e4, 10**4)
    mask = kernels.kron_mask(np.ascontiguousarray(taus), freqs, deltas).astype(bool)
    hits = taus[mask]
    assert hits.size > 0
    for tau in hits:
        assert _plain_ok(j, k, tau, (2,), delta)
        assert _shifted_ok(j, k, tau, (2,), delta)
        # the implied raw-phase bound matches the min{delta, |k/j| delta} form
        raw = abs(np.exp(1j * tau * math.log(2)) - 1)
        assert raw < min(delta, abs(k / j) * delta) + 1e-12


def test_raw_phase_conditioning_alone_is_insufficient():
    # near tau*log2 = 2 pi (odd multiple), the raw condition holds but the
    # halved phase sits by -1; this is why the transfer scales frequencies
    tau = 2 * math.pi / math.log(2)
    raw = abs(np.exp(1j * tau * math.log(2)) - 1)
    halved = abs(np.exp(1j * (tau / 2) * math.log(2)) - 1)
    assert raw < 1e-9
    assert halved > 1.99


# --- combination bounds ------------------------------------------------------

def _admissible_tau_for(primes_, delta, denominators):
    freqs = tuple(math.log(p) / b for p, b in zip(primes_, denominators))
    deltas = tuple(delta / b for b in denominators)
    q = KroneckerQuery(primes=(), delta=delta,
                       extra_targets=tuple(zip(freqs, deltas)))
    return find_tau_lattice(q, 1e9).mid


def test_combination_six_stays_under_double_budget():
    delta = 0.3
    tau = _admissible_tau_for((2, 3), delta, (1, 1))
    target = Factorization(entries=((2, Fraction(1)), (3, Fraction(1))))
    achieved, bound = combination_bound_check(target, tau, delta)
    assert abs(bound - 2 * delta) < 1e-15
    assert achieved <= bound + 1e-12


def test_combination_empty_is_zero():
    achieved, bound = combination_bound_check(Factorization(entries=()), 5.0, 0.2)
    assert achieved == 0.0 and bound == 0.0


def test_combination_square_root_half_budget():
    delta = 0.3
    target = Factorization(entries=((2, Fraction(1, 2)),))
    count = 0
    for tau in lattice_candidates(
            KroneckerQuery(primes=(), delta=delta,
                           extra_targets=((math.log(2) / 2, delta / 2),)),
            1e6, limit=50):
        achieved, bound = combination_bound_check(target, tau, delta)
        assert abs(bound - delta / 2) < 1e-15
        assert achieved <= bound + 1e-12
        count += 1
    assert count > 10


def test_combination_precondition_failure_lists_prime():
    target = Factorization(entries=((2, Fraction(1)),))
    with pytest.raises(PreconditionFailed, match="prime 2"):
        combination_bound_check(target, math.pi / math.log(2), 0.1)
