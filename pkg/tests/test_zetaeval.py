import math

import numpy as np
import pytest

from zetarec import primes, torus
from zetarec.errors import AccuracyExhausted, PoleError, SingularFactor
from zetarec.zetaeval import (CompactRect, EvalConfig, choose_truncation,
                              em_cut, euler_product, log_tail_bound,
                              sup_on_grid, zeta, zeta_row)

from oracles import dirichlet_partial, zeta_alternating

TIGHT = EvalConfig(target_abs_error=1e-13)


def test_zeta_two_is_pi_squared_over_six():
    assert abs(zeta(2, TIGHT) - math.pi**2 / 6) < 1e-12


def test_zeta_known_points():
    assert abs(zeta(0.5, TIGHT) - (-1.4603545088095868)) < 1e-10
    assert abs(zeta(3, TIGHT) - 1.2020569031595942854) < 1e-12


def test_zeta_against_alternating_oracle_random_points():
    rng = np.random.default_rng(42)
    for _ in range(25):
        s = complex(rng.uniform(0.6, 3.0), rng.uniform(-1000.0, 1000.0))
        if abs(s - 1) < 0.05:
            continue
        assert abs(zeta(s, TIGHT) - zeta_alternating(s, 1e-13)) < 1e-10


def test_zeta_pole_and_domain_errors():
    with pytest.raises(PoleError):
        zeta(1.0, TIGHT)
    with pytest.raises(ValueError):
        zeta(-0.5, TIGHT)


def test_zeta_accuracy_exhaustion_carries_bound():
    cfg = EvalConfig(target_abs_error=1e-12, max_terms=50)
    with pytest.raises(AccuracyExhausted) as err:
        zeta(0.6 + 500j, cfg)
    assert err.value.achieved_bound > 0


def test_zeta_schwarz_reflection():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = complex(rng.uniform(0.6, 2.5), rng.uniform(0.1, 50.0))
        assert abs(zeta(np.conj(s), TIGHT) - np.conj(zeta(s, TIGHT))) < 1e-12


def test_zeta_row_matches_scalar():
    ts = np.array([0.0, 1.0, 17.5, -120.0])
    row = zeta_row(1.3, ts, TIGHT)
    for t, v in zip(ts, row):
        assert abs(v - zeta(complex(1.3, t), TIGHT)) < 1e-12


def test_partial_sum_tail_domination():
    # |zeta - partial sum| stays below the integral tail bound for sigma >= 1.5
    for sigma in (1.5, 2.0, 3.0):
        for m in (10, 100, 1000):
            tail = m ** (1.0 - sigma) / (sigma - 1.0) + m ** -sigma
            gap = abs(zeta(sigma, TIGHT) - dirichlet_partial(sigma, m))
            assert gap <= tail


def test_extended_precision_mode_agrees():
    cfg = EvalConfig(target_abs_error=1e-13, mp_dps=40)
    for s in (2.0, 0.75 + 3j, 1.5 + 40j):
        assert abs(zeta(s, cfg) - zeta(s, TIGHT)) < 1e-12


def test_em_cut_grows_with_accuracy_and_t():
    loose = EvalConfig(target_abs_error=1e-6)
    tight = EvalConfig(target_abs_error=1e-12)
    assert em_cut(1.5, 0.0, tight) >= em_cut(1.5, 0.0, loose)
    assert em_cut(1.5, 1000.0, loose) > em_cut(1.5, 10.0, loose)


# --- Euler products ---------------------------------------------------------

def _const_point(angle: float, R: int = 64) -> torus.TorusPoint:
    return torus.TorusPoint(angles=np.full(R, angle))


def test_euler_product_single_factor():
    one = _const_point(0.0)
    assert abs(euler_product(2.0, one, 1, 1) - 4.0 / 3.0) < 1e-15
    half = torus.TorusPoint(angles=np.array([math.pi]))
    assert abs(euler_product(2.0, half, 1, 1) - 0.8) < 1e-15


def test_euler_product_approaches_zeta():
    one = _const_point(0.0, R=200)
    value = euler_product(2.0, one, 1, 100)
    assert abs(value - math.pi**2 / 6) < log_tail_bound(2.0, 100) * 2.0


def test_euler_product_log_consistency():
    one = _const_point(0.0, R=64)
    for power in (1, 2, 5):
        prod = euler_product(2.5, one, power, 50)
        ps = primes.first_n_primes(50).astype(float)
        log_sum = -np.sum(np.log(1.0 - ps**-2.5))
        assert abs(prod - np.exp(log_sum)) < 1e-12


def test_euler_product_singular_factor():
    one = _const_point(0.0, R=4)
    # 1 - 2^{-s} = 0 at s = 0 + 2 pi i / log 2... use s real where 2^-s = 1
    with pytest.raises((SingularFactor, ValueError)):
        euler_product(0.5 + 0j, one, 1, 2)  # Re(s) too small -> ValueError
    # exact zero: w * p^{-s} = 1 requires |p^{-s}| = 1, impossible for Re>1/2,
    # so the guard is only reachable through crafted inputs; check the API
    with pytest.raises(ValueError):
        euler_product(2.0, one, 1, 10**3)  # exceeds support R=4


# --- tail bounds and truncation --------------------------------------------

def test_log_tail_bound_example_value():
    bound = log_tail_bound(2.0, 25)
    assert bound <= 0.0207  # crude comparison value: 2/97
    # validity: the bound dominates the worst-case tail sum over |z| = 1
    ps = primes.first_n_primes(5000)[25:].astype(float)
    worst = np.sum(ps**-2.0 / (1.0 - ps**-2.0))
    assert bound >= worst


def test_log_tail_bound_monotone_decreasing():
    vals = [log_tail_bound(2.0, n) for n in range(1, 60)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_log_tail_bound_rejects_sigma_at_one():
    with pytest.raises(ValueError):
        log_tail_bound(1.0, 10)


def test_choose_truncation_inverts_bound():
    rect = CompactRect(2.0, 2.5, 0.0, 1.0, region="absolute")
    n = choose_truncation(rect, 0.1)
    assert n <= 50
    assert log_tail_bound(2.0, n) < 0.05
    assert n == 1 or log_tail_bound(2.0, n - 1) >= 0.05
    # brute confirmation that the chosen cut really controls the tail
    ps = primes.first_n_primes(20000)[n:].astype(float)
    brute = np.sum(ps**-2.0 / (1.0 - ps**-2.0))
    assert brute < 0.05


def test_choose_truncation_monotonicity():
    rect = CompactRect(1.5, 2.0, 0.0, 1.0, region="absolute")
    assert choose_truncation(rect, 1e9) == 1
    eps = 0.4
    prev = 0
    for _ in range(6):
        n = choose_truncation(rect, eps)
        assert n >= prev
        prev = n
        eps /= 2.0


# --- rectangles and grid sup -------------------------------------------------

def test_rect_region_validation():
    with pytest.raises(ValueError):
        CompactRect(0.9, 1.2, 0, 1, region="absolute")
    with pytest.raises(ValueError):
        CompactRect(0.4, 0.8, 0, 1, region="critical-strip")
    with pytest.raises(ValueError):
        CompactRect(2.0, 1.0, 0, 1)
    CompactRect(0.6, 0.9, 0, 1, region="critical-strip")


def test_sup_on_grid_cases():
    square = CompactRect(0.0, 1.0, 0.0, 1.0, grid_sigma=2, grid_t=2)
    assert sup_on_grid(lambda s: 0.0, square).value == 0.0
    corner = sup_on_grid(lambda s: s, square)
    assert abs(corner.value - math.sqrt(2)) < 1e-15
    assert corner.arg == 1 + 1j


def test_sup_on_grid_zeta_boundary_max():
    rect = CompactRect(1.5, 2.0, 0.0, 1.0, grid_sigma=20, grid_t=20,
                       region="absolute")
    got = sup_on_grid(lambda s: zeta(s, TIGHT), rect)
    dense = CompactRect(1.5, 2.0, 0.0, 1.0, grid_sigma=41, grid_t=41,
                        region="absolute")
    confirm = sup_on_grid(lambda s: zeta(s, TIGHT), dense)
    assert abs(got.value - zeta(1.5, TIGHT).real) < 1e-10
    assert confirm.value >= got.value - 1e-12
    assert got.arg.real == 1.5 and got.arg.imag == 0.0


def test_sup_on_grid_termwise_domination_absolute_region():
    rect = CompactRect(1.5, 2.0, -3.0, 3.0, grid_sigma=9, grid_t=9,
                       region="absolute")
    got = sup_on_grid(lambda s: zeta(s, TIGHT), rect)
    assert got.value <= zeta(1.5, TIGHT).real + 1e-12


def test_sup_on_grid_preconditions():
    with pytest.raises(ValueError):
        sup_on_grid(lambda s: s, CompactRect(0, 1, 0, 1, grid_sigma=1, grid_t=5))
    with pytest.raises(ValueError):
        sup_on_grid(lambda s: s, CompactRect(0, 0, 0, 1, grid_sigma=3, grid_t=3))


def test_sup_on_grid_propagates_failure_with_location():
    rect = CompactRect(0.0, 1.0, 0.0, 1.0, grid_sigma=2, grid_t=2)

    def bad(s):
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError, match="s="):
        sup_on_grid(bad, rect)
