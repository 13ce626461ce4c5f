import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import betainc
from scipy.stats import binom

from fbuq.certificates import (
    Certificate,
    ConfidenceSchedule,
    binomial_tail,
    classic_sample_size,
    kappa_at,
    scalar_sample_size,
    wj_residual,
    wj_sample_size_for,
    wj_solve_tau,
)

KAPPA_T1 = 6e-3 / math.pi ** 2  # kappa = 1e-3 at t = 1


def mp_tau(m, s, kappa_t, dps=60):
    """Root of the wait-and-judge polynomial by plain bisection in high precision (oracle)."""
    with mpmath.workdps(dps):
        coef = [mpmath.binomial(r, s) for r in range(s, m + 1)]
        k = mpmath.mpf(kappa_t) / (m + 1)

        def f(tau):
            return k * mpmath.fsum(c * tau ** j for j, c in enumerate(coef)) - coef[-1] * tau ** (m - s)

        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        for _ in range(120):
            mid = (lo + hi) / 2
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        return float(lo)


def linear_scan(pred, start=1):
    m = start
    while not pred(m):
        m += 1
    return m


# -- confidence schedule ----------------------------------------------------

def test_kappa_schedule_values():
    assert kappa_at(1e-3, 1) == pytest.approx(6.0793e-4, rel=1e-4)
    assert kappa_at(1e-3, 2) == pytest.approx(kappa_at(1e-3, 1) / 4, rel=1e-15)
    sched = ConfidenceSchedule(1e-3)
    assert sched.at(3) == kappa_at(sched, 3)


def test_kappa_partial_sums_stay_below_budget():
    sched = ConfidenceSchedule(0.05)
    total = math.fsum(sched.at(t) for t in range(1, 20001))
    assert total <= 0.05
    assert total == pytest.approx(0.05, rel=1e-4)
    assert all(sched.at(t + 1) < sched.at(t) for t in range(1, 50))


def test_kappa_schedule_rejects_bad_input():
    with pytest.raises(ValueError):
        ConfidenceSchedule(1.5)
    with pytest.raises(ValueError):
        kappa_at(1e-3, 0)


# -- binomial tail ----------------------------------------------------------

def test_binomial_tail_trivial_values():
    assert binomial_tail(7, 7, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert binomial_tail(2, 0, 0.5) == pytest.approx(0.25, rel=1e-15)


def test_binomial_tail_at_golden_size():
    assert binomial_tail(21403, 1999, 0.1) <= KAPPA_T1
    assert binomial_tail(21402, 1999, 0.1) > KAPPA_T1
    # incomplete-beta oracle
    assert binomial_tail(21403, 1999, 0.1) == pytest.approx(betainc(21403 - 1999, 2000, 0.9), rel=1e-10)


@given(st.integers(1, 3000), st.data(), st.floats(1e-3, 0.999))
def test_binomial_tail_matches_incomplete_beta(m, data, nu):
    k = data.draw(st.integers(0, m - 1))
    ref = betainc(m - k, k + 1, 1 - nu)
    ours = binomial_tail(m, k, nu)
    if ref > 1e-290:
        assert ours == pytest.approx(ref, rel=1e-10)


def test_binomial_tail_random_triples_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        m = int(rng.integers(1, 20000))
        k = int(rng.integers(0, m + 1))
        nu = float(rng.uniform(0.01, 0.99))
        ref = binom.cdf(k, m, nu)
        if ref > 1e-290:
            assert binomial_tail(m, k, nu) == pytest.approx(ref, rel=1e-10)


@given(st.integers(1, 500), st.integers(0, 499), st.floats(0.01, 0.99))
def test_binomial_tail_monotone(m, k, nu):
    k = min(k, m - 1)
    assert binomial_tail(m + 1, k, nu) <= binomial_tail(m, k, nu) * (1 + 1e-12)
    assert binomial_tail(m, k + 1, nu) >= binomial_tail(m, k, nu) * (1 - 1e-12)


def test_binomial_tail_huge_trial_count_is_finite():
    v = binomial_tail(10 ** 6, 10 ** 5 - 1, 0.1)
    assert 0.0 < v < 1.0


@pytest.mark.parametrize("args", [(3, 4, 0.5), (3, -1, 0.5), (3, 1, 0.0), (3, 1, 1.0)])
def test_binomial_tail_invalid(args):
    with pytest.raises(ValueError):
        binomial_tail(*args)


# -- classic sample size ----------------------------------------------------

def test_classic_golden_number():
    assert classic_sample_size(2000, 0.1, KAPPA_T1, 1) == 21403


def test_classic_trivial_and_closed_form():
    assert classic_sample_size(1, 0.5, 0.5) == 1
    assert classic_sample_size(1, 0.1, 1e-3) == 66
    assert classic_sample_size(1, 0.1, 1e-3) == math.ceil(math.log(1e-3) / math.log(0.9))


@given(st.integers(1, 60), st.floats(0.05, 0.5), st.floats(1e-4, 0.5))
def test_classic_is_minimal(d, nu, kappa_t):
    m = classic_sample_size(d, nu, kappa_t)
    ref = linear_scan(lambda n: binom.cdf(d - 1, n, nu) <= kappa_t)
    # a one-step disagreement is only allowed where the tail sits on kappa_t within rounding
    assert m == ref or (abs(m - ref) == 1
                        and math.isclose(binom.cdf(d - 1, min(m, ref), nu), kappa_t, rel_tol=1e-9))


def test_classic_exact_tie_counts_as_satisfied():
    # P(Bin(65, 1/2) <= 32) is exactly 1/2 by symmetry; float cdf rounds it just above
    assert classic_sample_size(33, 0.5, 0.5) == 65


def test_classic_trial_modes():
    as_written = classic_sample_size(20, 0.1, 1e-3, outputs=3)
    joint = classic_sample_size(20, 0.1, 1e-3, outputs=3, trials="joint")
    assert joint == classic_sample_size(20, 0.1, 1e-3)
    assert binomial_tail(3 * as_written, 19, 0.1) <= 1e-3 < binomial_tail(3 * (as_written - 1), 19, 0.1)
    with pytest.raises(ValueError):
        classic_sample_size(20, 0.1, 1e-3, trials="other")


# -- wait-and-judge ---------------------------------------------------------

def test_wj_two_term_hand_value():
    # kappa/3 (1 + 2 tau) = 2 tau  ->  tau = (kappa/3) / (2 - 2 kappa/3)
    expected = (0.1 / 3) / (2 - 0.2 / 3)
    assert wj_solve_tau(2, 1, 0.1) == pytest.approx(expected, abs=1e-11)
    assert wj_solve_tau(2, 1, 0.1) == pytest.approx(0.017241, abs=1e-6)


def test_wj_no_root_when_all_support():
    assert wj_solve_tau(5, 5, 0.1) == 0.0


def test_wj_reference_pair_is_certifiable():
    tau = wj_solve_tau(596, 31, KAPPA_T1)
    assert 0.9 <= tau < 1.0
    assert tau < wj_solve_tau(700, 31, KAPPA_T1)


@pytest.mark.parametrize("m, s, kt", [(2, 1, 0.1), (40, 3, 0.05), (200, 20, 1e-3), (596, 31, KAPPA_T1), (150, 0, 0.01)])
def test_wj_matches_high_precision_root(m, s, kt):
    assert wj_solve_tau(m, s, kt) == pytest.approx(mp_tau(m, s, kt), abs=1e-10)


@given(st.integers(2, 400), st.data(), st.floats(1e-5, 0.5))
def test_wj_residual_vanishes_at_root(m, data, kt):
    s = data.draw(st.integers(0, m - 1))
    tau = wj_solve_tau(m, s, kt)
    if 1e-6 < tau < 1 - 1e-9:
        assert abs(wj_residual(m, s, kt, tau)) <= 1e-9


@given(st.integers(5, 300), st.data(), st.floats(1e-4, 0.3))
def test_wj_monotone(m, data, kt):
    s = data.draw(st.integers(0, m - 2))
    assert wj_solve_tau(m, s + 1, kt) <= wj_solve_tau(m, s, kt) + 1e-12
    assert wj_solve_tau(m + 1, s, kt) >= wj_solve_tau(m, s, kt) - 1e-12


def test_wj_sample_size_scan_oracle():
    for s in (1, 3, 10):
        m = wj_sample_size_for(s, 0.2, 0.05)
        ref = linear_scan(lambda n: wj_solve_tau(n, s, 0.05) >= 0.8, start=s)
        assert m == ref


def test_wj_sample_size_examples():
    assert wj_solve_tau(wj_sample_size_for(1, 0.5, 0.5), 1, 0.5) >= 0.5
    m31 = wj_sample_size_for(31, 0.1, KAPPA_T1)
    assert m31 <= 21403 and wj_solve_tau(m31, 31, KAPPA_T1) >= 0.9
    assert wj_solve_tau(m31 - 1, 31, KAPPA_T1) < 0.9
    assert wj_sample_size_for(40, 0.1, KAPPA_T1) >= m31


# -- scalar sample size -----------------------------------------------------

def test_scalar_sizes():
    assert scalar_sample_size(0.1, KAPPA_T1, 0) == (71, 71)
    assert scalar_sample_size(0.5, 0.5, 0) == (1, 1)
    assert scalar_sample_size(0.1, KAPPA_T1, 1) == (94, 93)


@given(st.floats(0.01, 0.9), st.floats(1e-6, 0.9))
def test_scalar_closed_form_without_discards(nu, kt):
    m, p = scalar_sample_size(nu, kt, 0)
    closed = math.ceil(math.log(kt) / math.log(1 - nu))
    # the closed form is exact up to round-off at integer boundaries
    assert abs(m - closed) <= 1 and (1 - nu) ** m <= kt * (1 + 1e-12)
    assert p == m


@given(st.floats(0.05, 0.5), st.floats(1e-4, 0.5), st.integers(0, 6))
def test_scalar_size_scan_oracle(nu, kt, k):
    m, p = scalar_sample_size(nu, kt, k)
    assert m == linear_scan(lambda n: binom.cdf(k, n, nu) <= kt, start=k + 1) or math.isclose(
        binom.cdf(k, m - 1, nu), kt, rel_tol=1e-9)
    assert p == m - k


# -- certificate record ------------------------------------------------------

def test_certificate_roundtrip_and_invariants():
    c = Certificate(m=596, s=31, tau=wj_solve_tau(596, 31, KAPPA_T1), nu=0.1, kappa_t=KAPPA_T1,
                    method="wait_and_judge", rounds=3)
    assert Certificate.from_dict(c.to_dict()) == c
    with pytest.raises(ValueError):
        Certificate(m=3, s=4, tau=0.9, nu=0.1, kappa_t=0.1, method="classic")
    with pytest.raises(ValueError):
        Certificate(m=30, s=4, tau=0.5, nu=0.1, kappa_t=0.1, method="wait_and_judge")
