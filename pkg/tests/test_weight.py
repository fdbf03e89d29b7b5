"""Moments of the gap-deformed Gaussian weight and the closed-form seeds."""

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gue_gap_lab import DomainError, GapWeight, Real, moment, seed_R0, seed_r1, zeroth_moment

R0_AT_1 = "2.63896751423479126047150115207156112883768656"
TWO_OVER_SQRT_PI = "1.12837916709551257389615890312154517168810126"


def make_weight(a_text, bits=512):
    return GapWeight.from_str(a_text, bits)


def test_odd_moments_vanish_exactly():
    w = make_weight("0.8")
    for k in (1, 3, 5, 11):
        assert moment(k, w).value == 0


def test_even_moments_match_incomplete_gamma_oracle():
    # mu_k = Gamma((k+1)/2, a^2) for even k, checked against mpmath
    for a_text in ("0.3", "1", "2.5"):
        w = make_weight(a_text)
        for k in (0, 2, 4, 8):
            m = moment(k, w)
            with mp.workprec(560):
                av = mp.mpf(a_text)
                ref = mp.gammainc(mp.mpf(k + 1) / 2, av * av, mp.inf)
                rel = abs(m.value - ref) / ref
            assert rel < mp.mpf(10) ** -140


def test_zeroth_moment_is_sqrt_pi_erfc():
    w = make_weight("1.3")
    with mp.workprec(560):
        ref = mp.sqrt(mp.pi) * mp.erfc(mp.mpf("1.3"))
        rel = abs(zeroth_moment(w).value - ref) / ref
    assert rel < mp.mpf(10) ** -140


def test_moments_at_zero_reduce_to_gaussian():
    w = make_weight("0")
    with mp.workprec(560):
        assert abs(zeroth_moment(w).value - mp.sqrt(mp.pi)) < mp.mpf(10) ** -140
        assert abs(moment(2, w).value - mp.sqrt(mp.pi) / 2) < mp.mpf(10) ** -140


def test_seed_R0_frozen_value_at_one():
    w = make_weight("1")
    with mp.workprec(512):
        rel = abs(seed_R0(w).value - mp.mpf(R0_AT_1)) / mp.mpf(R0_AT_1)
    assert rel < mp.mpf(10) ** -44


def test_seed_R0_at_zero_is_two_over_sqrt_pi():
    w = make_weight("0")
    with mp.workprec(512):
        rel = abs(seed_R0(w).value - mp.mpf(TWO_OVER_SQRT_PI)) / mp.mpf(TWO_OVER_SQRT_PI)
    assert rel < mp.mpf(10) ** -44


def test_seed_r1_is_a_times_R0():
    for a_text in ("0.2", "1", "3"):
        w = make_weight(a_text)
        with mp.workprec(512):
            av = mp.mpf(a_text)
            diff = abs(seed_r1(w).value - av * seed_R0(w).value)
            assert diff / abs(seed_r1(w).value) < mp.mpf(10) ** -140


def test_negative_half_width_rejected():
    with pytest.raises(DomainError):
        make_weight("-0.5")


def test_w0_at_edge_is_exp_minus_a_squared():
    w = make_weight("0.9")
    with mp.workprec(560):
        ref = mp.exp(-mp.mpf("0.9") ** 2)
        rel = abs(w.w0_at_edge().value - ref) / ref
    assert rel < mp.mpf(10) ** -140


@given(st.integers(min_value=0, max_value=6).map(lambda k: 2 * k))
@settings(max_examples=10, deadline=None)
def test_even_moments_decrease_as_gap_widens(k):
    # removing more of the axis can only shrink the integral
    w_narrow = make_weight("0.4", 320)
    w_wide = make_weight("1.7", 320)
    assert moment(k, w_wide).value < moment(k, w_narrow).value


@given(st.floats(min_value=0.05, max_value=3.0))
@settings(max_examples=20, deadline=None)
def test_moment_ordering_in_k(a):
    # mu_{k+2} > a^2 mu_k since x^2 > a^2 on the support
    w = GapWeight(Real(mp.mpf(a), 320), 320)
    with mp.workprec(320):
        av = mp.mpf(a)
        for k in (0, 2, 4):
            assert moment(k + 2, w).value > av * av * moment(k, w).value