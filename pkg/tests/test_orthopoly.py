"""Certified recurrence coefficients and everything derived from them.

The independent oracles here avoid the production code paths: moment-space
orthogonality sums, an LU determinant of the raw moment matrix via mpmath,
and the closed-form Hermite data at a = 0.
"""

import mpmath as mp
import pytest

from gue_gap_lab import (
    DomainError,
    PrecisionExhaustedError,
    PrecisionPolicy,
    build_recurrence_table,
    edge_eval,
    hankel_det,
    hermite_beta_exact,
    hermite_norm_exact,
    log_hankel_det,
    poly_eval,
    poly_values,
    subleading_coeff,
)
from gue_gap_lab.weight import GapWeight, moment


def monic_coefficient_rows(table, n_top, bits):
    """Coefficient vectors of P_0..P_n_top from the three-term recurrence."""
    rows = [[mp.mpf(1)], [mp.mpf(0), mp.mpf(1)]]
    with mp.workprec(bits):
        for j in range(1, n_top):
            prev, cur = rows[j - 1], rows[j]
            nxt = [mp.mpf(0)] + list(cur)
            for i, c in enumerate(prev):
                nxt[i] -= table.beta[j].value * c
            rows.append(nxt)
    return rows


class TestHermiteLimit:
    def test_matches_closed_forms_at_zero(self):
        table = build_recurrence_table("0", 12)
        with mp.workprec(table.working_bits):
            for j in range(table.n_max + 1):
                b_ref = hermite_beta_exact(j, table.working_bits).value
                h_ref = hermite_norm_exact(j, table.working_bits).value
                assert abs(table.h[j].value - h_ref) / h_ref < mp.mpf(10) ** -150
                if j >= 1:
                    assert abs(table.beta[j].value - b_ref) / b_ref < mp.mpf(10) ** -150

    def test_beta0_is_zero_by_convention(self):
        table = build_recurrence_table("0.6", 3)
        assert table.beta[0].value == 0


class TestCertification:
    def test_default_policy_meets_target(self, table_a1, policy):
        assert table_a1.certified_digits >= policy.target_certified_digits
        assert table_a1.working_bits >= policy.working_bits(table_a1.n_max)

    def test_positive_coefficients(self, table_a1):
        for j in range(1, table_a1.n_max + 1):
            assert table_a1.beta[j].value > 0
        for j in range(table_a1.n_max + 1):
            assert table_a1.h[j].value > 0

    def test_starved_policy_escalates_and_still_certifies(self):
        starved = PrecisionPolicy(base_bits=64, bits_per_n=1,
                                  target_certified_digits=40)
        table = build_recurrence_table("1", 12, starved)
        assert table.escalations >= 1
        assert table.certified_digits >= 40

    def test_unreachable_target_raises(self):
        impossible = PrecisionPolicy(base_bits=64, bits_per_n=0,
                                     target_certified_digits=40, max_bits=128)
        with pytest.raises(PrecisionExhaustedError):
            build_recurrence_table("1", 12, impossible)

    def test_negative_a_rejected(self):
        with pytest.raises(DomainError):
            build_recurrence_table("-1", 4)


class TestOrthogonality:
    def test_moment_space_orthogonality(self):
        # <P_n, x^k> = sum_j c_j mu_{j+k}: zero for k < n, h_n at k = n
        table = build_recurrence_table("0.7", 6)
        bits = table.working_bits
        w = GapWeight.from_str("0.7", bits)
        rows = monic_coefficient_rows(table, 6, bits)
        with mp.workprec(bits):
            for n in range(1, 7):
                coeffs = rows[n]
                h_n = table.h[n].value
                for k in range(n + 1):
                    inner = mp.mpf(0)
                    scale = h_n
                    for j, c in enumerate(coeffs):
                        if c != 0:
                            term = c * moment(j + k, w).value
                            inner += term
                            scale = max(scale, abs(term))
                    if k < n:
                        assert abs(inner) / scale < mp.mpf(10) ** -130
                    else:
                        assert abs(inner - h_n) / h_n < mp.mpf(10) ** -130

    def test_subleading_matches_coefficient_expansion(self):
        table = build_recurrence_table("0.7", 6)
        rows = monic_coefficient_rows(table, 6, table.working_bits)
        with mp.workprec(table.working_bits):
            for n in range(2, 7):
                direct = rows[n][n - 2]
                p_n = subleading_coeff(table, n).value
                assert abs(direct - p_n) / abs(p_n) < mp.mpf(10) ** -140


class TestHankelDeterminant:
    def test_against_lu_of_moment_matrix(self):
        # independent route: det of the raw (mu_{i+j}) matrix via mpmath LU
        table = build_recurrence_table("0.7", 5)
        bits = table.working_bits
        w = GapWeight.from_str("0.7", bits)
        for n in (2, 3, 5):
            with mp.workprec(bits):
                M = mp.matrix(n, n)
                for i in range(n):
                    for j in range(n):
                        M[i, j] = moment(i + j, w).value
                ref = mp.det(M)
                got = hankel_det(table, n).value
                assert abs(got - ref) / abs(ref) < mp.mpf(10) ** -120

    def test_log_route_consistent(self, table_a1):
        with mp.workprec(table_a1.working_bits):
            for n in (1, 4, 9):
                lhs = log_hankel_det(table_a1, n).value
                rhs = mp.log(hankel_det(table_a1, n).value)
                assert abs(lhs - rhs) < mp.mpf(10) ** -140


class TestEdgeValues:
    def test_forward_recurrence_consistency(self, table_a1):
        vals = poly_values(table_a1, 5, "0.37")
        with mp.workprec(table_a1.working_bits):
            x = mp.mpf("0.37")
            for j in range(1, 5):
                res = vals[j + 1].value - (x * vals[j].value
                                           - table_a1.beta[j].value * vals[j - 1].value)
                assert abs(res) == 0

    def test_edge_signs_follow_period_four_pattern(self, table_a1):
        # at a = 1: P_n(a) signs go +, +, -, -, +, +, -, - ...
        signs = []
        for n in range(9):
            signs.append(1 if edge_eval(table_a1, n).Pn_at_a.value > 0 else -1)
        expected = [1, 1, -1, -1, 1, 1, -1, -1, 1]
        assert signs == expected

    def test_poly_eval_agrees_with_poly_values(self, table_a1):
        assert poly_eval(table_a1, 7, "1.9").value == poly_values(table_a1, 7, "1.9")[7].value

    def test_degree_bounds(self, table_a1):
        with pytest.raises(DomainError):
            poly_eval(table_a1, table_a1.n_max + 1, "1")
        with pytest.raises(DomainError):
            subleading_coeff(table_a1, -1)
