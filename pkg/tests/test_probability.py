"""Gap probability routes: quadrature, determinants, anchors, agreement."""

import mpmath as mp
import pytest

from gue_gap_lab import DomainError, PrecisionPolicy, QuadratureConvergenceError
from gue_gap_lab.probability import (
    default_quad_order,
    det_identity_minus,
    gap_probability_fredholm,
    gap_probability_hankel,
    gauss_legendre_rule,
    hermite_function_values,
    overlap_matrix,
    probability_record,
    residual_oracle,
)

ERFC_1 = "0.157299207050285130658779364917390740703933002"


class TestQuadrature:
    def test_weights_sum_to_two(self):
        nodes, weights = gauss_legendre_rule(24, 512)
        with mp.workprec(512):
            total = mp.fsum(weights)
            assert abs(total - 2) < mp.mpf(10) ** -140

    def test_nodes_antisymmetric(self):
        nodes, _ = gauss_legendre_rule(24, 512)
        with mp.workprec(512):
            for k in range(len(nodes)):
                assert abs(nodes[k] + nodes[-1 - k]) < mp.mpf(10) ** -140

    def test_polynomial_exactness(self):
        # an order-m rule integrates monomials up to degree 2m - 1
        order = 12
        nodes, weights = gauss_legendre_rule(order, 512)
        with mp.workprec(512):
            for k in (0, 2, 10, 22):
                got = mp.fsum(w * x ** k for x, w in zip(nodes, weights))
                exact = mp.mpf(2) / (k + 1)
                assert abs(got - exact) / exact < mp.mpf(10) ** -130
            # one degree past the guarantee must fail clearly
            got = mp.fsum(w * x ** 24 for x, w in zip(nodes, weights))
            exact = mp.mpf(2) / 25
            assert abs(got - exact) / exact > mp.mpf(10) ** -10

    def test_rule_is_cached(self):
        r1 = gauss_legendre_rule(16, 256)
        r2 = gauss_legendre_rule(16, 256)
        assert r1 is r2

    def test_order_grows_with_n(self):
        assert default_quad_order(10) > default_quad_order(1)


class TestHermiteFunctions:
    def test_first_two_against_closed_forms(self):
        bits = 512
        with mp.workprec(bits):
            x = mp.mpf("0.7")
            vals = hermite_function_values(3, x, bits)
            phi0 = mp.pi ** mp.mpf("-0.25") * mp.exp(-x * x / 2)
            phi1 = mp.sqrt(2) * x * phi0
            assert abs(vals[0] - phi0) / phi0 < mp.mpf(10) ** -140
            assert abs(vals[1] - phi1) / phi1 < mp.mpf(10) ** -140

    def test_orthonormality_via_quadrature(self):
        # integrate phi_i phi_j over [-12, 12]: the tail beyond is < 1e-31,
        # and a 256-node rule resolves the Gaussian to far below that
        bits = 448
        half = 12
        nodes, weights = gauss_legendre_rule(256, bits)
        with mp.workprec(bits):
            acc = [[mp.mpf(0)] * 3 for _ in range(3)]
            for node, w in zip(nodes, weights):
                x = node * half
                vals = hermite_function_values(3, x, bits)
                for i in range(3):
                    for j in range(3):
                        acc[i][j] += w * half * vals[i] * vals[j]
            for i in range(3):
                for j in range(3):
                    target = 1 if i == j else 0
                    assert abs(acc[i][j] - target) < mp.mpf(10) ** -25


class TestDeterminant:
    def test_against_mpmath_lu(self):
        bits = 512
        G = overlap_matrix(4, "0.9", 40, bits)
        with mp.workprec(bits):
            M = mp.matrix(4, 4)
            for i in range(4):
                for j in range(4):
                    M[i, j] = G[i][j]
            ref = mp.det(mp.eye(4) - M)
            got = det_identity_minus(G, bits)
            assert abs(got - ref) / abs(ref) < mp.mpf(10) ** -120

    def test_overlap_matrix_symmetric(self):
        bits = 384
        G = overlap_matrix(5, "1.1", 44, bits)
        with mp.workprec(bits):
            for i in range(5):
                for j in range(5):
                    assert abs(G[i][j] - G[j][i]) < mp.mpf(10) ** -100


class TestRoutes:
    def test_erfc_anchor(self):
        for a_text in ("0.1", "0.5", "1", "2"):
            p = gap_probability_hankel(1, a_text)
            with mp.workprec(p.precision_bits):
                ref = mp.erfc(mp.mpf(a_text))
                assert abs(p.value - ref) / ref < mp.mpf(10) ** -30

    def test_erfc_anchor_frozen_digits(self):
        p = gap_probability_hankel(1, "1")
        with mp.workprec(512):
            assert abs(p.value - mp.mpf(ERFC_1)) / mp.mpf(ERFC_1) < mp.mpf(10) ** -44

    def test_probability_in_unit_interval_and_decreasing_in_n(self):
        from gue_gap_lab import build_recurrence_table

        table = build_recurrence_table("0.8", 7)
        prev = mp.mpf(1)
        for n in range(1, 8):
            p = gap_probability_hankel(n, table=table)
            assert 0 < p.value < 1
            assert p.value < prev
            prev = p.value

    def test_routes_agree(self):
        for n, a_text in ((2, "0.5"), (4, "1"), (6, "1.5")):
            rec = probability_record(n, a_text)
            assert rec.rel_discrepancy < 1e-25

    def test_oracle_report(self):
        rep = residual_oracle(3, "0.8")
        assert rep.all_pass
        assert rep.worst < 1e-12

    def test_fredholm_convergence_guard(self):
        with pytest.raises(QuadratureConvergenceError):
            gap_probability_fredholm(4, "1", prec_bits=64, quad_order=6,
                                     convergence_tol=1e-60)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gap_probability_hankel(-1, "1")
        with pytest.raises(DomainError):
            gap_probability_fredholm(0, "1")
        with pytest.raises(DomainError):
            gap_probability_hankel(3, None)

    def test_zero_gap_is_certain(self):
        p = gap_probability_hankel(5, "0")
        with mp.workprec(p.precision_bits):
            assert abs(p.value - 1) < mp.mpf(10) ** -150

    def test_table_reuse_matches_fresh_build(self):
        from gue_gap_lab import build_recurrence_table

        table = build_recurrence_table("1.2", 6)
        via_table = gap_probability_hankel(4, table=table)
        fresh = gap_probability_hankel(4, "1.2")
        with mp.workprec(min(via_table.precision_bits, fresh.precision_bits)):
            rel = abs(via_table.value - fresh.value) / fresh.value
            assert rel < mp.mpf(10) ** -100
