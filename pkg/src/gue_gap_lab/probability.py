"""Gap probabilities for the finite-n Gaussian unitary ensemble.

P(n, a) is the probability that no eigenvalue of an n x n GUE matrix lies
in (-a, a).  Two independent routes compute it:

* hankel route: P(n, a) = D_n(a) / D_n(0), the ratio of moment
  determinants of the gap weight and the plain Hermite weight, evaluated
  as prod_{j<n} h_j(a) / h_j(0) with the closed form
  h_j(0) = (j!/2^j) sqrt(pi);

* fredholm route: P(n, a) = det(I - G) where G is the n x n matrix of
  overlaps of the first n orthonormal Hermite functions over (-a, a),
  integrated by arbitrary-precision Gauss-Legendre quadrature and reduced
  by an LU factorization with symmetric pivoting.

Agreement of the two routes is the package's strongest end-to-end check,
since they share no code beyond the scalar kernel.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import mpmath as mp

from .exceptions import DomainError, QuadratureConvergenceError
from .orthopoly import RecurrenceTable, build_recurrence_table, hermite_norm_exact
from .precision import GUARD_BITS, PrecisionPolicy, Real, as_mpf, pi_const
from .report import ResidualReport, make_check

ORACLE_TOL = 1e-12
ANCHOR_TOL = 1e-30
QUAD_CONVERGENCE_TOL = 1e-25

_GL_LOCK = threading.Lock()
_GL_CACHE: dict[tuple[int, int], tuple[tuple[mp.mpf, ...], tuple[mp.mpf, ...]]] = {}


def default_quad_order(n: int) -> int:
    """Quadrature order used for the n x n overlap matrix."""
    return 40 + 4 * n


def gauss_legendre_rule(order: int, bits: int):
    """Nodes and weights of the Gauss-Legendre rule on (-1, 1).

    Newton iteration on the degree-``order`` Legendre polynomial from
    Chebyshev initial guesses; cached per (order, bits).  Nodes come in
    exact +- pairs so odd integrands cancel identically.
    """
    if order < 1:
        raise DomainError(f"quadrature order must be >= 1, got {order}")
    key = (order, bits)
    with _GL_LOCK:
        hit = _GL_CACHE.get(key)
    if hit is not None:
        return hit

    with mp.workprec(bits + GUARD_BITS):
        tol = mp.mpf(2) ** (-(bits + GUARD_BITS // 2))
        pos_nodes = []
        pos_weights = []
        for k in range(1, order // 2 + 1):
            # k-th positive root, counted from the largest
            x = mp.cos(pi_const(bits + GUARD_BITS) * (4 * k - 1) / (4 * order + 2))
            for _ in range(200):
                p_prev, p = mp.mpf(1), x
                for j in range(1, order):
                    p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
                dp = order * (x * p - p_prev) / (x * x - 1)
                dx = p / dp
                x -= dx
                if abs(dx) < tol:
                    break
            p_prev, p = mp.mpf(1), x
            for j in range(1, order):
                p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
            dp = order * (x * p - p_prev) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            pos_nodes.append(x)
            pos_weights.append(w)
        nodes = [-x for x in pos_nodes] + (
            [mp.mpf(0)] if order % 2 == 1 else []
        ) + list(reversed(pos_nodes))
        weights = list(pos_weights)
        if order % 2 == 1:
            x = mp.mpf(0)
            p_prev, p = mp.mpf(1), x
            for j in range(1, order):
                p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
            dp = order * (x * p - p_prev) / (x * x - 1)
            weights.append(2 / (dp * dp))
        weights += list(reversed(pos_weights))
        with mp.workprec(bits):
            result = (
                tuple(+x for x in nodes),
                tuple(+w for w in weights),
            )
    with _GL_LOCK:
        _GL_CACHE[key] = result
    return result


def hermite_function_values(count: int, x: mp.mpf, bits: int) -> list[mp.mpf]:
    """[phi_0(x), ..., phi_{count-1}(x)] for the orthonormal Hermite
    functions phi_l(x) = (2^l l! sqrt(pi))^{-1/2} H_l(x) e^{-x^2/2}."""
    with mp.workprec(bits):
        phi0 = mp.exp(-x * x / 2) / mp.sqrt(mp.sqrt(pi_const(bits)))
        vals = [phi0]
        if count > 1:
            vals.append(mp.sqrt(mp.mpf(2)) * x * phi0)
        for l in range(1, count - 1):
            nxt = (
                mp.sqrt(mp.mpf(2) / (l + 1)) * x * vals[l]
                - mp.sqrt(mp.mpf(l) / (l + 1)) * vals[l - 1]
            )
            vals.append(nxt)
        return vals


def overlap_matrix(n: int, a, order: int, bits: int) -> list[list[mp.mpf]]:
    """G[l][m] = integral_{-a}^{a} phi_l phi_m dx for l, m < n.

    Entries with l + m odd vanish by parity, and the symmetric node pairs
    of the rule make that cancellation exact in floating point.
    """
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    av = as_mpf(a, bits)
    if av < 0:
        raise DomainError("gap half-width must be >= 0")
    nodes, weights = gauss_legendre_rule(order, bits)
    with mp.workprec(bits):
        phi_rows = [hermite_function_values(n, av * t, bits) for t in nodes]
        G = [[mp.mpf(0)] * n for _ in range(n)]
        for l in range(n):
            for m in range(l, n):
                acc = mp.fsum(
                    w * row[l] * row[m] for w, row in zip(weights, phi_rows)
                )
                v = av * acc
                G[l][m] = v
                G[m][l] = v
        return G


def det_identity_minus(G: list[list[mp.mpf]], bits: int) -> mp.mpf:
    """det(I - G) by LU with symmetric (diagonal) pivoting.

    Row and column swaps always come in pairs, so no sign bookkeeping is
    needed; the determinant is the product of the pivots.
    """
    n = len(G)
    with mp.workprec(bits):
        M = [[(mp.mpf(1) if i == j else mp.mpf(0)) - G[i][j] for j in range(n)] for i in range(n)]
        det = mp.mpf(1)
        for k in range(n):
            piv = max(range(k, n), key=lambda i: abs(M[i][i]))
            if piv != k:
                M[k], M[piv] = M[piv], M[k]
                for row in M:
                    row[k], row[piv] = row[piv], row[k]
            pivot = M[k][k]
            det *= pivot
            if pivot == 0:
                return mp.mpf(0)
            for i in range(k + 1, n):
                f = M[i][k] / pivot
                if f != 0:
                    Mi, Mk = M[i], M[k]
                    for j in range(k + 1, n):
                        Mi[j] -= f * Mk[j]
        return det


def gap_probability_hankel(
    n: int,
    a=None,
    policy: PrecisionPolicy | None = None,
    table: RecurrenceTable | None = None,
) -> Real:
    """P(n, a) as prod_{j<n} h_j(a) / h_j(0).

    Either pass a prebuilt certified table (preferred when one exists) or
    a value for ``a``.  Each factor lies in (0, 1], so the running product
    is monotone and free of overflow.
    """
    if n < 0:
        raise DomainError(f"matrix size must be >= 0, got {n}")
    if table is None:
        if a is None:
            raise DomainError("need either a or a prebuilt table")
        table = build_recurrence_table(a, max(n - 1, 0), policy)
    if table.n_max < n - 1:
        raise DomainError(f"table covers degrees 0..{table.n_max}, need {n - 1}")
    bits = table.working_bits
    with mp.workprec(bits):
        prob = mp.mpf(1)
        for j in range(n):
            prob *= table.h[j].value / hermite_norm_exact(j, bits).value
    return Real(prob, bits)


def gap_probability_fredholm(
    n: int,
    a,
    prec_bits: int = 512,
    quad_order: int | None = None,
    *,
    convergence_tol: float = QUAD_CONVERGENCE_TOL,
) -> Real:
    """P(n, a) as det(I - G) with G the Hermite-function overlap matrix.

    The determinant is computed at the requested quadrature order and at
    twice that order; disagreement beyond ``convergence_tol`` (relative)
    raises QuadratureConvergenceError, otherwise the doubled-order value is
    returned.
    """
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    order = quad_order if quad_order is not None else default_quad_order(n)
    bits = prec_bits + GUARD_BITS
    det_lo = det_identity_minus(overlap_matrix(n, a, order, bits), bits)
    det_hi = det_identity_minus(overlap_matrix(n, a, 2 * order, bits), bits)
    with mp.workprec(bits):
        scale = max(abs(det_lo), abs(det_hi))
        if scale > 0:
            rel = abs(det_hi - det_lo) / scale
            if not rel < convergence_tol:
                raise QuadratureConvergenceError(
                    f"orders {order} and {2 * order} disagree by {mp.nstr(rel, 5)} "
                    f"(tolerance {convergence_tol}) at n={n}"
                )
    return Real(as_mpf(det_hi, prec_bits), prec_bits)


@dataclass(frozen=True)
class ProbabilityRecord:
    """P(n, a) by both routes, with their relative discrepancy."""

    n: int
    a: Real
    prob_hankel: Real
    prob_fredholm: Real
    rel_discrepancy: mp.mpf


def probability_record(
    n: int,
    a,
    policy: PrecisionPolicy | None = None,
    quad_order: int | None = None,
    table: RecurrenceTable | None = None,
) -> ProbabilityRecord:
    """Compute both routes and their relative discrepancy |h - f| / h."""
    if policy is None:
        policy = PrecisionPolicy()
    p_h = gap_probability_hankel(n, a, policy, table=table)
    bits = p_h.precision_bits
    a_val = a if a is not None else table.a
    p_f = gap_probability_fredholm(n, a_val, prec_bits=bits, quad_order=quad_order)
    with mp.workprec(bits):
        rel = abs(p_h.value - p_f.value) / p_h.value
        av = as_mpf(a_val, bits)
    return ProbabilityRecord(
        n=n, a=Real(av, bits), prob_hankel=p_h, prob_fredholm=p_f, rel_discrepancy=rel
    )


def residual_oracle(
    n: int,
    a,
    policy: PrecisionPolicy | None = None,
    *,
    tolerance: float = ORACLE_TOL,
    table: RecurrenceTable | None = None,
) -> ResidualReport:
    """Route-agreement residual |P_hankel - P_fredholm| / P_hankel."""
    rec = probability_record(n, a, policy, table=table)
    bits = rec.prob_hankel.precision_bits
    rep = ResidualReport(a=mp.nstr(rec.a.value, 12), n=n)
    with mp.workprec(bits):
        terms = [rec.prob_hankel.value, -rec.prob_fredholm.value]
    rep.add(make_check("route_agreement", n, terms, tolerance, bits))
    return rep
