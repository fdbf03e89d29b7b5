"""Monic orthogonal polynomials for the gap weight, from exact moments.

The three-term recurrence P_{j+1}(x) = x P_j(x) - beta_j P_{j-1}(x) (no
x-coefficient: the weight is even) is recovered from power moments by the
Chebyshev algorithm on mixed moments S_k[l] = integral P_k(x) x^l w(x) dx:

    S_k[l]  = S_{k-1}[l+1] - beta_{k-1} S_{k-2}[l]
    h_k     = S_k[k]
    beta_k  = h_k / h_{k-1}

That map is notoriously ill conditioned, which is the point of running it
in arbitrary precision: a build is accepted only after two passes at
different precisions agree to the policy's target number of digits, and the
working precision escalates until they do or a ceiling is hit.

Conventions: beta_0 = 0 and P_{-1} = 0, so h_0 = mu_0 and p(0) = p(1) = 0
for the subleading coefficient p(n) = -(beta_0 + ... + beta_{n-1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath as mp

from .exceptions import DomainError, IllConditioningError, PrecisionExhaustedError
from .precision import GUARD_BITS, PrecisionPolicy, Real, as_mpf, sqrt_pi_const
from .weight import GapWeight, moment

_LOG10_2 = 0.30102999566398120


@dataclass(frozen=True)
class RecurrenceTable:
    """Certified recurrence data for one gap half-width.

    ``beta[j]`` and ``h[j]`` are available for j = 0..n_max, computed at
    ``working_bits`` and certified to ``certified_digits`` decimal digits by
    cross-precision agreement.  ``escalations`` counts how many times the
    precision had to be raised beyond the policy's starting level.
    """

    a: Real
    n_max: int
    beta: tuple[Real, ...]
    h: tuple[Real, ...]
    certified_digits: int
    working_bits: int
    escalations: int = 0

    def __post_init__(self):
        if len(self.beta) != self.n_max + 1 or len(self.h) != self.n_max + 1:
            raise DomainError("beta and h must both have n_max + 1 entries")


class _NonPositiveNorm(Exception):
    """Internal: a squared norm came out <= 0 at the current precision."""

    def __init__(self, index: int):
        super().__init__(f"h_{index} <= 0")
        self.index = index


def _chebyshev_pass(a_value: mp.mpf, n_max: int, bits: int):
    """One full moment-to-recurrence pass at a fixed precision.

    Returns (beta, h) as lists of mpf.  Raises _NonPositiveNorm if the
    precision was insufficient to keep the norms positive.
    """
    w = GapWeight(Real(as_mpf(a_value, bits), bits), bits)
    mu = [moment(k, w).value for k in range(2 * n_max + 1)]
    with mp.workprec(bits):
        zero = mp.mpf(0)
        beta = [zero]
        h = [mu[0]]
        if not h[0] > 0:
            raise _NonPositiveNorm(0)
        row_km2: list[mp.mpf] = []
        row_km1 = mu
        for k in range(1, n_max + 1):
            width = 2 * (n_max - k) + 1
            if k == 1:
                row = [row_km1[i + 2] for i in range(width)]
            else:
                b = beta[k - 1]
                row = [row_km1[i + 2] - b * row_km2[i + 2] for i in range(width)]
            hk = row[0]
            if not hk > 0:
                raise _NonPositiveNorm(k)
            beta.append(hk / h[k - 1])
            h.append(hk)
            row_km2 = row_km1
            row_km1 = row
    return beta, h


def _agreement_digits(x: mp.mpf, y: mp.mpf, cap: int) -> int:
    """Decimal digits on which two estimates of the same quantity agree."""
    if x == y:
        return cap
    with mp.workprec(64):
        den = max(abs(x), abs(y))
        if den == 0:
            return cap
        rel = abs(x - y) / den
        if rel >= 1:
            return 0
        return min(cap, int(mp.floor(-mp.log10(rel))))


def _certified_digits(lo, hi, lo_bits: int) -> int:
    """Minimum cross-precision agreement over all recurrence coefficients."""
    beta_lo, h_lo = lo
    beta_hi, h_hi = hi
    cap = int(lo_bits * _LOG10_2)
    worst = cap
    for j in range(1, len(beta_lo)):
        worst = min(worst, _agreement_digits(beta_lo[j], beta_hi[j], cap))
    for j in range(len(h_lo)):
        worst = min(worst, _agreement_digits(h_lo[j], h_hi[j], cap))
    return worst


def build_recurrence_table(a, n_max: int, policy: PrecisionPolicy | None = None) -> RecurrenceTable:
    """Build beta_j, h_j for j <= n_max with certified accuracy.

    ``a`` may be a Real, an mpf, an int, or a decimal string (preferred for
    CLI input: the string parses exactly once at the ceiling precision, so
    every pass sees the same real number).

    The certification loop computes the table at W and roughly 2W bits,
    takes the worst cross-precision agreement over all coefficients as the
    certified digit count, and escalates W until the policy target is met.
    Raises PrecisionExhaustedError when the ceiling is reached first, and
    IllConditioningError if norms cannot even be kept positive there.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if policy is None:
        policy = PrecisionPolicy()
    a_value = as_mpf(a, policy.max_bits + GUARD_BITS)
    if a_value < 0:
        raise DomainError(f"gap half-width must be >= 0, got {a_value}")

    bits = min(policy.working_bits(n_max), policy.max_bits)
    escalations = 0
    lo = None
    lo_ok = False
    best_certified = 0
    while True:
        if lo is None:
            try:
                lo = _chebyshev_pass(a_value, n_max, bits)
                lo_ok = True
            except _NonPositiveNorm as exc:
                if bits >= policy.max_bits:
                    raise IllConditioningError(
                        f"norm h_{exc.index} not positive at ceiling precision "
                        f"{policy.max_bits} bits (a={mp.nstr(a_value, 8)}, n_max={n_max})"
                    ) from exc
                lo = None
                lo_ok = False

        if bits >= policy.max_bits and not lo_ok:
            raise IllConditioningError(
                f"norms not positive at ceiling precision {policy.max_bits} bits"
            )

        hi_bits = min(policy.escalate(bits), policy.max_bits)
        if hi_bits <= bits:
            # Starting precision already at the ceiling: nothing to compare
            # against, so the build cannot be certified.
            raise PrecisionExhaustedError(
                f"cannot certify: starting precision {bits} bits already at ceiling",
                certified_digits=best_certified,
                ceiling_bits=policy.max_bits,
            )
        try:
            hi = _chebyshev_pass(a_value, n_max, hi_bits)
            hi_ok = True
        except _NonPositiveNorm as exc:
            if hi_bits >= policy.max_bits:
                raise IllConditioningError(
                    f"norm h_{exc.index} not positive at ceiling precision "
                    f"{policy.max_bits} bits (a={mp.nstr(a_value, 8)}, n_max={n_max})"
                ) from exc
            hi = None
            hi_ok = False

        if lo_ok and hi_ok:
            certified = _certified_digits(lo, hi, bits)
            best_certified = max(best_certified, certified)
            if certified >= policy.target_certified_digits:
                beta_hi, h_hi = hi
                return RecurrenceTable(
                    a=Real(as_mpf(a_value, hi_bits), hi_bits),
                    n_max=n_max,
                    beta=tuple(Real(b, hi_bits) for b in beta_hi),
                    h=tuple(Real(v, hi_bits) for v in h_hi),
                    certified_digits=certified,
                    working_bits=hi_bits,
                    escalations=escalations,
                )

        if hi_bits >= policy.max_bits:
            raise PrecisionExhaustedError(
                f"certified only {best_certified} digits of "
                f"{policy.target_certified_digits} at ceiling {policy.max_bits} bits",
                certified_digits=best_certified,
                ceiling_bits=policy.max_bits,
            )
        # Reuse the high pass as the next low pass.
        bits = hi_bits
        lo = hi
        lo_ok = hi_ok
        escalations += 1


def poly_values(table: RecurrenceTable, n: int, x) -> list[Real]:
    """[P_0(x), ..., P_n(x)] by the forward recurrence at working precision."""
    if not 0 <= n <= table.n_max:
        raise DomainError(f"degree {n} outside table range 0..{table.n_max}")
    bits = table.working_bits
    xv = as_mpf(x, bits)
    with mp.workprec(bits):
        vals = [mp.mpf(1)]
        if n >= 1:
            vals.append(xv)
        for j in range(1, n):
            vals.append(xv * vals[j] - table.beta[j].value * vals[j - 1])
    return [Real(v, bits) for v in vals]


def poly_eval(table: RecurrenceTable, n: int, x) -> Real:
    """P_n(x) by the forward recurrence."""
    return poly_values(table, n, x)[-1]


@dataclass(frozen=True)
class EdgeEval:
    """Values of consecutive polynomials at the gap edge x = a."""

    n: int
    Pn_at_a: Real
    Pnm1_at_a: Real


def edge_eval(table: RecurrenceTable, n: int) -> EdgeEval:
    """(P_n(a), P_{n-1}(a)); P_{-1} = 0 by convention for n = 0."""
    vals = poly_values(table, n, table.a)
    if n == 0:
        zero = Real(as_mpf(0, table.working_bits), table.working_bits)
        return EdgeEval(0, vals[0], zero)
    return EdgeEval(n, vals[n], vals[n - 1])


def subleading_coeff(table: RecurrenceTable, n: int) -> Real:
    """p(n) = -(beta_0 + ... + beta_{n-1}), the x^{n-2} coefficient of P_n."""
    if not 0 <= n <= table.n_max:
        raise DomainError(f"degree {n} outside table range 0..{table.n_max}")
    bits = table.working_bits
    with mp.workprec(bits):
        total = mp.mpf(0)
        for j in range(n):
            total += table.beta[j].value
        return Real(-total, bits)


def hankel_det(table: RecurrenceTable, n: int) -> Real:
    """D_n = h_0 h_1 ... h_{n-1}, the n x n moment determinant."""
    if not 0 <= n <= table.n_max + 1:
        raise DomainError(f"size {n} outside table range 0..{table.n_max + 1}")
    bits = table.working_bits
    with mp.workprec(bits):
        prod = mp.mpf(1)
        for j in range(n):
            prod *= table.h[j].value
        return Real(prod, bits)


def log_hankel_det(table: RecurrenceTable, n: int) -> Real:
    """ln D_n as a sum of ln h_j, safe from overflow for large n."""
    if not 0 <= n <= table.n_max + 1:
        raise DomainError(f"size {n} outside table range 0..{table.n_max + 1}")
    bits = table.working_bits
    with mp.workprec(bits):
        total = mp.mpf(0)
        for j in range(n):
            total += mp.log(table.h[j].value)
        return Real(total, bits)


def hermite_norm_exact(k: int, bits: int) -> Real:
    """h_k at a = 0 in closed form: (k! / 2^k) sqrt(pi)."""
    if k < 0:
        raise DomainError(f"index must be >= 0, got {k}")
    with mp.workprec(bits):
        v = mp.mpf(math.factorial(k)) / mp.mpf(2) ** k * sqrt_pi_const(bits)
    return Real(v, bits)


def hermite_beta_exact(k: int, bits: int) -> Real:
    """beta_k at a = 0 in closed form: k / 2."""
    if k < 0:
        raise DomainError(f"index must be >= 0, got {k}")
    with mp.workprec(bits):
        v = mp.mpf(k) / 2
    return Real(v, bits)
