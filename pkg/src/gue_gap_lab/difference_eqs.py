"""Difference equations in n satisfied by the edge quantities.

The off-diagonal edge quantity r_n closes on itself as a second-order
rational recurrence in n.  Iterating it from the two seeds r_0 = 0,
r_1 = 2a e^{-a^2} / (sqrt(pi) erfc(a)) gives a route to every r_n that
never touches moments or polynomials, so comparing the orbit against the
directly computed ladder is a genuine two-route consistency check.

The same closure can be written three more ways, each checked here as a
residual: an alternate form in y_n = -2 r_n / a^2 (a modified discrete
Painleve II equation with parameter z_n = -2n/a^2), a recurrence for the
partial sums sigma_n alone, and a recurrence in R_n alone whose two
sides are perfect squares.  Finally r_n can be recovered from
(R_{n-1}, R_n) by solving a quadratic; branch selection against a reference
value is part of the verification contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath as mp

from .exceptions import BranchSelectionError, DegenerateDenominatorError, DomainError
from .ladder import LadderState
from .precision import Real, as_mpf
from .report import ResidualReport, make_check
from .weight import GapWeight, seed_r1

DISCRETE_TOL = 1e-30
ORBIT_TOL = 1e-25
DEGENERACY_DIGITS = 20
BRANCH_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class DiscreteOrbit:
    """r_0..r_N obtained by iterating the rational recurrence in n."""

    a: Real
    r: tuple[Real, ...]

    def __len__(self) -> int:
        return len(self.r)


def iterate_r_orbit(
    a,
    n_top: int,
    prec_bits: int,
    *,
    degeneracy_digits: int = DEGENERACY_DIGITS,
) -> DiscreteOrbit:
    """Iterate r_{n+1} = -r_n + 2 a^2 r_n^2 / [(n + r_n)(r_n + r_{n-1})].

    Starts from r_0 = 0 and the closed-form r_1.  Each step checks its
    denominator factors against 10^-degeneracy_digits relative to the term
    magnitudes and raises DegenerateDenominatorError rather than dividing
    through a cancellation.
    """
    if n_top < 1:
        raise DomainError(f"n_top must be >= 1, got {n_top}")
    av = as_mpf(a, prec_bits)
    if not av > 0:
        raise DomainError("orbit iteration requires a > 0")
    w = GapWeight(Real(av, prec_bits), prec_bits)
    with mp.workprec(prec_bits):
        thresh = mp.mpf(10) ** (-degeneracy_digits)
        r_list = [mp.mpf(0), seed_r1(w).value]
        for n in range(1, n_top):
            r_nm1, r_n = r_list[n - 1], r_list[n]
            f1 = n + r_n
            f2 = r_n + r_nm1
            if abs(f1) < thresh * (n + abs(r_n)) or abs(f2) < thresh * (abs(r_n) + abs(r_nm1)):
                raise DegenerateDenominatorError(
                    f"denominator degenerates at step n={n}", n=n
                )
            r_list.append(-r_n + 2 * av * av * r_n * r_n / (f1 * f2))
    return DiscreteOrbit(a=Real(av, prec_bits), r=tuple(Real(v, prec_bits) for v in r_list))


def residual_orbit_vs_direct(
    orbit: DiscreteOrbit,
    states: Sequence[LadderState],
    *,
    tolerance: float = ORBIT_TOL,
) -> list[ResidualReport]:
    """Relative disagreement between the iterated and the direct r_n."""
    n_top = min(len(orbit.r), len(states)) - 1
    bits = orbit.r[0].precision_bits
    a_str = mp.nstr(orbit.a.value, 12)
    reports = []
    with mp.workprec(bits):
        for n in range(1, n_top + 1):
            rep = ResidualReport(a=a_str, n=n)
            rep.add(make_check(
                "orbit_vs_direct", n,
                [orbit.r[n].value, -states[n].r.value],
                tolerance, bits))
            reports.append(rep)
    return reports


def residual_alternate_r(
    states: Sequence[LadderState],
    n: int,
    *,
    tolerance: float = DISCRETE_TOL,
) -> ResidualReport:
    """Residual of the alternate form in y_n = -2 r_n / a^2 (n >= 1):

        (y_{n+1} + y_n)(y_n + y_{n-1}) = -4 y_n^2 / (y_n + z_n),
        z_n = -2n / a^2.

    This is a modified discrete Painleve II equation with unit scale
    parameter; its degenerate cells (y_n + z_n near zero) raise
    DegenerateDenominatorError.
    """
    if n < 1 or n + 1 >= len(states):
        raise DomainError(f"need 1 <= n <= {len(states) - 2}, got {n}")
    bits = states[0].bits
    a = states[0].a.value
    with mp.workprec(bits):
        scale = -2 / (a * a)
        y_prev = scale * states[n - 1].r.value
        y = scale * states[n].r.value
        y_next = scale * states[n + 1].r.value
        z_n = scale * n
        den = y + z_n
        if abs(den) < mp.mpf(10) ** (-DEGENERACY_DIGITS) * (abs(y) + abs(z_n)):
            raise DegenerateDenominatorError(f"y_n + z_n degenerates at n={n}", n=n)
        rep = ResidualReport(a=mp.nstr(a, 12), n=n)
        rep.add(make_check(
            "alternate_r", n,
            [(y_next + y) * (y + y_prev), 4 * y * y / den],
            tolerance, bits))
    return rep


def residual_sigma_recurrence(
    states: Sequence[LadderState],
    n: int,
    *,
    tolerance: float = DISCRETE_TOL,
) -> ResidualReport:
    """Residual of the pure-sigma recurrence (n >= 1).

    With the consecutive differences u = sigma_n - sigma_{n+1} (= R_n)
    and v = sigma_{n-1} - sigma_n (= R_{n-1}), set

        N = 2 a sigma_n + n [2a (u + v) - u v],
        D = (2a - u)(2a - v).

    N/D recovers r_n from sigma data alone, and feeding that into
    2 r_n^2 = (n + r_n) u v closes the three-term relation

        2 N^2 = u v N D + n u v D^2.
    """
    if n < 1 or n + 1 >= len(states):
        raise DomainError(f"need 1 <= n <= {len(states) - 2}, got {n}")
    bits = states[0].bits
    a = states[0].a.value
    with mp.workprec(bits):
        s_prev = states[n - 1].sigma.value
        s = states[n].sigma.value
        s_next = states[n + 1].sigma.value
        u = s - s_next
        v = s_prev - s
        big_n = 2 * a * s + n * (2 * a * (u + v) - u * v)
        big_d = (2 * a - u) * (2 * a - v)
        rep = ResidualReport(a=mp.nstr(a, 12), n=n)
        rep.add(make_check(
            "sigma_recurrence", n,
            [2 * big_n * big_n, -u * v * big_n * big_d, -n * u * v * big_d * big_d],
            tolerance, bits))
    return rep


def residual_R_recurrence(
    states: Sequence[LadderState],
    n: int,
    *,
    tolerance: float = DISCRETE_TOL,
) -> ResidualReport:
    """Residual of the closure in R_n alone (n >= 1):

        R_{n-1} R_{n+1} (R_n R_{n-1} + 8n)(R_{n+1} R_n + 8n + 8)
        = [8 R_n a^2 + R_n R_{n-1} R_{n+1}
           - 4 (a R_n + n + 1) R_{n+1} - 4 (a R_n + n) R_{n-1}]^2.
    """
    if n < 1 or n + 1 >= len(states):
        raise DomainError(f"need 1 <= n <= {len(states) - 2}, got {n}")
    bits = states[0].bits
    a = states[0].a.value
    with mp.workprec(bits):
        Rm = states[n - 1].R.value
        R = states[n].R.value
        Rp = states[n + 1].R.value
        lhs = Rm * Rp * (R * Rm + 8 * n) * (Rp * R + 8 * n + 8)
        inner = (
            8 * R * a * a
            + R * Rm * Rp
            - 4 * (a * R + n + 1) * Rp
            - 4 * (a * R + n) * Rm
        )
        rep = ResidualReport(a=mp.nstr(a, 12), n=n)
        rep.add(make_check("R_recurrence", n, [lhs, -inner * inner], tolerance, bits))
    return rep


@dataclass(frozen=True)
class BranchChoice:
    """Outcome of recovering r_n from (R_{n-1}, R_n) by the quadratic."""

    n: int
    sign: str
    value: Real
    rel_err: mp.mpf
    rel_err_other: mp.mpf


def select_r_branch(
    states: Sequence[LadderState],
    n: int,
    *,
    match_tol: float = BRANCH_MATCH_TOL,
) -> BranchChoice:
    """Solve 4 r^2 - Q r - (n/2) Q = 0, Q = R_n R_{n-1}, and pick the root
    matching the directly computed r_n.

    The roots are (Q +- sqrt(Q) sqrt(8n + Q))/4, one positive and one
    negative since Q > 0.  The sign of r_n itself alternates with n
    (r_n = 2 w0 P_n P_{n-1} / h_{n-1} and the edge values P_n(a) change
    sign in a period-four pattern), so the selected branch alternates as
    well; selection is by measurement, not assumption.  Raises
    BranchSelectionError when neither root is within match_tol relatively.
    """
    if n < 1 or n >= len(states):
        raise DomainError(f"need 1 <= n <= {len(states) - 1}, got {n}")
    bits = states[0].bits
    with mp.workprec(bits):
        Q = states[n].R.value * states[n - 1].R.value
        disc = mp.sqrt(Q) * mp.sqrt(8 * n + Q)
        root_plus = (Q + disc) / 4
        root_minus = (Q - disc) / 4
        ref = states[n].r.value
        scale = max(abs(ref), abs(root_plus), abs(root_minus))
        err_plus = abs(root_plus - ref) / scale
        err_minus = abs(root_minus - ref) / scale
        if err_plus <= err_minus:
            sign, value, err, other = "+", root_plus, err_plus, err_minus
        else:
            sign, value, err, other = "-", root_minus, err_minus, err_plus
        if not err < match_tol:
            raise BranchSelectionError(
                f"neither quadratic root matches r_{n} within {match_tol}"
            )
        return BranchChoice(
            n=n, sign=sign, value=Real(value, bits), rel_err=err, rel_err_other=other
        )
