"""Edge quantities of the gap weight and their recurrence identities.

For the even weight e^{-x^2} on |x| > a the whole effect of the excluded
interval enters through boundary terms at x = a.  With w0 = e^{-a^2} and
the monic polynomials P_j, the edge quantities are

    R_n = 2 w0 P_n(a)^2 / h_n
    r_n = 2 w0 P_n(a) P_{n-1}(a) / h_{n-1}        (r_0 = 0)
    sigma_n = -(R_0 + ... + R_{n-1})

sigma_n is simultaneously the logarithmic derivative d/da ln D_n of the
moment determinant, which ties these ladder quantities to the gap
probability.  The residual suites below check, cell by cell, the closed
algebraic relations these quantities satisfy: pair sums, the closed form of
beta_n, partial-sum identities, the subleading-coefficient formula, and the
three supplementary conditions on the associated spectral functions
A_n(z), B_n(z).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath as mp

from .exceptions import DomainError, EdgeZeroError, PoleProximityError
from .orthopoly import RecurrenceTable, poly_values, subleading_coeff
from .precision import Real, as_mpf
from .report import ResidualReport, make_check

IDENTITY_TOL = 1e-30
SUPPLEMENTARY_TOL = 1e-30

# z values used by default for the spectral-function checks; chosen to land
# both inside and outside typical gap widths while staying away from poles.
DEFAULT_Z_SAMPLES = ("0.37", "-0.37", "2.1", "-2.1", "3.7", "10")
POLE_MARGIN = 1e-3


@dataclass(frozen=True)
class LadderState:
    """All edge quantities for one degree n at one gap half-width a."""

    n: int
    a: Real
    R: Real
    r: Real
    beta: Real
    sigma: Real
    p: Real
    Pn_at_a: Real

    @property
    def bits(self) -> int:
        return self.R.precision_bits


def ladder_states(
    table: RecurrenceTable,
    n_top: int | None = None,
    *,
    zero_threshold_digits: int | None = None,
) -> list[LadderState]:
    """LadderState for n = 0..n_top from one certified recurrence table.

    Requires a > 0: at a = 0 every odd-degree polynomial vanishes at the
    edge by parity and the ladder is not defined.  An accidental near-zero
    of P_n at the edge for a > 0 raises EdgeZeroError rather than returning
    uncertifiable ratios; the threshold is 10^-t relative to the recurrence
    terms that produced the value, with t defaulting to half the table's
    certified digits.
    """
    if n_top is None:
        n_top = table.n_max
    if not 0 <= n_top <= table.n_max:
        raise DomainError(f"n_top {n_top} outside table range 0..{table.n_max}")
    if not table.a.value > 0:
        raise DomainError("ladder quantities require a > 0")
    t = zero_threshold_digits if zero_threshold_digits is not None else table.certified_digits // 2
    bits = table.working_bits
    a = table.a.value
    pvals = [v.value for v in poly_values(table, n_top, table.a)]
    with mp.workprec(bits):
        thresh = mp.mpf(10) ** (-t)
        for n in range(1, n_top + 1):
            # scale of the two recurrence terms whose difference is P_n(a)
            scale = abs(a * pvals[n - 1])
            if n >= 2:
                scale = max(scale, abs(table.beta[n - 1].value * pvals[n - 2]))
            if abs(pvals[n]) < thresh * scale:
                raise EdgeZeroError(
                    f"P_{n}(a) is below the certification threshold at a={mp.nstr(a, 8)}",
                    n=n,
                )
        two_w0 = 2 * mp.exp(-a * a)
        states = []
        sigma_acc = mp.mpf(0)
        p_acc = mp.mpf(0)
        for n in range(n_top + 1):
            R_n = two_w0 * pvals[n] ** 2 / table.h[n].value
            r_n = mp.mpf(0) if n == 0 else two_w0 * pvals[n] * pvals[n - 1] / table.h[n - 1].value
            states.append(
                LadderState(
                    n=n,
                    a=Real(a, bits),
                    R=Real(R_n, bits),
                    r=Real(r_n, bits),
                    beta=table.beta[n],
                    sigma=Real(sigma_acc, bits),
                    p=Real(p_acc, bits),
                    Pn_at_a=Real(pvals[n], bits),
                )
            )
            sigma_acc -= R_n
            p_acc -= table.beta[n].value
    return states


def residual_identities(
    states: Sequence[LadderState],
    *,
    tolerance: float = IDENTITY_TOL,
) -> list[ResidualReport]:
    """Residuals of the algebraic recurrence identities, one report per n.

    For each n with a successor state available the following must vanish:

      pair_sum          r_{n+1} + r_n - a R_n
      beta_closed_form  beta_n - (n + r_n)/2
      r_squared         r_n^2 - beta_n R_n R_{n-1}                (n >= 1)
      weighted_sum      a sum R_j - 2 sum r_j - r_n               (j < n)
      R_partial_sum     sum R_j - [-2 a r_n - r_n^2/a
                                   + (n+r_n) R_n + 2 r_n^2/R_n]
      subleading        -p_n - [n(n-1)/4 - (1/4 + a^2/2) r_n - r_n^2/4
                               + (a/4)(n+r_n) R_n + (a/2) r_n^2/R_n]
      sigma_step        R_n - (sigma_n - sigma_{n+1})

    The closed forms for sum R_j and p_n follow from matching pole orders
    in the spectral sum rule: the double-pole numerator z^2 r_n^2 splits as
    r_n^2 (z^2 - a^2) + a^2 r_n^2, so the first-order matching picks up an
    r_n^2 term alongside 2 a^2 r_n.  Dropping it yields variants of these
    two identities that fail at O(1); the forms above hold to working
    precision.
    """
    if len(states) < 2:
        raise DomainError("need at least two consecutive states")
    bits = states[0].bits
    a = states[0].a.value
    a_str = mp.nstr(a, 12)
    reports = []
    with mp.workprec(bits):
        sum_R = mp.mpf(0)
        sum_r = mp.mpf(0)
        for n in range(len(states) - 1):
            s = states[n]
            s1 = states[n + 1]
            R, r, beta, sigma, p = s.R.value, s.r.value, s.beta.value, s.sigma.value, s.p.value
            rep = ResidualReport(a=a_str, n=n)
            rep.add(make_check(
                "pair_sum", n, [s1.r.value, r, -a * R], tolerance, bits))
            rep.add(make_check(
                "beta_closed_form", n, [beta, -mp.mpf(n) / 2, -r / 2], tolerance, bits))
            if n >= 1:
                Rm = states[n - 1].R.value
                rep.add(make_check(
                    "r_squared", n, [r * r, -beta * R * Rm], tolerance, bits))
            rep.add(make_check(
                "weighted_sum", n, [a * sum_R, -2 * sum_r, -r], tolerance, bits))
            if R != 0:
                rep.add(make_check(
                    "R_partial_sum", n,
                    [sum_R, 2 * a * r, r * r / a, -(n + r) * R, -2 * r * r / R],
                    tolerance, bits))
                rep.add(make_check(
                    "subleading", n,
                    [
                        -p,
                        -mp.mpf(n * (n - 1)) / 4,
                        (mp.mpf(1) / 4 + a * a / 2) * r,
                        r * r / 4,
                        -(a / 4) * (n + r) * R,
                        -(a / 2) * r * r / R,
                    ],
                    tolerance, bits))
            rep.add(make_check(
                "sigma_step", n, [R, -sigma, s1.sigma.value], tolerance, bits))
            reports.append(rep)
            sum_R += R
            sum_r += r
    return reports


def _spectral_AB(state: LadderState, z: mp.mpf, a: mp.mpf):
    """A_n(z) = 2 + R_n a/(z^2 - a^2), B_n(z) = r_n z/(z^2 - a^2)."""
    d = z * z - a * a
    return 2 + state.R.value * a / d, state.r.value * z / d


def default_z_samples(a, bits: int, margin: float = POLE_MARGIN) -> list[Real]:
    """The default spectral sample points, nudged away from z^2 = a^2."""
    av = as_mpf(a, bits)
    out = []
    with mp.workprec(bits):
        for text in DEFAULT_Z_SAMPLES:
            z = mp.mpf(text)
            while abs(z * z - av * av) <= margin:
                z *= mp.mpf("1.5")
            out.append(Real(z, bits))
    return out


def residual_supplementary(
    states: Sequence[LadderState],
    n: int,
    z_samples: Sequence[Real] | None = None,
    *,
    tolerance: float = SUPPLEMENTARY_TOL,
    pole_margin: float = POLE_MARGIN,
) -> ResidualReport:
    """Residuals of the three supplementary spectral-function conditions.

    With v0'(z) = 2z for the Gaussian potential these read

      s1      B_{n+1} + B_n = z A_n - 2z
      s2      1 + z (B_{n+1} - B_n) = beta_{n+1} A_{n+1} - beta_n A_{n-1}
      s2sum   B_n^2 + 2 z B_n + sum_{j<n} A_j = beta_n A_n A_{n-1}

    where sum_{j<n} A_j = 2n - a sigma_n / (z^2 - a^2).  s1 is checked for
    n >= 0, the other two need n >= 1.  Sample points must stay away from
    the poles at z = +-a; explicitly supplied ones that violate the margin
    raise PoleProximityError, while the defaults self-adjust.
    """
    if n < 0 or n + 1 >= len(states):
        raise DomainError(f"need states 0..{n + 1}, have {len(states)}")
    bits = states[0].bits
    a = states[0].a.value
    if z_samples is None:
        z_samples = default_z_samples(a, bits, pole_margin)
    rep = ResidualReport(a=mp.nstr(a, 12), n=n)
    with mp.workprec(bits):
        for z_real in z_samples:
            z = z_real.value if isinstance(z_real, Real) else mp.mpf(z_real)
            if abs(z * z - a * a) <= pole_margin:
                raise PoleProximityError(
                    f"sample z={mp.nstr(z, 8)} within margin {pole_margin} of the pole at a={mp.nstr(a, 8)}"
                )
            ztag = mp.nstr(z, 8)
            A_n, B_n = _spectral_AB(states[n], z, a)
            A_np1, B_np1 = _spectral_AB(states[n + 1], z, a)
            rep.add(make_check(
                f"s1@{ztag}", n,
                [B_np1, B_n, -z * A_n, 2 * z],
                tolerance, bits))
            if n >= 1:
                A_nm1, _ = _spectral_AB(states[n - 1], z, a)
                beta_n = states[n].beta.value
                beta_np1 = states[n + 1].beta.value
                rep.add(make_check(
                    f"s2@{ztag}", n,
                    [1, z * B_np1, -z * B_n, -beta_np1 * A_np1, beta_n * A_nm1],
                    tolerance, bits))
                sum_A = 2 * mp.mpf(n) - a * states[n].sigma.value / (z * z - a * a)
                rep.add(make_check(
                    f"s2sum@{ztag}", n,
                    [B_n * B_n, 2 * z * B_n, sum_A, -beta_n * A_n * A_nm1],
                    tolerance, bits))
    return rep
