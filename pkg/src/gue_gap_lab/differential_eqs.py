"""Differential equations in the gap half-width a.

Every quantity the package computes is, for fixed degree n, a smooth
function of a.  This module checks the differential relations those
functions satisfy by high-order finite differences on a 7-node grid
centered at the point of interest:

  first derivatives   d/da ln h_n = -R_n,   d/da ln beta_n = R_{n-1} - R_n,
                      d/da ln D_n = sigma_n,   dp/da = a r_n - (n+r_n) R_n / 2,
                      a closed form for beta_n',
  coupled Riccatis    r' = 2 r^2/R - (n+r) R,
                      R' = 4r + R^2 - 2aR - 2rR/a,
  a single second-order equation for R alone, the sigma-form chain ending
  in a polynomial relation between sigma, sigma', sigma'', and a
  second-order equation for v = -2r - 2n/3.

The second-order closures are obtained by eliminating one unknown from
the coupled Riccati pair, so they hold exactly on the same data; each is
verified here as an independent residual because the eliminations are
easy to get wrong by hand.

The stencils are the standard central ones of order h^6 on 7 nodes; the
embedded 5-node stencils give an independent lower-order value whose
disagreement serves as the error estimate.  Node values are computed at
full working precision (at least 700 bits), so the h^6 truncation term
dominates the residual and its order can be measured by a convergence
study.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .exceptions import DerivativeAccuracyError, DomainError
from .ladder import LadderState, ladder_states
from .orthopoly import (
    RecurrenceTable,
    build_recurrence_table,
    hermite_norm_exact,
    log_hankel_det,
)
from .precision import GUARD_BITS, PrecisionPolicy, Real, as_mpf
from .report import ResidualReport, make_check

CONTINUOUS_TOL = 1e-20
DEFAULT_FD_STEP = "1e-8"
MIN_GRID_BITS = 700
STENCIL_HALFWIDTH = 3

# 7-node central coefficients, exact rationals; truncation error is O(h^6).
_D1_W7 = (
    Fraction(-1, 60), Fraction(3, 20), Fraction(-3, 4), Fraction(0),
    Fraction(3, 4), Fraction(-3, 20), Fraction(1, 60),
)
_D2_W7 = (
    Fraction(1, 90), Fraction(-3, 20), Fraction(3, 2), Fraction(-49, 18),
    Fraction(3, 2), Fraction(-3, 20), Fraction(1, 90),
)
# Embedded 5-node stencils (order h^4) for the error estimate.
_D1_W5 = (
    Fraction(1, 12), Fraction(-2, 3), Fraction(0), Fraction(2, 3), Fraction(-1, 12),
)
_D2_W5 = (
    Fraction(-1, 12), Fraction(4, 3), Fraction(-5, 2), Fraction(4, 3), Fraction(-1, 12),
)


def _apply_stencil(values: Sequence[mp.mpf], coeffs, h: mp.mpf, order: int) -> mp.mpf:
    acc = mp.fsum(
        values[i] * mp.mpf(c.numerator) / c.denominator
        for i, c in enumerate(coeffs)
        if c != 0
    )
    return acc / h**order


def fd_derivative(
    values: Sequence,
    order: int,
    h,
    *,
    max_err: float | None = None,
) -> tuple[Real, Real]:
    """Central finite-difference derivative on 7 equally spaced samples.

    Returns (derivative, error_estimate) where the estimate is the
    disagreement with the embedded 5-node stencil.  ``order`` is 1 or 2.
    If ``max_err`` is given and the estimate exceeds it, raises
    DerivativeAccuracyError instead of returning a value silently worse
    than requested.
    """
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    if len(values) != 7:
        raise DomainError(f"need exactly 7 samples, got {len(values)}")
    bits = max(
        (v.precision_bits for v in values if isinstance(v, Real)),
        default=mp.mp.prec,
    )
    with mp.workprec(bits):
        vals = [v.value if isinstance(v, Real) else mp.mpf(v) for v in values]
        hv = as_mpf(h, bits)
        if not hv > 0:
            raise DomainError("step h must be positive")
        wide = _apply_stencil(vals, _D1_W7 if order == 1 else _D2_W7, hv, order)
        narrow = _apply_stencil(vals[1:6], _D1_W5 if order == 1 else _D2_W5, hv, order)
        err = abs(wide - narrow)
    if max_err is not None and not err < max_err:
        raise DerivativeAccuracyError(
            f"finite-difference error estimate {mp.nstr(err, 5)} exceeds {max_err}"
        )
    return Real(wide, bits), Real(err, bits)


@dataclass(frozen=True)
class AGrid:
    """Ladder data on 7 nodes a0 + k h, k = -3..3, for derivative checks.

    Each node carries its own certified recurrence table and ladder states
    up to n_max.  All nodes share the policy, with the working precision
    floored at MIN_GRID_BITS so that stencil cancellation (about 10^{16}
    amplification at h = 1e-8) cannot eat into the h^6 truncation signal.
    """

    a0: Real
    h: Real
    n_max: int
    nodes: tuple[Real, ...]
    tables: tuple[RecurrenceTable, ...]
    states: tuple[tuple[LadderState, ...], ...]

    @property
    def bits(self) -> int:
        return max(t.working_bits for t in self.tables)

    @property
    def center_states(self) -> tuple[LadderState, ...]:
        return self.states[STENCIL_HALFWIDTH]


def build_a_grid(
    a0,
    n_max: int,
    policy: PrecisionPolicy | None = None,
    h=DEFAULT_FD_STEP,
) -> AGrid:
    """Build the 7-node derivative grid centered at a0.

    a0 and h are parsed once at high precision; nodes are a0 + k h with
    k = -3..3 and every node must stay strictly positive.
    """
    if policy is None:
        policy = PrecisionPolicy()
    floor_bits = max(policy.working_bits(n_max), MIN_GRID_BITS)
    grid_policy = replace(
        policy,
        base_bits=floor_bits,
        bits_per_n=0,
        max_bits=max(policy.max_bits, floor_bits),
    )
    parse_bits = grid_policy.max_bits + GUARD_BITS
    a0v = as_mpf(a0, parse_bits)
    hv = as_mpf(h, parse_bits)
    if not hv > 0:
        raise DomainError("step h must be positive")
    with mp.workprec(parse_bits):
        node_vals = [a0v + k * hv for k in range(-STENCIL_HALFWIDTH, STENCIL_HALFWIDTH + 1)]
    if not node_vals[0] > 0:
        raise DomainError(
            f"grid node a0 - 3h = {mp.nstr(node_vals[0], 8)} is not positive"
        )
    tables = tuple(build_recurrence_table(v, n_max, grid_policy) for v in node_vals)
    states = tuple(ladder_states(t) for t in tables)
    bits = max(t.working_bits for t in tables)
    return AGrid(
        a0=Real(as_mpf(a0v, bits), bits),
        h=Real(as_mpf(hv, bits), bits),
        n_max=n_max,
        nodes=tuple(Real(as_mpf(v, bits), bits) for v in node_vals),
        tables=tables,
        states=states,
    )


def _fd1(grid: AGrid, samples: list[mp.mpf]) -> mp.mpf:
    return fd_derivative([Real(v, grid.bits) for v in samples], 1, grid.h)[0].value


def _fd2(grid: AGrid, samples: list[mp.mpf]) -> mp.mpf:
    return fd_derivative([Real(v, grid.bits) for v in samples], 2, grid.h)[0].value


def _cell(grid: AGrid, n: int):
    if not 0 <= n <= grid.n_max:
        raise DomainError(f"degree {n} outside grid range 0..{grid.n_max}")
    s = grid.center_states[n]
    return s, mp.nstr(grid.a0.value, 12)


def residual_derivative_identities(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """First-derivative identities for norms, recurrence and subleading data.

      norm_log_deriv       h_n'/h_n + R_n
      beta_log_deriv       (ln beta_n)' - (R_{n-1} - R_n)        (n >= 1)
      hankel_log_deriv     (ln D_n)' - sigma_n                   (n >= 1)
      prob_log_deriv       (ln [D_n(a)/D_n(0)])' - sigma_n       (n >= 1)
      subleading_deriv     p' - [a r_n - (n + r_n) R_n / 2]
      beta_deriv           beta_n' - [a(2 r_n - a R_n) - beta_n R_n
                                      + (a R_n - r_n)^2 / R_n]
    """
    s, a_str = _cell(grid, n)
    bits = grid.bits
    rep = ResidualReport(a=a_str, n=n)
    with mp.workprec(bits):
        a = grid.a0.value
        h_samples = [grid.tables[k].h[n].value for k in range(7)]
        dh = _fd1(grid, h_samples)
        h_center = grid.tables[STENCIL_HALFWIDTH].h[n].value
        rep.add(make_check(
            "norm_log_deriv", n, [dh / h_center, s.R.value], tolerance, bits))
        if n >= 1:
            lb = [mp.log(grid.tables[k].beta[n].value) for k in range(7)]
            dlb = _fd1(grid, lb)
            rep.add(make_check(
                "beta_log_deriv", n,
                [dlb, -grid.center_states[n - 1].R.value, s.R.value],
                tolerance, bits))
            ld = [log_hankel_det(grid.tables[k], n).value for k in range(7)]
            rep.add(make_check(
                "hankel_log_deriv", n, [_fd1(grid, ld), -s.sigma.value], tolerance, bits))
            ln_dn0 = mp.fsum(
                mp.log(hermite_norm_exact(j, bits).value) for j in range(n)
            )
            lp = [v - ln_dn0 for v in ld]
            rep.add(make_check(
                "prob_log_deriv", n, [_fd1(grid, lp), -s.sigma.value], tolerance, bits))
        p_samples = [grid.states[k][n].p.value for k in range(7)]
        dp = _fd1(grid, p_samples)
        rep.add(make_check(
            "subleading_deriv", n,
            [dp, -a * s.r.value, (n + s.r.value) * s.R.value / 2],
            tolerance, bits))
        b_samples = [grid.tables[k].beta[n].value for k in range(7)]
        db = _fd1(grid, b_samples)
        R, r, beta = s.R.value, s.r.value, s.beta.value
        if R != 0:
            rep.add(make_check(
                "beta_deriv", n,
                [
                    db,
                    -a * (2 * r - a * R),
                    beta * R,
                    -((a * R - r) ** 2) / R,
                ],
                tolerance, bits))
    return rep


def residual_riccati(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """The coupled first-order system in a:

      r_slope    r' - [2 r^2 / R - (n + r) R]
      R_slope    R' - [4 r + R^2 - 2 a R - 2 r R / a]

    The r equation comes from differentiating the norm ratio; the R
    equation from differentiating the subleading-coefficient identity
    that ties p(n, a) to r and R.  At n = 0 the second reduces to the
    closed Riccati R' = R^2 - 2aR for the seed ratio.
    """
    s, a_str = _cell(grid, n)
    bits = grid.bits
    rep = ResidualReport(a=a_str, n=n)
    with mp.workprec(bits):
        a = grid.a0.value
        R, r = s.R.value, s.r.value
        dr = _fd1(grid, [grid.states[k][n].r.value for k in range(7)])
        dR = _fd1(grid, [grid.states[k][n].R.value for k in range(7)])
        if R != 0:
            rep.add(make_check(
                "r_slope", n,
                [dr, -2 * r * r / R, (n + r) * R],
                tolerance, bits))
        rep.add(make_check(
            "R_slope", n,
            [dR, -4 * r, -R * R, 2 * a * R, 2 * r * R / a],
            tolerance, bits))
    return rep


def residual_painleve4(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """Second-order closure for R alone.

    Solving the R-Riccati for r and substituting into the r-Riccati
    eliminates r and leaves a single quasilinear equation:

        a R (2a - R) R'' + a (R - a) (R')^2 - R^2 R'
            + R^2 (R - 2a)^2 [a (R - a) + 2n + 1] = 0.

    At n = 0 this is the derivative of the seed Riccati.  The equation is
    polynomial, so no sign or branch choices enter the residual.
    """
    s, a_str = _cell(grid, n)
    bits = grid.bits
    rep = ResidualReport(a=a_str, n=n)
    with mp.workprec(bits):
        a = grid.a0.value
        R = s.R.value
        samples = [grid.states[k][n].R.value for k in range(7)]
        dR = _fd1(grid, samples)
        d2R = _fd2(grid, samples)
        rep.add(make_check(
            "painleve4_R", n,
            [
                a * R * (2 * a - R) * d2R,
                a * (R - a) * dR * dR,
                -R * R * dR,
                R * R * (R - 2 * a) ** 2 * (a * (R - a) + 2 * n + 1),
            ],
            tolerance, bits))
    return rep


def residual_sigma_form(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """The chain leading to the closed sigma equation, link by link:

      sigma_slope       sigma' - [2 r - r^2 / a^2]
      riccati_product   8 (n + r) r^2 - [X^2 - (r')^2]
      R_root_plus       4 r^2 / R - [X + r']
      R_root_minus      2 (n + r) R - [X - r']
      discriminant      sqrt((r')^2 + 8 r^2 (r + n)) - |2 (n + r) R + r'|
      sigma_ode         P^2 - 64 a^2 (a^2 - sigma') Q^2

    with X = 2 a r - sigma + r^2 / a and

      P = a^2 (sigma'')^2 - 4 a (2a^2 - sigma') sigma'' + c,
      Q = 8 a^4 n + 4 a^3 sigma + 4 a^2 - 8 a^2 n sigma'
          - 4 a sigma sigma' - a sigma'' - 2 sigma',
      c = (a^2 - sigma') [32 a^2 n (2a^2 - sigma')
          + 8 a sigma (4a^2 - sigma') + 32 a^2
          - 4 a^2 (sigma')^2 - 4 sigma^2] + 4 (sigma')^2.

    The slope relation makes r a two-branch algebraic function of sigma',
    r = a^2 +- a sqrt(a^2 - sigma'), so the closed equation is the
    resultant over both branches; that is why it is quartic rather than
    quadratic in sigma''.  Equations of X and the product come from the
    partial-fraction sum rule for sum R_j combined with the r-Riccati.
    """
    s, a_str = _cell(grid, n)
    bits = grid.bits
    rep = ResidualReport(a=a_str, n=n)
    with mp.workprec(bits):
        a = grid.a0.value
        R, r, sigma = s.R.value, s.r.value, s.sigma.value
        r_samples = [grid.states[k][n].r.value for k in range(7)]
        s_samples = [grid.states[k][n].sigma.value for k in range(7)]
        dr = _fd1(grid, r_samples)
        ds = _fd1(grid, s_samples)
        d2s = _fd2(grid, s_samples)
        rep.add(make_check(
            "sigma_slope", n,
            [ds, -2 * r, r * r / (a * a)],
            tolerance, bits))
        core = 2 * a * r - sigma + r * r / a
        rep.add(make_check(
            "riccati_product", n,
            [8 * (n + r) * r * r, -core * core, dr * dr],
            tolerance, bits))
        if R != 0:
            rep.add(make_check(
                "R_root_plus", n,
                [4 * r * r / R, -core, -dr],
                tolerance, bits))
        rep.add(make_check(
            "R_root_minus", n,
            [2 * (n + r) * R, -core, dr],
            tolerance, bits))
        disc = dr * dr + 8 * r * r * (r + n)
        rep.add(make_check(
            "discriminant", n,
            [mp.sqrt(disc), -abs(2 * (n + r) * R + dr)],
            tolerance, bits))
        c0 = (
            (a * a - ds)
            * (
                32 * a * a * n * (2 * a * a - ds)
                + 8 * a * sigma * (4 * a * a - ds)
                + 32 * a * a
                - 4 * a * a * ds * ds
                - 4 * sigma * sigma
            )
            + 4 * ds * ds
        )
        big_p = a * a * d2s * d2s - 4 * a * (2 * a * a - ds) * d2s + c0
        big_q = (
            8 * a**4 * n
            + 4 * a**3 * sigma
            + 4 * a * a
            - 8 * a * a * n * ds
            - 4 * a * sigma * ds
            - a * d2s
            - 2 * ds
        )
        rep.add(make_check(
            "sigma_ode", n,
            [big_p * big_p, -64 * a * a * (a * a - ds) * big_q * big_q],
            tolerance, bits))
    return rep


def residual_chazy(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """Second-order closure for the off-diagonal quantity alone.

    Eliminating R between the r-Riccati and the R-Riccati (the R-Riccati
    is quadratic in R, so the elimination squares once) leaves

        a^2 (r'')^2 + 8 a^2 r (2n + 3r) r''
            = 4 (a^2 + r)^2 (r')^2
              + 16 r^2 [a^2 - 2(n + r)] [2 (n + r) a^2 - r^2].

    The check is evaluated through the shifted variable v = -2r - 2n/3
    (the normalization in which the n-dependence of the leading balance
    is centered), mapping back r = -v/2 - n/3 exactly.
    """
    s, a_str = _cell(grid, n)
    bits = grid.bits
    rep = ResidualReport(a=a_str, n=n)
    with mp.workprec(bits):
        a = grid.a0.value
        n3 = mp.mpf(n)
        v_samples = [-2 * grid.states[k][n].r.value - 2 * n3 / 3 for k in range(7)]
        v = v_samples[3]
        dv = _fd1(grid, v_samples)
        d2v = _fd2(grid, v_samples)
        r = -v / 2 - n3 / 3
        dr = -dv / 2
        d2r = -d2v / 2
        rep.add(make_check(
            "chazy", n,
            [
                a * a * d2r * d2r,
                8 * a * a * r * (2 * n3 + 3 * r) * d2r,
                -4 * (a * a + r) ** 2 * dr * dr,
                -16 * r * r * (a * a - 2 * (n3 + r)) * (2 * (n3 + r) * a * a - r * r),
            ],
            tolerance, bits))
    return rep


def continuous_suite(
    grid: AGrid,
    n: int,
    *,
    tolerance: float = CONTINUOUS_TOL,
) -> ResidualReport:
    """Every continuous residual for one (n, a0) cell, merged."""
    rep = residual_derivative_identities(grid, n, tolerance=tolerance)
    for part in (
        residual_riccati(grid, n, tolerance=tolerance),
        residual_painleve4(grid, n, tolerance=tolerance),
        residual_sigma_form(grid, n, tolerance=tolerance),
        residual_chazy(grid, n, tolerance=tolerance),
    ):
        rep.extend(part.checks)
    return rep


def convergence_study(
    a0,
    n: int,
    h_values: Sequence[str] = ("1e-6", "1e-7", "1e-8"),
    policy: PrecisionPolicy | None = None,
    n_max: int | None = None,
) -> dict[str, float]:
    """Fit the log-log slope of each continuous residual against h.

    Returns {check name: slope}.  For 7-node stencils on analytic data the
    truncation term is O(h^6), so slopes near 6 confirm that the residuals
    are finite-difference truncation rather than equation error.
    """
    if n_max is None:
        n_max = n + 1
    slopes_in: dict[str, list[tuple[float, float]]] = {}
    for h_text in h_values:
        grid = build_a_grid(a0, n_max, policy, h=h_text)
        rep = continuous_suite(grid, n, tolerance=1.0)
        for c in rep.checks:
            if c.warning or c.residual <= 0:
                continue
            slopes_in.setdefault(c.name, []).append(
                (float(mp.log10(mp.mpf(h_text))), float(mp.log10(c.residual)))
            )
    out = {}
    for name, pts in slopes_in.items():
        if len(pts) != len(h_values):
            continue
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        den = sum((x - xbar) ** 2 for x in xs)
        out[name] = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / den
    return out
