"""The gap-deformed Hermite weight and its power moments.

The weight is w(x) = e^{-x^2} restricted to |x| > a, i.e. the Gaussian
weight with the symmetric interval (-a, a) cut out.  Because the weight is
even, odd moments vanish identically and even moments reduce to upper
incomplete gamma values:

    mu_k(a) = integral_{|x|>a} x^k e^{-x^2} dx = Gamma((k+1)/2, a^2)

for even k (substitute t = x^2 on each half line).  These exact moments are
the sole input to the recurrence builder; no quadrature is involved on the
main computational path.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .exceptions import DomainError
from .precision import (
    Real,
    as_mpf,
    erfc,
    sqrt_pi_const,
    upper_incomplete_gamma,
)


@dataclass(frozen=True)
class GapWeight:
    """The weight e^{-x^2} on |x| > a, with its working precision.

    a = 0 is allowed and recovers the classical Hermite weight; the
    eigenvalue-gap quantities that divide by edge values restrict to a > 0
    at their own boundaries.
    """

    a: Real
    prec_bits: int

    def __post_init__(self):
        if self.a.value < 0:
            raise DomainError(f"gap half-width must be >= 0, got {self.a.value}")
        if self.prec_bits <= 0:
            raise DomainError("prec_bits must be positive")

    @classmethod
    def from_str(cls, a_text: str, prec_bits: int) -> "GapWeight":
        return cls(Real.from_str(a_text, prec_bits), prec_bits)

    def w0_at_edge(self) -> Real:
        """Weight density e^{-a^2} carried by the edge x = a."""
        bits = self.prec_bits
        with mp.workprec(bits):
            v = mp.exp(-(self.a.value ** 2))
        return Real(v, bits)


def moment(k: int, w: GapWeight) -> Real:
    """k-th power moment of the weight; exactly zero for odd k."""
    if k < 0:
        raise DomainError(f"moment order must be >= 0, got {k}")
    bits = w.prec_bits
    if k % 2 == 1:
        return Real(as_mpf(0, bits), bits)
    with mp.workprec(bits):
        s = (mp.mpf(k) + 1) / 2
        x = w.a.value ** 2
    return upper_incomplete_gamma(s, x, bits)


def zeroth_moment(w: GapWeight) -> Real:
    """mu_0(a) = sqrt(pi) erfc(a), the squared norm of the constant."""
    bits = w.prec_bits
    e = erfc(w.a, bits)
    with mp.workprec(bits):
        v = sqrt_pi_const(bits) * e.value
    return Real(v, bits)


def seed_R0(w: GapWeight) -> Real:
    """R_0(a) = 2 e^{-a^2} / (sqrt(pi) erfc(a)).

    This is 2 w(a) P_0(a)^2 / h_0(a) with P_0 = 1, the base of the ladder
    of edge quantities.
    """
    bits = w.prec_bits
    h0 = zeroth_moment(w)
    with mp.workprec(bits):
        v = 2 * mp.exp(-(w.a.value ** 2)) / h0.value
    return Real(v, bits)


def seed_r1(w: GapWeight) -> Real:
    """r_1(a) = a R_0(a), the first off-diagonal edge quantity."""
    bits = w.prec_bits
    r0 = seed_R0(w)
    with mp.workprec(bits):
        v = w.a.value * r0.value
    return Real(v, bits)
