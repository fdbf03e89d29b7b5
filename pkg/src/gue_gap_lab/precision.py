"""Arbitrary-precision scalar kernel.

Everything downstream (moments, recurrences, residuals) manipulates values
produced here.  The kernel wraps mpmath: mpf numbers carry their own bits,
and every operation in this module runs inside an explicit ``mp.workprec``
block so results never silently round to the ambient global precision.

Two rules keep the package honest about accuracy:

* a :class:`Real` remembers the precision it was computed at, and binary
  operations promote to the larger operand precision;
* special functions (incomplete gamma, erfc) evaluate with guard bits and
  raise :class:`~gue_gap_lab.exceptions.ConvergenceError` instead of
  returning a partial sum when a tail bound is not met.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath as mp

from .exceptions import ConvergenceError, DomainError

# Extra bits carried by internal evaluations before final rounding.
GUARD_BITS = 48

# Hard cap on series / continued-fraction length.  At 16384 bits the gamma
# series below needs a few thousand terms, so this is a generous ceiling.
MAX_TERMS = 200_000

_CONST_LOCK = threading.Lock()
_CONST_CACHE: dict[tuple[str, int], mp.mpf] = {}


def as_mpf(x, bits: int) -> mp.mpf:
    """Coerce x to an mpf rounded at ``bits`` of precision.

    Accepts Real, mpf, int, Fraction-like rationals, str decimal literals
    and float.  Strings are the preferred way to introduce non-integer
    constants, since they parse exactly at the target precision.
    """
    if isinstance(x, Real):
        x = x.value
    with mp.workprec(bits):
        return +mp.mpf(x)


@dataclass(frozen=True)
class Real:
    """An arbitrary-precision real paired with the bits it was computed at.

    ``value`` is an mpmath mpf; ``precision_bits`` is the working precision
    of the computation that produced it, not a rigorous error bound.  The
    certification loop in the recurrence builder is what turns these nominal
    precisions into certified digits.
    """

    value: mp.mpf
    precision_bits: int

    def __post_init__(self):
        if not isinstance(self.precision_bits, int) or self.precision_bits <= 0:
            raise DomainError("precision_bits must be a positive integer")
        if not mp.isfinite(self.value):
            raise DomainError(f"Real must be finite, got {self.value}")

    @classmethod
    def from_str(cls, text: str, bits: int) -> "Real":
        return cls(as_mpf(text, bits), bits)

    @classmethod
    def from_int(cls, k: int, bits: int) -> "Real":
        return cls(as_mpf(k, bits), bits)

    def to_bits(self, bits: int) -> "Real":
        """Re-round to a different working precision."""
        return Real(as_mpf(self.value, bits), bits)

    # -- arithmetic: promote to the larger operand precision ---------------

    def _binop(self, other, op):
        if isinstance(other, Real):
            bits = max(self.precision_bits, other.precision_bits)
            o = other.value
        else:
            bits = self.precision_bits
            o = other
        with mp.workprec(bits):
            return Real(op(self.value, mp.mpf(o)), bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binop(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binop(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __pow__(self, k):
        return self._binop(k, lambda a, b: a ** b)

    def __neg__(self):
        return Real(-self.value, self.precision_bits)

    def __abs__(self):
        return Real(abs(self.value), self.precision_bits)

    # comparisons on exact binary values, precision-independent
    def _cmp_value(self, other):
        return other.value if isinstance(other, Real) else other

    def __eq__(self, other):
        return self.value == self._cmp_value(other)

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        with mp.workprec(self.precision_bits):
            return f"Real({mp.nstr(self.value, 20)}, bits={self.precision_bits})"


def pi_const(bits: int) -> mp.mpf:
    """pi at the given precision, cached."""
    key = ("pi", bits)
    with _CONST_LOCK:
        v = _CONST_CACHE.get(key)
        if v is None:
            with mp.workprec(bits):
                v = +mp.pi
            _CONST_CACHE[key] = v
        return v


def sqrt_pi_const(bits: int) -> mp.mpf:
    """sqrt(pi) at the given precision, cached."""
    key = ("sqrt_pi", bits)
    with _CONST_LOCK:
        v = _CONST_CACHE.get(key)
        if v is None:
            with mp.workprec(bits):
                v = mp.sqrt(mp.pi)
            _CONST_CACHE[key] = v
        return v


@dataclass(frozen=True)
class PrecisionPolicy:
    """How much precision to start with and how to escalate.

    ``working_bits(n_max)`` gives the starting precision for a recurrence
    build up to degree ``n_max``.  When two-level certification falls short
    of ``target_certified_digits``, precision is multiplied by
    ``escalation_factor`` until it certifies or hits ``max_bits``.
    """

    base_bits: int = 512
    bits_per_n: int = 32
    escalation_factor: float = 2.0
    target_certified_digits: int = 40
    max_bits: int = 16384

    def __post_init__(self):
        if self.base_bits < 64:
            raise DomainError("base_bits must be at least 64")
        if self.bits_per_n < 0:
            raise DomainError("bits_per_n must be nonnegative")
        if not self.escalation_factor > 1:
            raise DomainError("escalation_factor must exceed 1")
        if self.target_certified_digits < 1:
            raise DomainError("target_certified_digits must be positive")
        if self.max_bits < self.base_bits:
            raise DomainError("max_bits must be at least base_bits")

    def working_bits(self, n_max: int) -> int:
        return self.base_bits + self.bits_per_n * n_max

    def escalate(self, bits: int) -> int:
        nxt = int(math.ceil(bits * self.escalation_factor))
        if nxt <= bits:
            nxt = bits + 1
        return nxt


def complete_gamma(s, prec_bits: int) -> Real:
    """Gamma(s) for s > 0 at the requested precision."""
    work = prec_bits + GUARD_BITS
    sv = as_mpf(s, work)
    if sv <= 0:
        raise DomainError(f"complete_gamma requires s > 0, got {sv}")
    with mp.workprec(work):
        g = mp.gamma(sv)
    return Real(as_mpf(g, prec_bits), prec_bits)


def _lower_gamma_series(s: mp.mpf, x: mp.mpf, work: int) -> mp.mpf:
    """gamma(s, 0 -> x) by the ascending series, inside workprec(work).

    gamma(s,x) = x^s e^{-x} sum_{k>=0} x^k / (s (s+1) ... (s+k)).
    Terms decay once k > x, so convergence is checked against the running
    sum with the working epsilon.
    """
    with mp.workprec(work):
        eps = mp.mpf(2) ** (-(work - 4))
        ap = s
        total = 1 / s
        term = total
        for _ in range(MAX_TERMS):
            ap += 1
            term *= x / ap
            total += term
            if abs(term) < abs(total) * eps:
                break
        else:
            raise ConvergenceError(
                "lower incomplete gamma series did not converge",
                iterations=MAX_TERMS,
                tail_bound=float(abs(term) / abs(total)),
            )
        return total * mp.exp(-x + s * mp.log(x))


def _upper_gamma_cf(s: mp.mpf, x: mp.mpf, work: int) -> mp.mpf:
    """Gamma(s, x) by the Legendre continued fraction, inside workprec(work).

    Modified Lentz iteration; reliable for x >= s + 1 where the fraction
    converges geometrically.
    """
    with mp.workprec(work):
        eps = mp.mpf(2) ** (-(work - 4))
        tiny = mp.mpf(2) ** (-(work * 8))
        b = x + 1 - s
        c = 1 / tiny
        d = 1 / b if b != 0 else 1 / tiny
        h = d
        delta = mp.mpf(0)
        for i in range(1, MAX_TERMS):
            an = -i * (i - s)
            b += 2
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1 / d
            delta = d * c
            h *= delta
            if abs(delta - 1) < eps:
                break
        else:
            raise ConvergenceError(
                "upper incomplete gamma continued fraction did not converge",
                iterations=MAX_TERMS,
                tail_bound=float(abs(delta - 1)),
            )
        return h * mp.exp(-x + s * mp.log(x))


def upper_incomplete_gamma(s, x, prec_bits: int) -> Real:
    """Gamma(s, x) = integral_x^inf t^{s-1} e^{-t} dt, for s > 0, x >= 0.

    Uses the continued fraction for x >= s + 1 and the complement of the
    ascending series otherwise; both run with guard bits and a hard term
    cap.
    """
    work = prec_bits + GUARD_BITS
    sv = as_mpf(s, work)
    xv = as_mpf(x, work)
    if sv <= 0:
        raise DomainError(f"upper_incomplete_gamma requires s > 0, got s={sv}")
    if xv < 0:
        raise DomainError(f"upper_incomplete_gamma requires x >= 0, got x={xv}")
    if xv == 0:
        return complete_gamma(sv, prec_bits)
    if xv >= sv + 1:
        g = _upper_gamma_cf(sv, xv, work)
    else:
        with mp.workprec(work):
            g = mp.gamma(sv) - _lower_gamma_series(sv, xv, work)
    return Real(as_mpf(g, prec_bits), prec_bits)


def lower_incomplete_gamma(s, x, prec_bits: int) -> Real:
    """gamma(s, x) = integral_0^x t^{s-1} e^{-t} dt, by ascending series.

    Kept independent of :func:`upper_incomplete_gamma`'s continued-fraction
    branch so the pair can cross-check each other against Gamma(s).
    """
    work = prec_bits + GUARD_BITS
    sv = as_mpf(s, work)
    xv = as_mpf(x, work)
    if sv <= 0:
        raise DomainError(f"lower_incomplete_gamma requires s > 0, got s={sv}")
    if xv < 0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got x={xv}")
    if xv == 0:
        return Real(as_mpf(0, prec_bits), prec_bits)
    g = _lower_gamma_series(sv, xv, work)
    return Real(as_mpf(g, prec_bits), prec_bits)


def erfc(x, prec_bits: int) -> Real:
    """Complementary error function via Gamma(1/2, x^2) / sqrt(pi).

    The reflection erfc(-x) = 2 - erfc(x) handles negative arguments.
    """
    work = prec_bits + GUARD_BITS
    xv = as_mpf(x, work)
    if xv == 0:
        return Real(as_mpf(1, prec_bits), prec_bits)
    if xv < 0:
        with mp.workprec(work):
            pos = erfc(-xv, work).value
            v = 2 - pos
        return Real(as_mpf(v, prec_bits), prec_bits)
    with mp.workprec(work):
        x2 = xv * xv
    g = upper_incomplete_gamma("0.5", x2, work)
    with mp.workprec(work):
        v = g.value / sqrt_pi_const(work)
    return Real(as_mpf(v, prec_bits), prec_bits)
