"""Residual bookkeeping shared by every verification suite.

A residual is always evaluated the same way: collect the signed terms of
(left side minus right side), sum them at working precision, and divide by
the largest single term magnitude.  That relative form is what tolerances
apply to, so identities with huge or tiny natural scales are judged
fairly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath as mp

from .precision import Real


def sci_str(x, digits: int) -> str:
    """Deterministic scientific-notation string with ``digits`` significant digits."""
    v = x.value if isinstance(x, Real) else mp.mpf(x)
    return mp.nstr(v, digits, min_fixed=1, max_fixed=0, strip_zeros=False)


def relative_residual(terms: Sequence, bits: int) -> mp.mpf:
    """|sum of terms| / max |term|, or exact 0 when every term vanishes."""
    with mp.workprec(bits):
        vals = [t.value if isinstance(t, Real) else mp.mpf(t) for t in terms]
        scale = max(abs(v) for v in vals)
        if scale == 0:
            return mp.mpf(0)
        total = mp.fsum(vals)
        return abs(total) / scale


@dataclass(frozen=True)
class ResidualCheck:
    """One named residual with its verdict.

    ``warning`` marks advisory checks (e.g. a skipped cell) that must not
    affect the overall pass/fail outcome.
    """

    name: str
    n: int
    residual: mp.mpf
    tolerance: float
    passed: bool
    warning: bool = False
    note: str = ""


def make_check(name: str, n: int, terms: Sequence, tolerance: float, bits: int) -> ResidualCheck:
    """Evaluate a relative residual and compare against its tolerance."""
    r = relative_residual(terms, bits)
    return ResidualCheck(name=name, n=n, residual=r, tolerance=tolerance, passed=bool(r < tolerance))


def warning_check(name: str, n: int, note: str) -> ResidualCheck:
    """A non-fatal marker for a cell that was skipped or degenerate."""
    return ResidualCheck(
        name=name, n=n, residual=mp.mpf(0), tolerance=0.0, passed=True, warning=True, note=note
    )


@dataclass
class ResidualReport:
    """All residual checks attached to one (n, a) cell or one suite slice."""

    a: str
    n: int
    checks: list[ResidualCheck] = field(default_factory=list)

    def add(self, check: ResidualCheck) -> None:
        self.checks.append(check)

    def extend(self, checks: Iterable[ResidualCheck]) -> None:
        self.checks.extend(checks)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks if not c.warning)

    @property
    def worst(self) -> mp.mpf:
        vals = [c.residual for c in self.checks if not c.warning]
        return max(vals) if vals else mp.mpf(0)

    def rows(self) -> list[dict]:
        """Plain-type rows for JSON serialization.

        Residuals go out as decimal scientific-notation strings because
        they routinely sit far below the double-precision underflow
        threshold and a float field would flatten them to 0.0.
        """
        out = []
        for c in self.checks:
            row = {
                "name": c.name,
                "n": c.n,
                "a": self.a,
                "residual": sci_str(c.residual, 8),
                "tolerance": c.tolerance,
                "pass": bool(c.passed),
            }
            if c.warning:
                row["warning"] = True
            if c.note:
                row["note"] = c.note
            out.append(row)
        return out


def all_pass(reports: Iterable[ResidualReport]) -> bool:
    return all(r.all_pass for r in reports)
