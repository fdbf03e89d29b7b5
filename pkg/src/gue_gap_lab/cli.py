"""Command-line front door: tables, verification suites, probabilities, plots.

Four subcommands share one configuration surface:

  table    ladder and probability values on an a-grid, CSV or JSON
  verify   residual suites with per-check tolerances, JSON report,
           exit status 0 exactly when every non-warning check passes
  prob     both probability routes at a single (n, a) cell
  plot     standalone SVG line plot of a table column against a

Output is deterministic: identical configuration produces byte-identical
files, numbers are serialized in decimal scientific notation, and every
emitted file carries a hash of the canonical configuration JSON so a
report can be traced back to the exact run that made it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath as mp

from .difference_eqs import (
    BRANCH_MATCH_TOL,
    iterate_r_orbit,
    residual_R_recurrence,
    residual_alternate_r,
    residual_orbit_vs_direct,
    residual_sigma_recurrence,
    select_r_branch,
)
from .differential_eqs import DEFAULT_FD_STEP, build_a_grid, continuous_suite
from .exceptions import EdgeZeroError, GapLabError
from .ladder import ladder_states, residual_identities, residual_supplementary
from .orthopoly import build_recurrence_table, edge_eval, hermite_norm_exact
from .precision import PrecisionPolicy
from .probability import probability_record, residual_oracle
from .report import ResidualCheck, ResidualReport, sci_str

FORMAT_VERSION = "gue-gap-lab v1"
CSV_COLUMNS = ("n", "a", "beta", "h", "Pn_at_a", "p", "R", "r", "sigma", "prob", "status")
SUITES = ("identities", "supplementary", "discrete", "continuous", "oracle", "all")

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on, hashable into the output header."""

    command: str
    n_max: int
    a_values: tuple[str, ...]
    base_bits: int
    bits_per_n: int
    max_bits: int
    target_digits: int
    fd_h: str
    digits: int | None
    suite: str
    tolerances: tuple[tuple[str, float], ...] = ()
    out_format: str = "csv"
    jobs: int = 1

    def canonical(self) -> dict:
        return {
            "command": self.command,
            "n_max": self.n_max,
            "a_values": list(self.a_values),
            "base_bits": self.base_bits,
            "bits_per_n": self.bits_per_n,
            "max_bits": self.max_bits,
            "target_digits": self.target_digits,
            "fd_h": self.fd_h,
            "digits": self.digits,
            "suite": self.suite,
            "tolerances": [list(t) for t in self.tolerances],
            "format": self.out_format,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def policy(self) -> PrecisionPolicy:
        return PrecisionPolicy(
            base_bits=self.base_bits,
            bits_per_n=self.bits_per_n,
            max_bits=self.max_bits,
            target_certified_digits=self.target_digits,
        )


def _parse_a_values(args) -> tuple[str, ...]:
    if args.a_list:
        vals = tuple(v.strip() for v in args.a_list.split(",") if v.strip())
        if not vals:
            raise SystemExit("--a-list produced no values")
        return vals
    if args.a_min is None:
        raise SystemExit("provide --a-list or --a-min/--a-max/--a-steps")
    if args.a_steps == 1 or args.a_max is None:
        return (args.a_min,)
    with mp.workprec(200):
        lo = mp.mpf(args.a_min)
        hi = mp.mpf(args.a_max)
        step = (hi - lo) / (args.a_steps - 1)
        return tuple(
            mp.nstr(lo + k * step, 30, min_fixed=1, max_fixed=0)
            for k in range(args.a_steps)
        )


def _parse_tolerances(pairs: list[str]) -> tuple[tuple[str, float], ...]:
    out = []
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            name, value = "all", pair
        if not name or not value:
            raise SystemExit(f"--tol expects name=value, got {pair!r}")
        try:
            out.append((name, float(value)))
        except ValueError:
            raise SystemExit(f"--tol value not a number: {pair!r}") from None
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# table


def _table_rows_for_a(config_dict: dict, a_str: str) -> list[dict[str, str]]:
    """All rows for one grid value a, as plain string dicts.

    Module-level and plain-typed so a process pool can ship it; errors are
    folded into the status column rather than raised, keeping the sweep
    alive across bad cells.
    """
    config = RunConfig(**config_dict)
    policy = config.policy()
    n_max = config.n_max
    rows: list[dict[str, str]] = []
    with mp.workprec(200):
        a_is_zero = mp.mpf(a_str) == 0
    if a_is_zero:
        return _table_rows_zero(config, a_str)
    try:
        table = build_recurrence_table(a_str, n_max, policy)
    except GapLabError as exc:
        return [
            _row(n, a_str, status=f"error:{type(exc).__name__}")
            for n in range(n_max + 1)
        ]
    digits = config.digits or table.certified_digits
    states = None
    failed_at = None
    try:
        states = ladder_states(table)
    except EdgeZeroError as exc:
        failed_at = exc.n
        if failed_at > 0:
            states = ladder_states(table, n_top=failed_at - 1)
    bits = table.working_bits
    with mp.workprec(bits):
        prob = mp.mpf(1)
        for n in range(n_max + 1):
            beta = table.beta[n].value if n >= 1 else mp.mpf(0)
            hn = table.h[n].value
            if states is not None and (failed_at is None or n < failed_at):
                s = states[n]
                rows.append(_row(
                    n, a_str, status="ok", digits=digits,
                    beta=beta, h=hn, Pn=s.Pn_at_a.value, p=s.p.value,
                    R=s.R.value, r=s.r.value, sigma=s.sigma.value, prob=prob,
                ))
            else:
                status = "edge-zero" if n == failed_at else "skipped"
                rows.append(_row(
                    n, a_str, status=status, digits=digits,
                    beta=beta, h=hn, prob=prob,
                ))
            prob *= hn / hermite_norm_exact(n, bits).value
    return rows


def _table_rows_zero(config: RunConfig, a_str: str) -> list[dict[str, str]]:
    """Rows at a = 0: the classical weight, where the gap closes.

    The probability is exactly 1 and r vanishes identically; sigma carries
    the one-sided limit -sum R_j(0+), which is the slope of ln P from the
    right.  Odd-n rows are flagged edge-zero for the structural parity zero
    of P_n at the origin.
    """
    policy = config.policy()
    n_max = config.n_max
    digits = config.digits or policy.target_certified_digits
    table = build_recurrence_table("0", n_max, policy)
    bits = table.working_bits
    rows = []
    with mp.workprec(bits):
        sigma = mp.mpf(0)
        p_val = mp.mpf(0)
        for n in range(n_max + 1):
            ev = edge_eval(table, n)
            beta = table.beta[n].value if n >= 1 else mp.mpf(0)
            hn = table.h[n].value
            rn2 = 2 * ev.Pn_at_a.value ** 2 / hn
            rows.append(_row(
                n, a_str, status="ok" if n % 2 == 0 else "edge-zero",
                digits=digits,
                beta=beta, h=hn, Pn=ev.Pn_at_a.value, p=p_val,
                R=rn2, r=mp.mpf(0), sigma=sigma, prob=mp.mpf(1),
            ))
            sigma -= rn2
            p_val -= beta if n >= 1 else mp.mpf(0)
    return rows


def _row(n: int, a_str: str, status: str, digits: int = 20, **values) -> dict[str, str]:
    def fmt(key):
        v = values.get(key)
        return sci_str(v, digits) if v is not None else ""

    return {
        "n": str(n),
        "a": a_str,
        "beta": fmt("beta"),
        "h": fmt("h"),
        "Pn_at_a": fmt("Pn"),
        "p": fmt("p"),
        "R": fmt("R"),
        "r": fmt("r"),
        "sigma": fmt("sigma"),
        "prob": fmt("prob"),
        "status": status,
    }


def _map_cells(config: RunConfig, worker, cells):
    """Ordered map over grid cells, optionally through a process pool."""
    config_dict = {f: getattr(config, f) for f in config.__dataclass_fields__}
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(worker, config_dict, cell) for cell in cells]
            return [f.result() for f in futures]
    return [worker(config_dict, cell) for cell in cells]


def cmd_table(config: RunConfig, out_path: str | None) -> int:
    blocks = _map_cells(config, _table_rows_for_a, config.a_values)
    rows = [row for block in blocks for row in block]
    header = f"# {FORMAT_VERSION} config={config.config_hash()}"
    if config.out_format == "json":
        payload = json.dumps(
            {"version": FORMAT_VERSION, "config": config.config_hash(), "rows": rows},
            sort_keys=True, indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        buf.write(header + "\n")
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        payload = buf.getvalue()
    _emit(payload, out_path)
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_reports(config: RunConfig, a_str: str) -> list[ResidualReport]:
    policy = config.policy()
    n_max = config.n_max
    suite = config.suite
    reports: list[ResidualReport] = []
    table = None
    states = None

    def direct():
        nonlocal table, states
        if states is None:
            table = build_recurrence_table(a_str, n_max + 1, policy)
            states = ladder_states(table)
        return states

    if suite in ("identities", "all"):
        reports.extend(residual_identities(direct()))
    if suite in ("supplementary", "all"):
        for n in range(0, n_max + 1):
            reports.append(residual_supplementary(direct(), n))
    if suite in ("discrete", "all"):
        st = direct()
        orbit = iterate_r_orbit(a_str, n_max, table.working_bits)
        reports.extend(residual_orbit_vs_direct(orbit, st))
        for n in range(1, n_max + 1):
            rep = ResidualReport(a=a_str, n=n)
            rep.extend(residual_alternate_r(st, n).checks)
            rep.extend(residual_sigma_recurrence(st, n).checks)
            rep.extend(residual_R_recurrence(st, n).checks)
            choice = select_r_branch(st, n)
            rep.add(ResidualCheck(
                name="branch_select", n=n, residual=choice.rel_err,
                tolerance=BRANCH_MATCH_TOL,
                passed=bool(choice.rel_err < BRANCH_MATCH_TOL),
                note=f"sign {choice.sign}",
            ))
            reports.append(rep)
    if suite in ("continuous", "all"):
        grid = build_a_grid(a_str, n_max, policy, h=config.fd_h)
        for n in range(1, n_max + 1):
            reports.append(continuous_suite(grid, n))
    if suite in ("oracle", "all"):
        ptable = build_recurrence_table(a_str, n_max, policy)
        for n in range(1, n_max + 1):
            reports.append(residual_oracle(n, a_str, policy, table=ptable))
    return reports


def _verify_rows_for_a(config_dict: dict, a_str: str) -> list[dict]:
    config = RunConfig(**config_dict)
    with mp.workprec(200):
        if not mp.mpf(a_str) > 0:
            return [{
                "name": "cell_skipped", "n": -1, "a": a_str, "residual": "0.0e+0",
                "tolerance": 0.0, "pass": True, "warning": True,
                "note": "verify suites require a > 0",
            }]
    try:
        reports = _suite_reports(config, a_str)
    except GapLabError as exc:
        return [{
            "name": f"cell_error:{type(exc).__name__}", "n": -1, "a": a_str,
            "residual": "0.0e+0", "tolerance": 0.0, "pass": False,
            "note": str(exc),
        }]
    overrides = dict(config.tolerances)
    rows = []
    for rep in reports:
        for row in rep.rows():
            tol = overrides.get(row["name"], overrides.get("all"))
            if tol is not None and not row.get("warning"):
                row["tolerance"] = tol
                with mp.workprec(64):
                    row["pass"] = bool(mp.mpf(row["residual"]) < tol)
            rows.append(row)
    return rows


def cmd_verify(config: RunConfig, out_path: str | None) -> int:
    blocks = _map_cells(config, _verify_rows_for_a, config.a_values)
    rows = [row for block in blocks for row in block]
    ok = all(row["pass"] for row in rows if not row.get("warning"))
    payload = json.dumps(
        {
            "version": FORMAT_VERSION,
            "config": config.config_hash(),
            "suite": config.suite,
            "all_pass": ok,
            "checks": rows,
        },
        sort_keys=True, indent=2,
    ) + "\n"
    _emit(payload, out_path)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# prob


def cmd_prob(config: RunConfig, n: int, a_str: str, out_path: str | None) -> int:
    policy = config.policy()
    digits = config.digits or policy.target_certified_digits
    with mp.workprec(200):
        a_is_zero = mp.mpf(a_str) == 0
    if a_is_zero:
        doc = {
            "n": n, "a": a_str, "prob_hankel": "1.0", "prob_fredholm": None,
            "rel_discrepancy": None,
            "note": "gap of zero width; determinant route skipped",
        }
    else:
        rec = probability_record(n, a_str, policy)
        doc = {
            "n": n, "a": a_str,
            "prob_hankel": sci_str(rec.prob_hankel, digits),
            "prob_fredholm": sci_str(rec.prob_fredholm, digits),
            "rel_discrepancy": sci_str(rec.rel_discrepancy, 8),
        }
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", out_path)
    return 0


# ---------------------------------------------------------------------------
# plot


def _read_table_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def cmd_plot(in_path: str, quantity: str, out_path: str,
             n_select: tuple[int, ...] | None = None) -> int:
    rows = _read_table_csv(in_path)
    if quantity not in CSV_COLUMNS or quantity in ("n", "a", "status"):
        raise SystemExit(f"unknown plottable column {quantity!r}")
    series: dict[int, list[tuple[float, float]]] = {}
    for row in rows:
        if not row.get(quantity):
            continue
        n = int(row["n"])
        if n_select is not None and n not in n_select:
            continue
        series.setdefault(n, []).append(
            (float(row["a"]), float(mp.mpf(row[quantity])))
        )
    if not series or all(len(pts) == 0 for pts in series.values()):
        raise SystemExit(f"no data for column {quantity!r} in {in_path}")
    svg = _render_svg(series, quantity)
    with open(out_path, "w") as fh:
        fh.write(svg)
    return 0


def _render_svg(series: dict[int, list[tuple[float, float]]], quantity: str) -> str:
    width, height = 640.0, 420.0
    ml, mr, mt, mb = 64.0, 24.0, 28.0, 44.0
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr)

    def sy(y):
        return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f'<rect width="{width:g}" height="{height:g}" fill="white"/>',
        f'<line x1="{ml:g}" y1="{height-mb:g}" x2="{width-mr:g}" '
        f'y2="{height-mb:g}" stroke="black"/>',
        f'<line x1="{ml:g}" y1="{mt:g}" x2="{ml:g}" y2="{height-mb:g}" '
        f'stroke="black"/>',
    ]
    for k in range(5):
        xv = x_lo + k * (x_hi - x_lo) / 4
        yv = y_lo + k * (y_hi - y_lo) / 4
        parts.append(
            f'<text x="{sx(xv):.2f}" y="{height-mb+16:.2f}" font-size="11" '
            f'text-anchor="middle">{xv:.4g}</text>')
        parts.append(
            f'<text x="{ml-6:.2f}" y="{sy(yv)+4:.2f}" font-size="11" '
            f'text-anchor="end">{yv:.4g}</text>')
    parts.append(
        f'<text x="{(ml+width-mr)/2:.2f}" y="{height-8:.2f}" font-size="13" '
        f'text-anchor="middle">a</text>')
    parts.append(
        f'<text x="14" y="{(mt+height-mb)/2:.2f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 14 {(mt+height-mb)/2:.2f})">'
        f'{quantity}</text>')
    for idx, n in enumerate(sorted(series)):
        pts = sorted(series[n])
        if not pts:
            continue
        color = _PALETTE[idx % len(_PALETTE)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>')
        parts.append(
            f'<text x="{width-mr-4:.2f}" y="{mt+14+14*idx:.2f}" font-size="11" '
            f'text-anchor="end" fill="{color}">n={n}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# wiring


def _emit(payload: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _add_common(sub, with_amax=True):
    sub.add_argument("--n-max", type=int, default=10)
    sub.add_argument("--a-list", help="comma-separated a values")
    sub.add_argument("--a-min")
    if with_amax:
        sub.add_argument("--a-max")
        sub.add_argument("--a-steps", type=int, default=1)
    sub.add_argument("--prec-bits", type=int, default=512,
                     help="base working precision in bits")
    sub.add_argument("--max-bits", type=int, default=16384)
    sub.add_argument("--target-digits", type=int, default=40)
    sub.add_argument("--digits", type=int, default=None,
                     help="printed significant digits (default: certified)")
    sub.add_argument("--fd-h", default=DEFAULT_FD_STEP)
    sub.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                     help="tolerance override; NAME may be a check name or 'all'")
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--out", default=None)


def _config_from(args, command: str, a_values: tuple[str, ...]) -> RunConfig:
    return RunConfig(
        command=command,
        n_max=args.n_max,
        a_values=a_values,
        base_bits=args.prec_bits,
        bits_per_n=32,
        max_bits=args.max_bits,
        target_digits=args.target_digits,
        fd_h=args.fd_h,
        digits=args.digits,
        suite=getattr(args, "suite", "all"),
        tolerances=_parse_tolerances(args.tol),
        out_format=getattr(args, "format", "csv"),
        jobs=args.jobs,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gue-gap-lab",
        description="Finite-n GUE bulk gap probabilities and their "
                    "recurrence and differential structure, verified.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    t = subs.add_parser("table", help="ladder and probability table on an a-grid")
    _add_common(t)
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--plot", default=None, metavar="SVG",
                   help="also render prob vs a to this SVG")

    v = subs.add_parser("verify", help="run residual suites and report")
    _add_common(v)
    v.add_argument("--suite", choices=SUITES, default="all")

    p = subs.add_parser("prob", help="both probability routes at one cell")
    p.add_argument("n", type=int)
    p.add_argument("a")
    _add_common(p, with_amax=False)

    pl = subs.add_parser("plot", help="SVG plot of a table CSV column")
    pl.add_argument("--in", dest="in_path", required=True)
    pl.add_argument("--quantity", default="prob")
    pl.add_argument("--n-select", default=None,
                    help="comma-separated degrees to draw (default: all)")
    pl.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "plot":
        n_select = None
        if args.n_select:
            n_select = tuple(int(v) for v in args.n_select.split(","))
        return cmd_plot(args.in_path, args.quantity, args.out, n_select)
    if args.command == "prob":
        config = _config_from(args, "prob", (args.a,))
        if args.n < 1:
            raise SystemExit("n must be >= 1")
        return cmd_prob(config, args.n, args.a, args.out)
    a_values = _parse_a_values(args)
    config = _config_from(args, args.command, a_values)
    if args.command == "table":
        code = cmd_table(config, args.out)
        if args.plot and args.out:
            cmd_plot(args.out, "prob", args.plot)
        return code
    if args.command == "verify":
        return cmd_verify(config, args.out)
    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
