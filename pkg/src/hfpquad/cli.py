"""Command-line front end.

Subcommands: quad (single rule value), table (error-vs-n table), rate
(table plus fitted slope), solve-ie (manufactured integral-equation solve),
floor (roundoff-floor estimate).  Integrand families: the geometric-kernel
family selected by --eta, or a user trigonometric polynomial selected by
--cos/--sin.  Output is CSV or canonical JSON with %.16e floats, so emitted
files are byte-stable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .errors import HfpquadError
from .harness import convergence_table_for, empirical_rate
from .ie_solver import (
    build_advanced_system,
    build_simple_system,
    manufactured_rhs,
    solve_collocation,
    supersingular_cotangent_kernel,
)
from .integrands import PoissonKernelU, TrigPolynomial, singular_periodic_integrand
from .oracles import exact_supersingular, hfp_reference
from .quadrature import (
    COMPACT_PAIRS,
    RuleSpec,
    roundoff_floor,
    t_hat,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    return "%.16e" % float(x)


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats as %.16e, LF-terminated."""

    def emit(o) -> str:
        if isinstance(o, dict):
            items = ",".join(
                f"{json.dumps(str(k))}:{emit(v)}" for k, v in sorted(o.items())
            )
            return "{" + items + "}"
        if isinstance(o, (list, tuple)):
            return "[" + ",".join(emit(v) for v in o) + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(o)
        return json.dumps(o)

    return emit(obj) + "\n"


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, float) else v for v in row]
        )
    return buf.getvalue()


def _write_output(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise HfpquadError(f"cannot write output file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def parse_n_range(text: str) -> list[int]:
    """Either one integer or an inclusive start:stop:step range."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"n range must be start:stop:step (got {text!r})")
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad n range {text!r}")
        return list(range(start, stop + 1, step))
    return [int(text)]


def parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _family(args):
    """Return (kind, u) for the selected integrand family."""
    if args.eta is not None and (args.cos or args.sin):
        raise ValueError("choose either --eta or --cos/--sin, not both")
    if args.eta is not None:
        return "eta-oracle", None
    if args.cos or args.sin:
        cos = tuple(parse_float_list(args.cos)) if args.cos else (0.0,)
        sin = tuple(parse_float_list(args.sin)) if args.sin else ()
        return "user-modes", TrigPolynomial(cos, sin)
    raise ValueError("no integrand family given: pass --eta or --cos/--sin")


def _integrand_for(args, eta: Optional[float], u, n_derivs: int):
    if eta is not None:
        u = PoissonKernelU(eta)
    return singular_periodic_integrand(
        u, m=args.m, t=args.t, period=TWO_PI, n_derivs=n_derivs
    )


def _oracle_for(args, eta: Optional[float], integrand) -> tuple[str, float]:
    if eta is not None and args.m == 3:
        return "exact_supersingular", exact_supersingular(eta, args.t)
    ref = hfp_reference(
        integrand.g_eval,
        integrand.g_derivs_at_t,
        args.m,
        integrand.a,
        integrand.b,
        args.t,
        smoothing=6,
    )
    return "hfp_reference", ref


def _rule_path(args) -> str:
    if args.path != "auto":
        return args.path
    return "compact" if (args.m, args.s) in COMPACT_PAIRS else "generic"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_quad(args) -> int:
    _, u = _family(args)
    eta = None
    if args.eta is not None:
        etas = parse_float_list(args.eta)
        if len(etas) != 1:
            raise ValueError("quad takes a single --eta value")
        eta = etas[0]
    need = args.m + 7 if args.oracle else args.m
    integrand = _integrand_for(args, eta, u, n_derivs=need)
    n = parse_n_range(args.n)[0]
    value = t_hat(RuleSpec(args.m, args.s, n, path=_rule_path(args)), integrand)
    print(f"value = {format_float(value)}")
    if args.oracle:
        name, oracle = _oracle_for(args, eta, integrand)
        print(f"oracle = {format_float(oracle)} ({name})")
        print(f"error = {format_float(abs(value - oracle))}")
    return 0


def _report_payload(report) -> dict:
    payload = {
        "m": report.m,
        "s": report.s,
        "t": report.t,
        "period": report.period,
        "oracle": report.oracle_name,
        "oracle_value": report.oracle_value,
        "floor_estimate": report.floor_estimate,
        "rows": [
            {"n": r.n, "value": r.value, "error": r.error} for r in report.rows
        ],
    }
    if report.eta is not None:
        payload["eta"] = report.eta
    if report.fitted_rate is not None:
        payload["fitted_rate"] = report.fitted_rate
    return payload


def _emit_reports(args, reports: list) -> int:
    if args.format == "json":
        if len(reports) == 1:
            payload = _report_payload(reports[0])
        else:
            payload = {"tables": [_report_payload(r) for r in reports]}
        _write_output(canonical_json(payload), args.output)
        return 0
    if len(reports) == 1:
        rep = reports[0]
        header = ["n", "value", "error"]
        rows = [[r.n, r.value, r.error] for r in rep.rows]
        if rep.fitted_rate is not None:
            rows.append(["fitted_rate", rep.fitted_rate, ""])
    else:
        header = ["n"] + [f"error_eta_{r.eta:g}" for r in reports]
        ns = reports[0].ns()
        rows = [
            [int(n)] + [float(rep.rows[i].error) for rep in reports]
            for i, n in enumerate(ns)
        ]
    _write_output(rows_to_csv(header, rows), args.output)
    return 0


def _build_tables(args, with_rate: bool) -> list:
    kind, u = _family(args)
    n_list = parse_n_range(args.n)
    etas = parse_float_list(args.eta) if kind == "eta-oracle" else [None]
    reports = []
    for eta in etas:
        need = args.m if (eta is not None and args.m == 3) else args.m + 7
        integrand = _integrand_for(args, eta, u, n_derivs=max(need, args.m))
        name, oracle = _oracle_for(args, eta, integrand)
        rep = convergence_table_for(
            integrand,
            oracle_value=oracle,
            oracle_name=name,
            s=args.s,
            n_list=n_list,
            eta=eta,
            path=_rule_path(args),
        )
        if with_rate:
            empirical_rate(rep)
        reports.append(rep)
    return reports


def cmd_table(args) -> int:
    return _emit_reports(args, _build_tables(args, with_rate=False))


def cmd_rate(args) -> int:
    reports = _build_tables(args, with_rate=True)
    for rep in reports:
        label = f"eta={rep.eta:g}: " if rep.eta is not None else ""
        print(f"{label}fitted ln-error slope = {format_float(rep.fitted_rate)}")
    return _emit_reports(args, reports)


def cmd_solve_ie(args) -> int:
    kernel = supersingular_cotangent_kernel()
    phi = PoissonKernelU(args.eta if args.eta is not None else 0.3)
    w = manufactured_rhs(kernel, phi, args.lam)
    if args.approach == "simple":
        system = build_simple_system(kernel, w, args.lam, args.n_base)
    else:
        system = build_advanced_system(kernel, w, args.lam, args.n_base)
    sol = solve_collocation(system)
    truth = np.asarray(phi(system.grid), dtype=float)
    errors = np.abs(sol.values - truth)
    max_err = float(np.max(errors))
    print(f"approach = {args.approach}, unknowns = {len(system.grid)}")
    print(f"max node error vs manufactured solution = {format_float(max_err)}")
    print(f"residual = {format_float(sol.residual)}")
    if args.format == "json":
        payload = {
            "approach": args.approach,
            "lambda": args.lam,
            "max_error": max_err,
            "residual": sol.residual,
            "condition": sol.condition,
            "nodes": [
                {
                    "x": float(x),
                    "phi_hat": float(v),
                    "phi_true": float(p),
                    "error": float(e),
                }
                for x, v, p, e in zip(system.grid, sol.values, truth, errors)
            ],
        }
        if args.output:
            _write_output(canonical_json(payload), args.output)
    elif args.output:
        rows = [
            [float(x), float(v), float(p), float(e)]
            for x, v, p, e in zip(system.grid, sol.values, truth, errors)
        ]
        _write_output(rows_to_csv(["x", "phi_hat", "phi_true", "error"], rows), args.output)
    return 0


def cmd_floor(args) -> int:
    value = roundoff_floor(
        args.gnorm, args.gpnorm, args.gpppnorm, args.period, args.n_base, args.unit
    )
    print(format_float(value))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hfpquad",
        description="Finite-part quadrature of periodic integrands and "
        "supersingular integral-equation solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family(p):
        p.add_argument("--eta", type=str, default=None, help="geometric-kernel family parameter(s), comma separated")
        p.add_argument("--cos", type=str, default=None, help="cosine coefficients a_0,a_1,... of a user integrand")
        p.add_argument("--sin", type=str, default=None, help="sine coefficients b_1,b_2,... of a user integrand")
        p.add_argument("--t", type=float, default=1.0, help="singular point")

    def add_rule(p):
        p.add_argument("--m", type=int, required=True, help="singularity order")
        p.add_argument("--s", type=int, default=0, help="extrapolation level")
        p.add_argument("--path", choices=["auto", "compact", "generic"], default="auto")

    def add_output(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--output", type=str, default=None, help="output path (default stdout)")

    p = sub.add_parser("quad", help="compute one rule value")
    add_rule(p)
    add_family(p)
    p.add_argument("--n", type=str, required=True, help="panel count")
    p.add_argument("--oracle", action="store_true", help="also report the oracle error")
    p.set_defaults(func=cmd_quad)

    for name, fn, hint in (
        ("table", cmd_table, "emit an error-vs-n table"),
        ("rate", cmd_rate, "table plus fitted ln-error slope"),
    ):
        p = sub.add_parser(name, help=hint)
        add_rule(p)
        add_family(p)
        p.add_argument("--n", type=str, required=True, help="n list as start:stop:step or single value")
        add_output(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("solve-ie", help="solve the manufactured integral equation")
    p.add_argument("--approach", choices=["simple", "advanced"], default="simple")
    p.add_argument("--n", dest="n_base", type=int, required=True, help="base rule count (simple grid has 4n points)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.3, help="manufactured solution parameter")
    add_output(p)
    p.set_defaults(func=cmd_solve_ie)

    p = sub.add_parser("floor", help="print the roundoff-floor estimate K(n) u n^2")
    p.add_argument("--n", dest="n_base", type=int, required=True)
    p.add_argument("--gnorm", type=float, default=0.0)
    p.add_argument("--gpnorm", type=float, default=0.0)
    p.add_argument("--gpppnorm", type=float, default=0.0)
    p.add_argument("--T", dest="period", type=float, default=TWO_PI)
    p.add_argument("--u", dest="unit", type=float, default=2.0**-53)
    p.set_defaults(func=cmd_floor)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HfpquadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
