"""Command-line front end: build rules, integrate, verify, sweep, compare.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric
failure.  All float serialization uses 17 significant decimal digits, which
round-trips IEEE doubles exactly; runs are deterministic, so repeated
invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import classical_rule, convergence_study, error_norm_squared
from .coefficients import build_rule, closed_form_m1, closed_form_m2, coefficients_via_convolution
from .core import (
    QuadratureError,
    QuadratureRule,
    apply_rule,
    builtin_integrand,
    constraint_residuals,
)
from .operator import identity_residuals
from .solver import assemble_system, solve

SCHEMA_VERSION = 1

USAGE_ERROR = 2
NUMERIC_ERROR = 3


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def _json17(obj, indent: int = 0) -> str:
    """Minimal JSON writer with 17-significant-digit floats."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {_json17(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}  {_json17(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _f17(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj)!r}")


def rule_document(rule: QuadratureRule) -> dict:
    """JSON-ready document for a rule (schema_version 1)."""
    grid = rule.grid
    return {
        "schema_version": SCHEMA_VERSION,
        "m": grid.m,
        "n": grid.n,
        "h": grid.h,
        "nodes": list(grid.nodes()),
        "coefficients": list(rule.coefficients),
        "method": rule.method.value,
        "d": rule.multiplier_d,
        "diagnostics": {
            "condition_number": rule.condition_estimate,
            "constraint_residuals": constraint_residuals(rule),
        },
    }


def document_json(rule: QuadratureRule) -> str:
    return _json17(rule_document(rule)) + "\n"


def document_csv(rule: QuadratureRule) -> str:
    lines = ["beta,node,coefficient"]
    n = rule.grid.n
    for beta, c in enumerate(rule.coefficients):
        lines.append(f"{beta},{_f17(beta / n)},{_f17(c)}")
    return "\n".join(lines) + "\n"


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _validated_method(m: int, method: str) -> str:
    if method == "auto":
        method = "closed" if m in (1, 2) else "solve"
    allowed = {"closed": (1, 2), "conv": (1, 2), "solve": (1, 2, 3)}
    if method not in allowed:
        raise ValueError(f"unknown method {method!r}")
    if m not in allowed[method]:
        raise ValueError(f"method {method!r} supports m in {allowed[method]}, got m={m}")
    return method


def cmd_coeffs(args) -> int:
    method = _validated_method(args.m, args.method)
    rule = build_rule(args.m, args.n, method)
    payload = document_csv(rule) if args.format == "csv" else document_json(rule)
    _emit(payload, args.out)
    return 0


def cmd_integrate(args) -> int:
    method = _validated_method(args.m, args.method)
    f = builtin_integrand(args.function)
    rule = build_rule(args.m, args.n, method)
    value = apply_rule(rule, f.fn)
    lines = [
        f"quadrature value: {_f17(value)}",
        f"reference value:  {_f17(f.exact_integral)}",
        f"absolute error:   {abs(value - f.exact_integral):.3e}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _verify_checks(m: int, n: int) -> list[dict]:
    checks: list[dict] = []

    def add(name: str, value: float, tol: float) -> None:
        checks.append({"name": name, "value": value, "tolerance": tol, "passed": bool(value <= tol)})

    rules: dict[str, QuadratureRule] = {}
    if m in (1, 2):
        rules["closed"] = closed_form_m1(n) if m == 1 else closed_form_m2(n)
        rules["conv"] = coefficients_via_convolution(m, n)
    rules["solve"] = solve(assemble_system(m, n))
    for name, rule in rules.items():
        add(f"{name}_constraints", max(constraint_residuals(rule).values()), 1e-12)
    if "closed" in rules:
        dev = max(
            abs(a - b)
            for a, b in zip(rules["closed"].coefficients, rules["solve"].coefficients)
        )
        add("closed_vs_solve", dev, 1e-12 if m == 1 else 1e-9)
        dev_conv = max(
            abs(a - b)
            for a, b in zip(rules["conv"].coefficients, rules["closed"].coefficients)
        )
        add("conv_vs_closed", dev_conv, 1e-12)
    report = identity_residuals(m, 1.0 / n)
    if report.divergent:
        # cannot happen for valid grids (m=3 needs n>=2); fail loudly if it does
        add("operator_identities", float("inf"), 1e-9)
    else:
        add("operator_identities", max(report.residuals.values()), 1e-9)
    norm_sq = error_norm_squared(rules["solve"])
    add("error_norm_nonnegative", -norm_sq, 1e-12)
    return checks


def cmd_verify(args) -> int:
    checks = _verify_checks(args.m, args.n)
    passed = all(c["passed"] for c in checks)
    payload = _json17({"m": args.m, "n": args.n, "passed": passed, "checks": checks}) + "\n"
    _emit(payload, args.out)
    return 0 if passed else 1


def cmd_convergence(args) -> int:
    n_values = _parse_n_list(args.n_list)
    method = _validated_method(args.m, args.method)
    if args.norm_mode and args.function:
        raise ValueError("--norm-mode and --function are mutually exclusive")
    if args.norm_mode:
        table = convergence_study(args.m, n_values, norm_mode=True, method=method)
    else:
        if not args.function:
            raise ValueError("pass --function NAME or --norm-mode")
        table = convergence_study(args.m, n_values, builtin_integrand(args.function), method=method)
    if args.format == "csv":
        lines = ["n,value,ratio,order"]
        for row in table.rows:
            ratio = _f17(row.ratio) if row.ratio is not None else ""
            order = _f17(row.order) if row.order is not None else ""
            lines.append(f"{row.n},{_f17(row.value)},{ratio},{order}")
        payload = "\n".join(lines) + "\n"
    else:
        payload = _json17(
            {
                "m": table.m,
                "quantity": table.quantity,
                "rows": [
                    {"n": r.n, "value": r.value, "ratio": r.ratio, "order": r.order}
                    for r in table.rows
                ],
            }
        ) + "\n"
    _emit(payload, args.out)
    return 0


def cmd_compare(args) -> int:
    method = _validated_method(args.m, args.method)
    f = builtin_integrand(args.function)
    rows = []
    optimal = build_rule(args.m, args.n, method)
    rows.append(("optimal", apply_rule(optimal, f.fn)))
    rows.append(("trapezoid", apply_rule(classical_rule("trapezoid", args.n), f.fn)))
    note = ""
    if args.n % 2 == 0:
        rows.append(("simpson", apply_rule(classical_rule("simpson", args.n), f.fn)))
    else:
        note = "simpson omitted: n is odd\n"
    lines = [f"{'rule':<10} {'value':<24} {'abs_error':<12}"]
    for name, value in rows:
        lines.append(f"{name:<10} {_f17(value):<24} {abs(value - f.exact_integral):.3e}")
    _emit("\n".join(lines) + "\n" + note, args.out)
    return 0


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--n-list must be comma-separated integers, got {text!r}") from None
    if not values:
        raise ValueError("--n-list is empty")
    if values != sorted(values) or len(set(values)) != len(values):
        raise ValueError("--n-list must be strictly ascending")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optquad",
        description="Optimal-weight quadrature rules on [0,1], exact for exp(-x).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_n=True):
        p.add_argument("--m", type=int, required=True, help="derivative order (1, 2 or 3)")
        if with_n:
            p.add_argument("--n", type=int, required=True, help="number of grid intervals")
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("coeffs", help="construct a rule and emit its document")
    common(p)
    p.add_argument("--method", default="auto", choices=["closed", "solve", "conv", "auto"])
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("integrate", help="apply a rule to a built-in integrand")
    common(p)
    p.add_argument("--method", default="auto", choices=["closed", "solve", "conv", "auto"])
    p.add_argument("--function", required=True, help="built-in integrand name")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("verify", help="run the invariant checks for (m, n)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="sweep n and tabulate errors or norms")
    common(p, with_n=False)
    p.add_argument("--n-list", required=True, help="comma-separated ascending interval counts")
    p.add_argument("--method", default="auto", choices=["closed", "solve", "conv", "auto"])
    p.add_argument("--function", help="built-in integrand name")
    p.add_argument("--norm-mode", action="store_true", help="tabulate the error-functional norm")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("compare", help="optimal vs trapezoid vs simpson on one integrand")
    common(p)
    p.add_argument("--method", default="auto", choices=["closed", "solve", "conv", "auto"])
    p.add_argument("--function", required=True, help="built-in integrand name")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


def console_entry() -> None:
    sys.exit(main())
