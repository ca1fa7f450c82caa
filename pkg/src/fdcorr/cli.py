"""Command-line interface: coefficient tables, stencils, convergence studies.

Formula ids come in a short form, family letter(s) plus accuracy order:
``B6`` (standard backward), ``F8`` (standard forward), ``BC10``
(backward-centered), ``FC4`` (forward-centered), ``IC6`` (interior-centered
derivative), ``C8`` (centered half-point derivative), ``CA6`` (centered
half-point value); and a long form naming the family parameter directly,
e.g. ``centered:p=3``.  Centered families only exist at even orders.

Interior-centered formulas approximate at the midpoint of an interval whose
endpoints are their widest nodes; for ``study`` the given ``x0`` is that
midpoint and the interval endpoints follow from the spacing.

Commands: ``coeffs``, ``stencil``, ``study``, ``verify-all``.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .defcor import (
    CorrectionFormula,
    backward_centered,
    centered_average_formula,
    centered_formula,
    forward_centered,
    interior_centered,
    standard_backward,
    standard_forward,
)
from .exactmath import format_rational
from .numdiff import ConvergenceReport, convergence_study
from .stencil import flatten, oracle_weights, verify

__all__ = ["main", "console_main", "parse_formula_id", "formula_from_id"]

_FAMILY_ALIASES = {
    "centered": "centered",
    "c": "centered",
    "centered-average": "centered-average",
    "ca": "centered-average",
    "average": "centered-average",
    "interior": "interior-centered",
    "interior-centered": "interior-centered",
    "ic": "interior-centered",
    "interior-centered-value": "interior-centered-value",
    "forward-centered": "forward-centered",
    "fc": "forward-centered",
    "backward-centered": "backward-centered",
    "bc": "backward-centered",
    "standard-forward": "standard-forward",
    "forward": "standard-forward",
    "f": "standard-forward",
    "standard-backward": "standard-backward",
    "backward": "standard-backward",
    "b": "standard-backward",
}

_SHORT_PREFIXES = {
    "BC": "backward-centered",
    "FC": "forward-centered",
    "IC": "interior-centered",
    "CA": "centered-average",
    "B": "standard-backward",
    "F": "standard-forward",
    "C": "centered",
}

_CENTERED_FAMILIES = {
    "centered",
    "centered-average",
    "interior-centered",
    "interior-centered-value",
}


class FormulaIdError(ValueError):
    pass


def parse_formula_id(formula_id: str) -> tuple[str, int]:
    """Parse an id to ``(family, p)`` where ``p`` is the family parameter."""
    text = formula_id.strip()
    long_form = re.fullmatch(r"([a-z-]+):p=(\d+)", text, re.IGNORECASE)
    if long_form:
        family = _FAMILY_ALIASES.get(long_form.group(1).lower())
        if family is None:
            raise FormulaIdError(f"unknown family in {formula_id!r}")
        return family, int(long_form.group(2))
    short = re.fullmatch(r"([A-Za-z]+)(\d+)", text)
    if short:
        family = _SHORT_PREFIXES.get(short.group(1).upper())
        if family is None:
            raise FormulaIdError(f"unknown family prefix in {formula_id!r}")
        order = int(short.group(2))
        if family in _CENTERED_FAMILIES:
            if order % 2 or order < 4:
                raise FormulaIdError(
                    f"{formula_id!r}: centered families exist at even orders >= 4"
                )
            return family, (order - 2) // 2
        if order < 2:
            raise FormulaIdError(f"{formula_id!r}: order must be at least 2")
        return family, order
    raise FormulaIdError(f"cannot parse formula id {formula_id!r}")


def formula_from_id(formula_id: str) -> CorrectionFormula:
    family, p = parse_formula_id(formula_id)
    return _build_formula(family, p)


def _build_formula(family: str, p: int) -> CorrectionFormula:
    if family == "centered":
        return centered_formula(p)
    if family == "centered-average":
        return centered_average_formula(p)
    if family == "interior-centered":
        return interior_centered(p)[0]
    if family == "interior-centered-value":
        return interior_centered(p)[1]
    if family == "forward-centered":
        return forward_centered(p)
    if family == "backward-centered":
        return backward_centered(p)
    if family == "standard-forward":
        return standard_forward(p)
    if family == "standard-backward":
        return standard_backward(p)
    raise FormulaIdError(f"unknown family {family!r}")


def _json_dumps(obj: dict) -> str:
    import json

    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# coeffs


def _coeff_row(formula: CorrectionFormula) -> list[tuple[str, str]]:
    row = [
        (f"i={i}", format_rational(v))
        for i, v in sorted(formula.family_coefficients.items())
    ]
    return row


def cmd_coeffs(args: argparse.Namespace) -> int:
    family = _FAMILY_ALIASES.get(args.family.lower())
    if family is None:
        raise FormulaIdError(f"unknown family {args.family!r}")
    p = args.p
    if family == "interior-centered":
        deriv, value = interior_centered(p)
        if args.json:
            print(
                _json_dumps(
                    {"derivative": deriv.to_json_dict(), "value": value.to_json_dict()}
                )
            )
            return 0
        merged = dict(value.family_coefficients)
        merged.update(deriv.family_coefficients)
        print(f"interior-centered coefficients, p={p} (order {deriv.order})")
        _print_row([(f"i={i}", format_rational(v)) for i, v in sorted(merged.items())])
        print(
            "error constants: derivative "
            f"{format_rational(deriv.error_constant)}, value "
            f"{format_rational(value.error_constant)}"
        )
        return 0

    if family in ("forward-centered", "backward-centered"):
        # Both variants share one table: the backward coefficients equal the
        # forward ones at i=2 and are their negatives from i=3 on.
        table_formula = forward_centered(p)
        if args.json:
            print(_json_dumps(_build_formula(family, p).to_json_dict()))
            return 0
        print(f"{family} coefficients, p={p} (order {table_formula.order})")
        row = _coeff_row(table_formula)
        row.append(
            (f"i={p + 1}", format_rational(table_formula.error_constant))
        )
        _print_row(row)
        print(f"(the i={p + 1} entry is the error constant)")
        if family == "backward-centered":
            print("backward variant: i=2 entry shared, signs flip from i=3 on")
        return 0

    formula = _build_formula(family, p)
    if args.json:
        print(_json_dumps(formula.to_json_dict()))
        return 0
    print(f"{family} coefficients, p={p} (order {formula.order})")
    _print_row(_coeff_row(formula))
    print(f"error constant: {format_rational(formula.error_constant)}")
    return 0


def _print_row(row: list[tuple[str, str]]) -> None:
    labels = "  ".join(f"{label:>14}" for label, _ in row)
    values = "  ".join(f"{value:>14}" for _, value in row)
    print(labels)
    print(values)


# ---------------------------------------------------------------------------
# stencil


def cmd_stencil(args: argparse.Namespace) -> int:
    formula = formula_from_id(args.formula_id)
    st = flatten(formula)
    check = verify(st)
    if not check.ok:
        print(f"stencil self-check failed: {check.summary()}", file=sys.stderr)
        return 1
    print(_json_dumps(st.to_json_dict()))
    return 0


# ---------------------------------------------------------------------------
# study


def _parse_polynomial(text: str) -> dict[int, float]:
    """Parse ``x^3``, ``2x^4-3x+1`` style bodies into {degree: coefficient}."""
    body = text.replace(" ", "").replace("**", "^").replace("*", "")
    if not body:
        raise FormulaIdError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", body)
    poly: dict[int, float] = {}
    for term in terms:
        match = re.fullmatch(r"([+-]?)(\d+(?:\.\d+)?|\d+/\d+)?(x(?:\^(\d+))?)?", term)
        if not match or (match.group(2) is None and match.group(3) is None):
            raise FormulaIdError(f"cannot parse polynomial term {term!r}")
        sign = -1.0 if match.group(1) == "-" else 1.0
        coeff_text = match.group(2)
        coeff = float(Fraction(coeff_text)) if coeff_text else 1.0
        if match.group(3) is None:
            degree = 0
        elif match.group(4) is None:
            degree = 1
        else:
            degree = int(match.group(4))
        poly[degree] = poly.get(degree, 0.0) + sign * coeff
    return poly


def _resolve_function(name: str) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Return (u, u') for a study function id."""
    if name == "sin100pi":
        omega = 100.0 * math.pi
    elif name == "sin1000pi":
        omega = 1000.0 * math.pi
    elif name.startswith("poly:"):
        poly = _parse_polynomial(name[len("poly:") :])

        def u(x: float) -> float:
            return sum(c * x**d for d, c in sorted(poly.items()))

        def du(x: float) -> float:
            return sum(c * d * x ** (d - 1) for d, c in sorted(poly.items()) if d)

        return u, du
    else:
        raise FormulaIdError(
            f"unknown function id {name!r} (expected sin100pi, sin1000pi, or poly:...)"
        )

    def u(x: float) -> float:
        return math.sin(omega * x)

    def du(x: float) -> float:
        return omega * math.cos(omega * x)

    return u, du


def _spacing_grid(h_max: float, h_min: float, factor: float) -> list[float]:
    if h_max <= 0 or h_min <= 0 or h_max < h_min:
        raise FormulaIdError("need 0 < h-min <= h-max")
    if factor <= 1.0:
        raise FormulaIdError("h-factor must exceed 1")
    grid = []
    h = h_max
    while h >= h_min * (1.0 - 1e-12):
        grid.append(h)
        h /= factor
    if len(grid) < 3:
        raise FormulaIdError("spacing grid has fewer than 3 points")
    return grid


_GNUPLOT_HEADER = """\
set datafile separator ','
set logscale xy
set xlabel 'h'
set ylabel 'absolute error'
set format y '%.0e'
set key left top
"""


def cmd_study(args: argparse.Namespace) -> int:
    ids = [part.strip() for part in args.formula_ids.split(",") if part.strip()]
    if not ids:
        raise FormulaIdError("no formula ids given")
    u, du = _resolve_function(args.function)
    grid = _spacing_grid(args.h_max, args.h_min, args.h_factor)
    csv_dir = Path(args.csv_dir)
    csv_dir.mkdir(parents=True, exist_ok=True)
    x0 = args.x0
    df_true = du(x0)

    reports: list[tuple[str, ConvergenceReport, Path]] = []
    for formula_id in ids:
        st = flatten(formula_from_id(formula_id))
        report = convergence_study(st, u, df_true, x0, grid, formula_id=formula_id)
        path = csv_dir / f"{formula_id}.csv"
        report.write_csv(path)
        reports.append((formula_id, report, path))

    for formula_id, report, path in reports:
        fitted = report.fitted_order()
        fitted_text = "n/a" if math.isnan(fitted) else f"{fitted:.2f}"
        print(
            f"{formula_id}: fitted order {fitted_text}, "
            f"min error {report.min_error():.3e}, csv {path}"
        )
    if args.gnuplot:
        script = csv_dir / "study.gp"
        plots = ", ".join(
            f"'{path.name}' using 1:2 with linespoints title '{formula_id}'"
            for formula_id, _, path in reports
        )
        script.write_text(_GNUPLOT_HEADER + f"plot {plots}\n")
        print(f"gnuplot script: {script}")
    return 0


# ---------------------------------------------------------------------------
# verify-all


def _all_formulas(max_order: int):
    for p in range(1, (max_order - 2) // 2 + 1):
        yield centered_formula(p)
        yield centered_average_formula(p)
        deriv, value = interior_centered(p)
        yield deriv
        yield value
    for p in range(2, max_order + 1):
        yield forward_centered(p)
        yield backward_centered(p)
        yield standard_forward(p)
        yield standard_backward(p)


def cmd_verify_all(args: argparse.Namespace) -> int:
    failures = 0
    for formula in _all_formulas(args.max_order):
        st = flatten(formula)
        check = verify(st)
        reference = oracle_weights(st.offsets, st.m, st.order)
        matches = list(st.weights) == reference
        ok = check.ok and matches
        status = "PASS" if ok else "FAIL"
        detail = check.summary()
        if not matches:
            detail += "; weights disagree with the moment-system solution"
        print(f"{status} {st.provenance}: {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} formula(s) failed verification", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--json", action="store_true", help="emit JSON output")
    shared.add_argument(
        "--csv-dir", default=".", help="directory for CSV output (study)"
    )
    shared.add_argument(
        "--h-max", type=float, default=0.01, help="largest spacing (study)"
    )
    shared.add_argument(
        "--h-min",
        type=float,
        default=0.01 * 2.0**-14,
        help="smallest spacing (study)",
    )
    shared.add_argument(
        "--h-factor", type=float, default=2.0, help="spacing reduction factor (study)"
    )
    shared.add_argument(
        "--gnuplot", action="store_true", help="write a plot script beside the CSVs"
    )

    parser = argparse.ArgumentParser(
        prog="fdcorr",
        description="Finite-difference formulas by iterated error-series correction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    coeffs = sub.add_parser(
        "coeffs", parents=[shared], help="print a family's exact coefficient table"
    )
    coeffs.add_argument("family", help="centered | ca | interior | fc | bc | f | b")
    coeffs.add_argument("p", type=int, help="family parameter")
    coeffs.set_defaults(func=cmd_coeffs)

    stencil_cmd = sub.add_parser(
        "stencil", parents=[shared], help="flatten a formula id to a JSON stencil"
    )
    stencil_cmd.add_argument("formula_id", help="e.g. B6, BC10, IC6, C8, centered:p=3")
    stencil_cmd.set_defaults(func=cmd_stencil)

    study = sub.add_parser(
        "study", parents=[shared], help="convergence study on a decreasing h grid"
    )
    study.add_argument("formula_ids", help="comma-separated formula ids")
    study.add_argument("function", help="sin100pi | sin1000pi | poly:<expr>")
    study.add_argument("x0", type=float, help="evaluation point")
    study.set_defaults(func=cmd_study)

    verify_all = sub.add_parser(
        "verify-all",
        parents=[shared],
        help="regenerate, flatten, and cross-check every family",
    )
    verify_all.add_argument(
        "--max-order", type=int, default=12, help="largest accuracy order to check"
    )
    verify_all.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormulaIdError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
