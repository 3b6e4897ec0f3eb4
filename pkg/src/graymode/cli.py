"""graymode: decolorize images and characterize color-to-gray operators.

Subcommands
    convert    project a color image to grayscale with a chosen operator
    reference  emit the 1D or 2D reference image (PNG or PPM)
    analyze    compute EQ/BM modes of an operator, export CSV or JSON
    grid       enumerate discrete weight candidates with K and taxonomy labels
    variants   write the 17 case-study grayscale variants plus a manifest

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 domain error (invalid
or infeasible operator). GRAYMODE_THREADS caps the worker count for mode
computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import classify, families, imagefiles, modes, reference, report
from .color import CHOSEN, STANDARD, UNIFORM, EmptyImageError, LinearOperator, apply_image

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DOMAIN = 4

PRESETS = {"uniform": UNIFORM, "standard": STANDARD, "chosen": CHOSEN}


class UsageError(Exception):
    pass


def _workers() -> int:
    raw = os.environ.get("GRAYMODE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_operator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--weights", metavar="R,G,B",
                        help="explicit weights, comma separated")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="named operator")
    parser.add_argument("--family", type=float, metavar="K",
                        help="family parameter, combined with one --fix-* flag")
    parser.add_argument("--fix-red", type=float, metavar="V")
    parser.add_argument("--fix-green", type=float, metavar="V")
    parser.add_argument("--fix-blue", type=float, metavar="V")
    parser.add_argument("--minus-root", action="store_true",
                        help="take the minus root when green is fixed")


def resolve_operator(args: argparse.Namespace) -> LinearOperator:
    """Resolve --weights / --preset / --family+--fix-* to an operator."""
    chosen_forms = [args.weights is not None, args.preset is not None,
                    args.family is not None]
    if sum(chosen_forms) != 1:
        raise UsageError("specify exactly one of --weights, --preset, --family")
    if args.weights is not None:
        parts = args.weights.split(",")
        if len(parts) != 3:
            raise UsageError("--weights needs three comma-separated values")
        try:
            lr, lg, lb = (float(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"bad --weights value: {exc}") from exc
        return LinearOperator(lr, lg, lb)
    if args.preset is not None:
        return PRESETS[args.preset]
    fixes = [(name, value) for name, value in
             (("red", args.fix_red), ("green", args.fix_green),
              ("blue", args.fix_blue)) if value is not None]
    if len(fixes) != 1:
        raise UsageError("--family needs exactly one of --fix-red/--fix-green/--fix-blue")
    channel, value = fixes[0]
    if channel == "blue":
        return families.member_from_blue(args.family, value)
    if channel == "red":
        return families.member_from_red(args.family, value)
    sign = "minus" if args.minus_root else "plus"
    return families.member_from_green(args.family, value, sign)


def cmd_convert(args: argparse.Namespace) -> int:
    op = resolve_operator(args)
    image = imagefiles.read_color_image(args.input)
    gray = apply_image(op, image)
    imagefiles.write_image(args.out, gray)
    return EXIT_OK


def cmd_reference(args: argparse.Namespace) -> int:
    buf = reference.render_reference(args.layout, replicate=args.replicate)
    imagefiles.write_image(args.out, buf)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    op = resolve_operator(args)
    rep = report.analyze_operator(op, workers=_workers())
    text = report.to_csv(rep) if args.format == "csv" else report.to_json(rep)
    Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _grid_values(args: argparse.Namespace) -> list[float]:
    if args.values:
        try:
            return [float(v) for v in args.values.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --values entry: {exc}") from exc
    # Build lo, lo+step, ..., hi on an exact integer lattice to dodge float
    # accumulation (0.1 steps drift within a few ulp otherwise).
    scale = 1_000_000
    step = round(args.step * scale)
    lo = round(args.lo * scale)
    hi = round(args.hi * scale)
    if step <= 0 or hi < lo:
        raise UsageError("need --step > 0 and --hi >= --lo")
    return [v / scale for v in range(lo, hi + 1, step)]


def cmd_grid(args: argparse.Namespace) -> int:
    values = _grid_values(args)
    candidates = families.enumerate_grid(values, interior_only=args.interior)
    rows = []
    for cand in candidates:
        row = {"lambda_r": cand.lambda_r, "lambda_g": cand.lambda_g,
               "lambda_b": cand.lambda_b, "degenerate": cand.degenerate,
               "k": None, "eq_class": None, "bm_class": None}
        if not cand.degenerate:
            op = cand.operator()
            row["k"] = families.family_of(op)
            if args.classify:
                label = classify.taxonomy(op, workers=_workers())
                row["eq_class"] = label.eq.label
                row["bm_class"] = label.bm.kind
        rows.append(row)
    if args.format == "json":
        text = json.dumps(rows, indent=2)
    else:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["lambda_r", "lambda_g", "lambda_b", "degenerate",
                         "k", "eq_class", "bm_class"])
        for row in rows:
            writer.writerow([
                repr(row["lambda_r"]), repr(row["lambda_g"]), repr(row["lambda_b"]),
                int(row["degenerate"]),
                "" if row["k"] is None else repr(row["k"]),
                row["eq_class"] or "", row["bm_class"] or "",
            ])
        text = out.getvalue()
    Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_variants(args: argparse.Namespace) -> int:
    image = imagefiles.read_color_image(args.input)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"original": "original.png", "variants": {}}
    imagefiles.write_image(out_dir / "original.png", image)
    for spec, op in families.case_study_grid():
        filename = f"{spec.name}.png"
        imagefiles.write_image(out_dir / filename, apply_image(op, image))
        manifest["variants"][spec.name] = {
            "file": filename,
            "fixed_channel": spec.fixed_channel,
            "fixed_value": spec.fixed_value,
            "k": spec.k,
            "lambda_r": op.lambda_r,
            "lambda_g": op.lambda_g,
            "lambda_b": op.lambda_b,
        }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2),
                                           encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graymode", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="decolorize an image")
    p.add_argument("input")
    _add_operator_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("reference", help="emit a reference image")
    p.add_argument("--layout", choices=["1d", "2d"], required=True)
    p.add_argument("--replicate", type=int, default=1,
                   help="rows to stack in the 1D layout")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reference)

    p = sub.add_parser("analyze", help="compute and export EQ/BM modes")
    _add_operator_flags(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("grid", help="enumerate candidate weight triples")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--values", help="explicit comma-separated value set")
    p.add_argument("--interior", action="store_true",
                   help="drop degenerate triples containing 0 or 1")
    p.add_argument("--no-classify", dest="classify", action="store_false",
                   help="skip the full-cube taxonomy pass per candidate")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("variants", help="write the 17 case-study variants")
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_variants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:       # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"graymode: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (families.InfeasibleMemberError, classify.UnclassifiableError,
            EmptyImageError) as exc:
        print(f"graymode: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"graymode: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"graymode: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
