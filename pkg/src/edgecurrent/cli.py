"""``edgecurrent`` command line: match polygons or curve sets, write reports."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import InputError, read_curves, read_polygon, write_em_csv, write_report
from .match import (
    ConfigError,
    MatchConfig,
    distance_from_prepared,
    match_fields,
    prepare_curves,
    prepare_polygon,
)
from .raster import GeometryError, build_grid_spec
from .render import OUTPUT_FILES, render_panels
from .smooth import DEFAULT_PEAK_DIVISOR, DEFAULT_SIGMA, DEFAULT_SIZE

EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_OUTPUT = 4

OUTPUTS = ("report", "fields_image", "smoothed_image", "match_image", "em_csv")


def _peak_divisor(text: str) -> float | None:
    if text == "center":
        return None
    return float(text)


def _emit(text: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in OUTPUTS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown output(s) {bad}; choose from {OUTPUTS}")
    return items


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", choices=("oriented", "unoriented"), default="oriented")
    common.add_argument("--kernel-size", type=int, default=DEFAULT_SIZE)
    common.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    common.add_argument(
        "--peak-divisor",
        type=_peak_divisor,
        default=DEFAULT_PEAK_DIVISOR,
        help="kernel divisor, or 'center' to divide by the exact centre weight",
    )
    common.add_argument("--margin", type=int, default=5)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument(
        "--emit",
        type=_emit,
        default=["report"],
        help="comma-separated subset of " + ",".join(OUTPUTS),
    )

    parser = argparse.ArgumentParser(
        prog="edgecurrent",
        description="Edge-matching score between polygons or oriented curve sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("match", "score two polygons (vertex CSV or JSON)"),
        ("curve-match", "score two curve sets (curve JSON)"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--p1", type=Path, required=True)
        p.add_argument("--p2", type=Path, required=True)
        p.add_argument("--distance", action="store_true", help="also report d(P1, P2)")
    p = sub.add_parser("self", parents=[common], help="self-score E(P, P) of one polygon")
    p.add_argument("--p1", type=Path, required=True)
    return parser


def run_match(args: argparse.Namespace) -> int:
    try:
        cfg = MatchConfig(
            kernel_size=args.kernel_size,
            sigma=args.sigma,
            peak_divisor=args.peak_divisor,
            margin=args.margin,
            variant=args.variant,
        )
    except ConfigError as exc:
        print(f"edgecurrent: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "curve-match":
            a, b = read_curves(args.p1), read_curves(args.p2)
            prepare = prepare_curves
        elif args.command == "self":
            a = b = read_polygon(args.p1)
            prepare = prepare_polygon
        else:
            a, b = read_polygon(args.p1), read_polygon(args.p2)
            prepare = prepare_polygon
        grid = build_grid_spec(a, b, margin=cfg.margin)
        kern = cfg.kernel()
        s1 = prepare(a, grid, cfg, kern)
        s2 = s1 if b is a else prepare(b, grid, cfg, kern)
    except (InputError, GeometryError) as exc:
        print(f"edgecurrent: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT

    result = match_fields(s1.smoothed, s2.smoothed)
    warnings = []
    for label, s in (("p1", s1), ("p2", s2)):
        if s.mask is not None and s.mask.degenerate:
            warnings.append(f"{label} is degenerate (zero area); its grid is empty")
    report = {
        "command": args.command,
        "inputs": [str(args.p1)] + ([str(args.p2)] if args.command != "self" else []),
        "score": result.score,
        "grid": {"I": grid.I, "J": grid.J, "margin": grid.margin},
        "em_dims": list(result.em.shape),
        "config": cfg.to_dict(),
        "distance": None,
    }
    if getattr(args, "distance", False):
        dist = distance_from_prepared(s1, s2)
        report["distance"] = {"d": dist.d, "e11": dist.e11, "e22": dist.e22, "e12": dist.e12}
        if dist.negative:
            warnings.append("distance is negative")

    try:
        args.out.mkdir(parents=True, exist_ok=True)
        images = [o for o in args.emit if o in OUTPUT_FILES]
        report["panel_max"] = render_panels(result, (s1, s2), images, args.out, kern.radius)
        if "em_csv" in args.emit:
            write_em_csv(args.out / "em.csv", result.em)
        report["warnings"] = warnings
        if "report" in args.emit:
            write_report(args.out / "report.json", report)
    except OSError as exc:
        print(f"edgecurrent: cannot write outputs to {args.out}: {exc}", file=sys.stderr)
        return EXIT_OUTPUT

    for w in warnings:
        print(f"edgecurrent: warning: {w}", file=sys.stderr)
    print(f"score={result.score:.12g}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run_match(args)


if __name__ == "__main__":
    sys.exit(main())
