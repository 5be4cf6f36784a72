"""Command line interface.

Subcommands: cover, build, sample, check, probe.  Exit codes: 0 for
success (all checks passed, discontinuity certified), 1 for a completed
run whose checks failed or found no violation, 2 for invalid input or
usage, 3 for a failed construction stage.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import InputError, PipelineError, WitnessNotFoundError
from .generators import GENERATOR_KINDS, GeneratorSpec, generate_points
from .geometry import DEFAULT_COVER_HALF_ANGLE, build_sphere_cover
from .harness import (
    BUILTIN_FIELDS,
    DEFAULT_EPSILON,
    DEFAULT_MIN_WITNESSES,
    ScalarField,
    certify_discontinuity,
    derive_witness,
    field_from_expression,
    get_builtin_field,
)
from .mollifier import log_grid, sample_path
from .pathfile import (
    atomic_write_text,
    load_build,
    load_witness,
    probe_to_json,
    reports_to_json,
    samples_to_csv,
    save_build,
    tail_to_csv,
)
from .pipeline import build_path
from .skeleton import WitnessSequence
from .verifier import SUITE_NAMES, run_checks

_DEFAULT_HALF_ANGLE_DEG = math.degrees(DEFAULT_COVER_HALF_ANGLE)


def _parse_field(spec: str) -> ScalarField:
    if spec.startswith("builtin:"):
        return get_builtin_field(spec[len("builtin:"):])
    if spec.startswith("expr:"):
        return field_from_expression(spec[len("expr:"):])
    if spec in BUILTIN_FIELDS:
        return get_builtin_field(spec)
    return field_from_expression(spec)


# ---- subcommands --------------------------------------------------------


def cmd_cover(args: argparse.Namespace) -> int:
    half_angle = math.radians(args.half_angle_deg)
    cover = build_sphere_cover(args.dimension, half_angle, seed=args.seed)
    document = {
        "dimension": cover.dimension,
        "half_angle_deg": math.degrees(cover.half_angle),
        "directions": [[float(v) for v in row] for row in cover.directions],
    }
    text = json.dumps(document, indent=2) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        print(f"cover: {cover.size} directions in dimension {cover.dimension} -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    witness = load_witness(args.witness)
    build = build_path(
        witness,
        k_max=args.k_max,
        half_angle=math.radians(args.half_angle_deg),
        seed=args.seed,
    )
    save_build(args.out, build)
    lo, hi = build.path.domain
    print(
        f"build: {len(build.anchors.matched)} matched anchors of {args.k_max}, "
        f"parity {build.parity}, domain ({lo:.6g}, {hi:.6g}] -> {args.out}"
    )
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    build = load_build(args.path)
    lo, hi = build.path.domain
    t_min = args.t_min if args.t_min is not None else np.nextafter(lo, hi)
    t_max = args.t_max if args.t_max is not None else hi
    if not (lo < t_min <= t_max <= hi):
        raise InputError(
            f"sampling range [{t_min!r}, {t_max!r}] must lie inside ({lo!r}, {hi!r}]"
        )
    if args.points < 1:
        raise InputError("sampling grid is empty")
    if args.points == 1:
        grid = np.array([t_max])
    elif args.grid == "log":
        grid = log_grid(t_min, t_max, args.points)
    else:
        grid = np.linspace(t_min, t_max, args.points)
    rows = sample_path(build.path, grid)
    atomic_write_text(args.out, samples_to_csv(rows, build.path.dimension))
    print(f"sample: {len(rows)} rows ({args.grid} grid) -> {args.out}")
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    build = load_build(args.path)
    if args.suite == "all":
        names = SUITE_NAMES
    else:
        names = tuple(part.strip() for part in args.suite.split(",") if part.strip())
        if not names:
            raise InputError("no checks selected")
    reports = run_checks(
        build.path,
        build.anchors,
        names,
        seed=args.seed,
        restricted=args.restricted,
        per_decade=args.per_decade,
        per_window=args.per_window,
        trials=args.trials,
    )
    if args.out:
        atomic_write_text(args.out, reports_to_json(reports))
    for report in reports:
        status = "PASS" if report.passed else "FAIL"
        print(
            f"check {report.name}: {status} measured={report.measured:.6g} "
            f"threshold={report.threshold:.6g}"
        )
    return 0 if all(r.passed for r in reports) else 1


def cmd_probe(args: argparse.Namespace) -> int:
    field = _parse_field(args.field)
    epsilon = args.epsilon if args.epsilon is not None else DEFAULT_EPSILON
    if args.witness:
        witness = load_witness(args.witness)
    else:
        spec = GeneratorSpec(
            kind=args.generator,
            dimension=field.dimension,
            count=args.count,
            start=args.start,
            stop=args.stop,
            axis=tuple(float(v) for v in args.axis.split(",")) if args.axis else None,
        )
        try:
            witness = derive_witness(
                field, spec, epsilon=epsilon, min_count=args.min_witnesses
            )
        except WitnessNotFoundError as exc:
            print(f"probe: {exc}; falling back to the unfiltered sequence", file=sys.stderr)
            witness = WitnessSequence.ingest(generate_points(spec))
    report, build = certify_discontinuity(
        field,
        witness,
        k_max=args.k_max,
        epsilon=epsilon,
        seed=args.seed,
        extra_deltas=args.tail_delta or (),
    )
    if args.out:
        atomic_write_text(args.out, probe_to_json(report))
    if args.tail_csv:
        atomic_write_text(args.tail_csv, tail_to_csv(report))
    if args.path_out:
        save_build(args.path_out, build)
    print(
        f"probe {field.name}: {report.verdict} "
        f"limsup~{report.limsup_estimate:.6g} epsilon={report.epsilon:.6g}"
    )
    return 0 if report.certified else 1


# ---- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathcert",
        description=(
            "Build smooth bounded-speed paths through prescribed point and "
            "derivative data, verify their bounds, and probe scalar fields "
            "for discontinuities at the origin."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cover", help="emit a sphere cover as JSON")
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--half-angle-deg", type=float, default=_DEFAULT_HALF_ANGLE_DEG)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("build", help="build a smooth path from witness data")
    p.add_argument("--witness", required=True, help="witness JSON file")
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--half-angle-deg", type=float, default=_DEFAULT_HALF_ANGLE_DEG)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="path JSON output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="sample a built path to CSV")
    p.add_argument("--path", required=True, help="path JSON file")
    p.add_argument("--out", required=True, help="CSV output")
    p.add_argument("--grid", choices=("log", "uniform"), default="log")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("check", help="run certification checks on a built path")
    p.add_argument("--path", required=True, help="path JSON file")
    p.add_argument(
        "--suite",
        default="all",
        help=f"comma separated subset of: {', '.join(SUITE_NAMES)} (default all)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restricted", action="store_true",
                   help="witness data stays near the cone axis: enforce the 28 bounds")
    p.add_argument("--per-decade", type=int, default=2048)
    p.add_argument("--per-window", type=int, default=64)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None, help="report JSON output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("probe", help="probe a scalar field for a discontinuity")
    p.add_argument(
        "--field",
        required=True,
        help="builtin:<name>, expr:<expression>, or a bare builtin name/expression",
    )
    p.add_argument("--witness", default=None, help="witness JSON file (skips generation)")
    p.add_argument("--generator", choices=GENERATOR_KINDS, default="spiral")
    p.add_argument("--count", type=int, default=GeneratorSpec.count)
    p.add_argument("--start", type=float, default=GeneratorSpec.start)
    p.add_argument("--stop", type=float, default=GeneratorSpec.stop)
    p.add_argument("--axis", default=None, help="comma separated ray axis")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--min-witnesses", type=int, default=DEFAULT_MIN_WITNESSES)
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tail-delta", type=float, action="append",
                   help="extra tail radius for the profile (repeatable)")
    p.add_argument("--out", default=None, help="probe report JSON output")
    p.add_argument("--tail-csv", default=None, help="tail profile CSV output")
    p.add_argument("--path-out", default=None, help="also save the built path JSON")
    p.set_defaults(func=cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WitnessNotFoundError as exc:
        print(f"probe: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
