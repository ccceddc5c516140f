"""Command line entry point: ``hyproj <command> [options]``.

Exit codes: 0 success, 1 a verified property failed, 2 usage error,
3 numerical error. The worker count for sweeps comes from ``HYPROJ_THREADS``.
"""
import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import experiments, verify
from ._backend import backend_name
from .errors import HyprojError, UsageError
from .fractals import PointCloud, embed_in_ball
from .grassmann import MPlane, plane_seed, sample_haar
from .render import render_svg


def _summary_path(out, suffix=".json"):
    return str(Path(out).with_suffix(suffix))


def cmd_verify(args):
    results = verify.run_all(seed=args.seed, quick=args.quick, use_printed_psi=args.use_printed_psi)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    report = {
        "backend": backend_name(),
        "quick": args.quick,
        "convention": "printed" if args.use_printed_psi else "standard",
        "passed": not failed,
        "failed": failed,
        "suites": [r.as_dict() for r in results],
    }
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    if failed:
        print("failing properties: " + ", ".join(failed))
        return 1
    print("all properties hold")
    return 0


def cmd_marstrand(args):
    rows, summary = experiments.run_marstrand(
        args.ifs, args.m, args.depth, args.num_planes, args.seed,
        deltas=experiments.parse_deltas(args.deltas) if args.deltas else None,
        n=args.n, radius=args.radius, min_count=args.min_count,
        max_fraction=args.max_fraction, offsets=args.offsets,
    )
    experiments.write_csv(rows, summary["m"], args.out)
    experiments.write_summary(summary, args.summary or _summary_path(args.out))
    print(f"ground truth min(m, dim) = {summary['ground_truth']:.6f}")
    print(f"median estimate {summary['median_dim']:.6f}, IQR [{summary['iqr_dim'][0]:.6f}, {summary['iqr_dim'][1]:.6f}]")
    print(f"failed fits {summary['failed_fits']} of {summary['num_planes']}")
    print(summary["footer"])
    return 0


def cmd_besfed(args):
    rows, control, summary = experiments.run_besfed(args.generations, args.num_planes, args.seed, radius=args.radius)
    experiments.write_csv(rows, 1, args.out)
    experiments.write_csv(control, 1, _summary_path(args.out, ".control.csv"))
    experiments.write_summary(summary, args.summary or _summary_path(args.out))
    print(f"median decay ratio {summary['median_decay_ratio']:.4f}")
    print(f"fraction of lines below {summary['decay_threshold']}: {summary['fraction_decay_below_threshold']:.3f}")
    print(f"segment control min ratio (angle < 80 deg): {summary['control_min_ratio']:.4f}")
    for p in summary["slowest_decay_lines"]:
        print(f"  slow line {p['plane_id']:3d} angle {p['angle_to_e1_deg']:7.2f} deg ratio {p['decay_ratio']:.4f}")
    print(summary["footer"])
    return 0


def cmd_interior(args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows, summary = experiments.run_interior(
            args.ifs, args.m, args.depth, args.num_planes, args.seed,
            deltas=experiments.parse_deltas(args.deltas) if args.deltas else None,
            n=args.n, radius=args.radius,
        )
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    experiments.write_csv(rows, summary["m"], args.out)
    experiments.write_summary(summary, args.summary or _summary_path(args.out))
    for delta, stats in summary["by_delta"].items():
        print(f"delta {float(delta):.6g}: median occupancy {stats['median_occupancy']:.3f}, "
              f"fraction >= {summary['occupancy_threshold']}: {stats['fraction_at_or_above_threshold']:.3f}")
    print(summary["footer"])
    return 0


def cmd_cloud(args):
    cloud, dim = experiments.resolve_cloud(args.ifs, args.depth, args.radius)
    cloud.to_csv(args.out)
    print(f"{len(cloud)} points in R^{cloud.n}, source dimension {dim:.6f}")
    return 0


def cmd_render(args):
    if args.input:
        cloud = PointCloud.from_csv(args.input)
        if np.max(np.linalg.norm(cloud.points, axis=1)) >= 0.9:
            cloud = embed_in_ball(cloud, args.radius)
    elif args.ifs:
        cloud, _ = experiments.resolve_cloud(args.ifs, args.depth, args.radius)
    else:
        raise UsageError("render needs --input or --ifs")
    if args.angle is not None:
        a = math.radians(args.angle)
        plane = MPlane(np.array([[math.cos(a)], [math.sin(a)]]))
    else:
        plane = sample_haar(2, 1, np.random.default_rng(plane_seed(args.seed, 0)))
    svg = render_svg(cloud.points, plane, arcs=args.arcs)
    with open(args.svg, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.svg}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="hyproj", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("--quick", action="store_true", help="10%% sample sizes")
    v.add_argument("--use-printed-psi", action="store_true", help="swap the radial profiles (expected to fail)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    def sweep_args(sp, deltas_help):
        sp.add_argument("--ifs", required=True, help="IFS JSON path or builtin spec (cantor_dust:3:1/4, segment:2, ...)")
        sp.add_argument("--n", type=int, help="ambient dimension (checked against the source)")
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--depth", type=int, default=7)
        sp.add_argument("--num-planes", type=int, default=50)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--deltas", help=deltas_help)
        sp.add_argument("--radius", type=float, default=0.5)
        sp.add_argument("--out", required=True)
        sp.add_argument("--summary", help="summary JSON path (default: OUT with .json)")

    m = sub.add_parser("marstrand", help="dimension of projections onto random m-planes")
    sweep_args(m, "scales, e.g. 2^-2..2^-10 (default)")
    m.add_argument("--min-count", type=float, default=8)
    m.add_argument("--max-fraction", type=float, default=0.2)
    m.add_argument("--offsets", type=int, default=1, help="random grid offsets averaged per scale")
    m.set_defaults(func=cmd_marstrand)

    b = sub.add_parser("besfed", help="four-corner covering-measure decay against a segment control")
    b.add_argument("--generations", type=int, default=7)
    b.add_argument("--num-planes", type=int, default=40)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--radius", type=float, default=0.5)
    b.add_argument("--out", required=True)
    b.add_argument("--summary")
    b.set_defaults(func=cmd_besfed)

    i = sub.add_parser("interior", help="central-window occupancy of projections")
    sweep_args(i, "scales (default 2^-3..2^-5)")
    i.set_defaults(func=cmd_interior)

    c = sub.add_parser("cloud", help="export an embedded point cloud as CSV")
    c.add_argument("--ifs", required=True)
    c.add_argument("--depth", type=int, default=6)
    c.add_argument("--radius", type=float, default=0.5)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_cloud)

    r = sub.add_parser("render", help="SVG of a planar cloud and its projection")
    r.add_argument("--input", help="point CSV")
    r.add_argument("--ifs", help="builtin spec or IFS JSON instead of --input")
    r.add_argument("--depth", type=int, default=5)
    r.add_argument("--radius", type=float, default=0.5)
    r.add_argument("--angle", type=float, help="line direction in degrees (default: Haar sample from --seed)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--arcs", type=int, default=8)
    r.add_argument("--svg", required=True)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except HyprojError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
