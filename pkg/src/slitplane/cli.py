"""Command-line entry point for reproducible runs.

Every JSON output embeds its resolved configuration under ``config`` so a
run can be reproduced bytewise from its own record.  Seeds default to 0
rather than entropy.  Exit codes: 0 success, 1 usage error, 2 geometric or
expansion failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .balls import ball_complex, injectivity_radius
from .errors import SlitplaneError
from .explorer import (ball_area, metric_ball_singularities, visible_atlas,
                       visible_singularities)
from .flatcomplex import LocatedPoint
from .origami import (SquareTiledSurface, build_sts, parse_cycles,
                      print_cycles, random_sts)
from .plane import PLANTED_INDEX, TruncatedPlane, sample_plane
from .render import render_atlas_svg
from .stats import mc_nearest_distance, mc_visible_count
from .rngstream import Stream, derive_seed


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(document: dict, path: str | None) -> None:
    text = json.dumps(document, sort_keys=True, separators=(",", ":")) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_plane(path: str) -> TruncatedPlane:
    with open(path) as fh:
        return TruncatedPlane.from_json(fh.read())


def _load_sts(path: str) -> SquareTiledSurface:
    with open(path) as fh:
        return SquareTiledSurface.from_json(fh.read())


def _viewpoint(plane: TruncatedPlane, spec: str) -> LocatedPoint:
    if spec == "root":
        return plane.basepoint()
    path = tuple(int(tok) for tok in spec.split(",") if tok != "")
    if path not in set(plane.iter_cone_points()):
        raise UsageError(f"no cone point at path {path}")
    return plane.locate_cone(path)


def build_parser() -> _Parser:
    parser = _Parser(prog="slitplane",
                     description="Poisson translation planes and square-tiled "
                                 "surfaces: sampling, visibility, distances, "
                                 "and Monte Carlo checks of their local laws.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a truncated Poisson plane to JSON")
    p.add_argument("--lambda", dest="intensity", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant", choices=["none", "uniform"], default="none",
                   help="optionally plant one extra root point uniform in the unit disk")
    p.add_argument("--out", default="-")

    p = sub.add_parser("visible", help="list visible singularities from a viewpoint")
    p.add_argument("--plane", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--from", dest="viewpoint", default="root",
                   help="'root' or a cone path like '0,1' ('-1' for a planted cone)")
    p.add_argument("--out", default="-")

    p = sub.add_parser("ball", help="metric-ball singularities and QMC ball area")
    p.add_argument("--plane", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--from", dest="viewpoint", default="root")
    p.add_argument("--qmc-points", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("mc", help="run a Monte Carlo experiment")
    p.add_argument("--experiment", choices=["visible-count", "nearest-distance"],
                   required=True)
    p.add_argument("--from", dest="frm", choices=["regular", "singularity"],
                   default="regular")
    p.add_argument("--lambda", dest="intensity", type=float, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--hist-csv", default=None,
                   help="also write the count histogram as CSV (count,frequency)")

    p = sub.add_parser("sts", help="square-tiled surfaces")
    sts_sub = p.add_subparsers(dest="sts_command", required=True)
    b = sts_sub.add_parser("build", help="surface from permutation pair")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--hperm", required=True, help="cycles, e.g. '(1 2)'")
    b.add_argument("--vperm", required=True)
    b.add_argument("--out", default="-")
    r = sts_sub.add_parser("random", help="uniform permutation pair (NOT a natural measure)")
    r.add_argument("--squares", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", default="-")

    p = sub.add_parser("injrad", help="injectivity radius on a square-tiled surface")
    p.add_argument("--sts", required=True)
    p.add_argument("--square", type=int, default=0)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--cone", type=int, default=None, help="cone point id instead of coordinates")
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("render", help="SVG of a visibility atlas")
    p.add_argument("--plane", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--from", dest="viewpoint", default="root")
    p.add_argument("--stroke-scale", type=float, default=1.0)
    p.add_argument("--color-by-depth", action="store_true", default=True)
    p.add_argument("--out", required=True)
    return parser


def _config_of(args: argparse.Namespace) -> dict:
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "sts_command") or value is None:
            continue
        config[key] = value
    config["command"] = args.command
    if getattr(args, "sts_command", None):
        config["sts_command"] = args.sts_command
    return config


def _run(args: argparse.Namespace) -> int:
    config = _config_of(args)
    if args.command == "sample":
        planted = None
        if args.plant == "uniform":
            stream = Stream(args.seed, (), "plant")
            r = math.sqrt(stream.uniform())
            phi = stream.angle()
            planted = r * complex(math.cos(phi), math.sin(phi))
        plane = sample_plane(args.seed, args.intensity, args.radius, planted=planted)
        doc = plane.to_document()
        doc["config"] = config
        _emit(doc, args.out)
        return 0

    if args.command == "visible":
        plane = _load_plane(args.plane)
        point = _viewpoint(plane, args.viewpoint)
        found = visible_singularities(plane, point, args.radius)
        _emit({
            "format_version": 1,
            "kind": "visible_singularities",
            "config": config,
            "count": len(found),
            "singularities": [
                {"cone": list(v.cone), "holonomy": [v.holonomy.real, v.holonomy.imag],
                 "distance": v.distance} for v in found],
        }, args.out)
        return 0

    if args.command == "ball":
        plane = _load_plane(args.plane)
        point = _viewpoint(plane, args.viewpoint)
        in_ball = metric_ball_singularities(plane, point, args.radius)
        area, stderr = ball_area(plane, point, args.radius,
                                 n_points=args.qmc_points, seed=args.seed)
        _emit({
            "format_version": 1,
            "kind": "metric_ball",
            "config": config,
            "singularities": [{"cone": list(c), "distance": d} for c, d in in_ball],
            "area_estimate": area,
            "area_standard_error": stderr,
        }, args.out)
        return 0

    if args.command == "mc":
        if args.experiment == "visible-count":
            report = mc_visible_count(args.intensity, args.radius, args.frm,
                                      args.trials, args.seed)
        else:
            report = mc_nearest_distance(args.intensity, args.radius,
                                         args.trials, args.seed)
        doc = report.to_document()
        doc["config"] = config
        _emit(doc, args.out)
        if args.hist_csv:
            _write(report.histogram_csv(), args.hist_csv)
        return 0

    if args.command == "sts":
        if args.sts_command == "build":
            surface = build_sts(parse_cycles(args.hperm, args.n),
                                parse_cycles(args.vperm, args.n))
        else:
            surface = random_sts(args.seed, args.squares)
            sys.stderr.write(
                "note: uniform permutation pairs are an illustrative sampler; "
                "their law is not the natural Lebesgue-class measure on any "
                "stratum\n")
        doc = surface.to_document()
        doc["config"] = config
        _emit(doc, args.out)
        return 0

    if args.command == "injrad":
        surface = _load_sts(args.sts)
        if args.cone is not None:
            point = surface.locate_cone(args.cone)
        else:
            if args.x is None or args.y is None:
                raise UsageError("need --cone or both --x and --y")
            point = LocatedPoint(args.square, complex(args.x, args.y))
        value = injectivity_radius(surface, point, args.rmax)
        _emit({
            "format_version": 1,
            "kind": "injectivity_radius",
            "config": config,
            "injectivity_radius": value,
        }, args.out)
        return 0

    if args.command == "render":
        plane = _load_plane(args.plane)
        point = _viewpoint(plane, args.viewpoint)
        atlas = visible_atlas(plane, point, args.radius)
        _write(render_atlas_svg(atlas, stroke_scale=args.stroke_scale,
                                color_by_depth=args.color_by_depth), args.out)
        return 0

    raise UsageError(f"unknown command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        parser.print_usage(sys.stderr)
        return 1
    except (SlitplaneError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
