"""Command-line entry points: generate, slice, sweep, validate, project,
serve.

Exit statuses: 0 success, 1 domain failure (invalid plane, open complex,
degenerate geometry, unknown model), 2 input/parse failure (bad flags,
malformed files, parameter constraint violations).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import generators, modelio, projector
from .ndvec import (BadAxisPair, Hyperplane3Flat, InvalidPlane, PlanePose,
                    VecN, axis_index, axis_plane, pose_to_hyperplane)
from .simplicial import mesh_topology, validate_closed
from .slicer import SliceRequest, slice_complex

MODEL_DIR_ENV = "HYPERSLICE_MODEL_DIR"


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperslice",
                                description="4D/5D tetrahedral slicing engine")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a model file")
    g.add_argument("shape", choices=["3torus", "3sphere"])
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--name", default=None)
    g.add_argument("--delta-ang", type=float, default=math.pi / 4,
                   help="3torus angular step (2*pi must be a multiple)")
    g.add_argument("--radius", type=float, default=None)
    g.add_argument("--tube", type=float, default=2.0)
    g.add_argument("--depth", type=float, default=1.0)
    g.add_argument("--steps", type=int, nargs=3, default=(8, 8, 16),
                   metavar=("CHI", "PHI", "THETA"),
                   help="3sphere angular step counts")
    g.add_argument("--extrude", type=float, nargs=2, default=None,
                   metavar=("TMIN", "TMAX"),
                   help="extrude the model along t over [TMIN, TMAX]")

    s = sub.add_parser("slice", help="slice a model with a 3-flat")
    s.add_argument("model")
    s.add_argument("-o", "--output", default=None)
    s.add_argument("--format", choices=["obj", "json"], default=None)
    _add_plane_args(s)
    s.add_argument("--tau", type=float, default=None)
    s.add_argument("--diagnostics", action="store_true",
                   help="per-case diagnostic coloring")
    s.add_argument("--workers", type=int, default=None)

    w = sub.add_parser("sweep", help="slice along an axis sweep")
    w.add_argument("model")
    w.add_argument("--axis", required=True)
    w.add_argument("--start", type=float, required=True)
    w.add_argument("--stop", type=float, required=True)
    w.add_argument("--frames", type=int, required=True)
    w.add_argument("--out-dir", required=True)
    w.add_argument("--format", choices=["obj", "json"], default="obj")
    w.add_argument("--tau", type=float, default=None)
    w.add_argument("--workers", type=int, default=None)

    v = sub.add_parser("validate", help="closedness and statistics report")
    v.add_argument("model")

    pr = sub.add_parser("project", help="axis-drop wireframe projection")
    pr.add_argument("model")
    pr.add_argument("-o", "--output", required=True)
    pr.add_argument("--drop", action="append", required=True,
                    help="axis name to drop (repeat for two)")
    pr.add_argument("--rotate", action="append", nargs=3, default=[],
                    metavar=("I", "J", "RAD"),
                    help="pre-rotation: two axis names and radians")

    sv = sub.add_parser("serve", help="run the slice service")
    sv.add_argument("--model-dir", default=os.environ.get(MODEL_DIR_ENV),
                    help=f"model directory (or ${MODEL_DIR_ENV})")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8732)
    sv.add_argument("--workers", type=int, default=None,
                    help="slicing threads (default: hardware parallelism)")
    sv.add_argument("--ui", default=None,
                    help="directory of built viewer assets to serve at /")
    return p


def _add_plane_args(s: argparse.ArgumentParser) -> None:
    s.add_argument("--plane", default=None, metavar="AXIS=OFFSET",
                   help="axis-aligned plane shorthand, e.g. w=0.5")
    s.add_argument("--anchor", type=float, nargs="+", default=None,
                   help="pose anchor (active coordinates)")
    s.add_argument("--rotate", action="append", nargs=3, default=[],
                   metavar=("I", "J", "RAD"),
                   help="pose rotation: two axis names and radians")
    s.add_argument("--cofactors", type=float, nargs=5, default=None)


def _parse_plane(args, cx) -> Hyperplane3Flat:
    """Build the slice plane from --plane / pose flags / --cofactors."""
    axes = cx.axes
    pose_given = args.anchor is not None or bool(args.rotate)
    n_sources = sum((args.plane is not None, args.cofactors is not None,
                     pose_given))
    if n_sources != 1:
        raise InvalidPlane(
            "give exactly one of --plane, --cofactors, or --anchor/--rotate")
    if args.plane is not None:
        name, _, off = args.plane.partition("=")
        if not _ or not name:
            raise InvalidPlane("--plane expects AXIS=OFFSET, e.g. w=0.5")
        return axis_plane(axis_index(name.strip()), float(off), axes)
    if args.cofactors is not None:
        return Hyperplane3Flat(tuple(args.cofactors), axes)
    anchor = args.anchor if args.anchor is not None else [0.0] * len(axes)
    if len(anchor) != len(axes):
        raise InvalidPlane(f"--anchor needs {len(axes)} values for axes {axes.names}")
    angles = tuple((axis_index(i), axis_index(j), float(t))
                   for i, j, t in args.rotate)
    return pose_to_hyperplane(PlanePose(VecN.from_active(anchor, axes),
                                        angles, axes))


def _print_topology(topo, diags=None) -> None:
    print(f"V={topo.vertices} E={topo.edges} F={topo.faces} "
          f"euler={topo.euler} components={topo.components} "
          f"closed={topo.closed} non_manifold_edges={topo.non_manifold_edges}")
    for i, c in enumerate(topo.per_component):
        genus = c.genus if c.genus is not None else "-"
        print(f"  component {i}: V={c.vertices} E={c.edges} F={c.faces} "
              f"euler={c.euler} closed={c.closed} genus={genus}")
    if diags is not None:
        interesting = {k: v for k, v in diags.counts.items() if v}
        print(f"outcomes: {interesting} coincident_faces={diags.coincident_faces} "
              f"dropped_area={diags.dropped_area}")


def _cmd_generate(args) -> int:
    try:
        if args.shape == "3torus":
            params = generators.TorusParams(
                radius=args.radius if args.radius is not None else 5.0,
                tube=args.tube, depth=args.depth, delta_ang=args.delta_ang)
            cx = generators.make_3torus(params, name=args.name or "3-torus")
        else:
            params = generators.SphereParams(
                radius=args.radius if args.radius is not None else 1.0,
                steps=tuple(args.steps))
            cx = generators.make_3sphere(params, name=args.name or "3-sphere")
    except ValueError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except generators.DegenerateCell as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.extrude is not None:
        cx = generators.extrude_along_t(
            cx, generators.ExtrudeParams(t_min=args.extrude[0],
                                         t_max=args.extrude[1]))
    modelio.write_model(cx, args.output)
    rep = validate_closed(cx)
    print(f"wrote {args.output}: {cx.num_tets} tets, "
          f"{rep.vertex_count} vertices "
          f"(ratio {rep.vertex_tet_ratio:.3f}), closed={rep.is_closed}")
    return 0 if rep.is_closed else 1


def _load_model(path: str):
    try:
        return modelio.read_model(path), 0
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, 2
    except modelio.ParseError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None, 2


def _cmd_slice(args) -> int:
    cx, rc = _load_model(args.model)
    if cx is None:
        return rc
    try:
        plane = _parse_plane(args, cx)
        req = SliceRequest(plane, tau=args.tau, diagnostics=args.diagnostics)
        mesh, diags = slice_complex(req, cx, workers=args.workers)
    except (InvalidPlane, BadAxisPair, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    topo = mesh_topology(mesh)
    _print_topology(topo, diags)
    if args.output:
        fmt = args.format or ("json" if args.output.endswith(".json") else "obj")
        modelio.export_mesh(mesh, fmt, args.output)
        print(f"wrote {args.output}")
    return 0


def _cmd_sweep(args) -> int:
    if args.frames < 1:
        print("error: --frames must be >= 1", file=sys.stderr)
        return 2
    cx, rc = _load_model(args.model)
    if cx is None:
        return rc
    try:
        axis = axis_index(args.axis)
        if axis not in cx.axes:
            raise InvalidPlane(f"axis {args.axis} not active in {cx.axes.names}")
    except (BadAxisPair, InvalidPlane) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    offsets = np.linspace(args.start, args.stop, args.frames)
    print(f"{'frame':>5} {'offset':>10} {'V':>7} {'F':>7} {'euler':>6} "
          f"{'components':>10} {'closed':>6}")
    for i, off in enumerate(offsets):
        plane = axis_plane(axis, float(off), cx.axes)
        try:
            mesh, _ = slice_complex(SliceRequest(plane, tau=args.tau), cx,
                                    workers=args.workers)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        topo = mesh_topology(mesh)
        path = out_dir / f"frame_{i:03d}.{args.format}"
        modelio.export_mesh(mesh, args.format, path)
        print(f"{i:>5} {off:>10.4f} {topo.vertices:>7} {topo.faces:>7} "
              f"{topo.euler:>6} {topo.components:>10} {str(topo.closed):>6}")
    return 0


def _cmd_validate(args) -> int:
    cx, rc = _load_model(args.model)
    if cx is None:
        return rc
    rep = validate_closed(cx)
    print(f"{args.model}: tets={rep.tet_count} vertices={rep.vertex_count} "
          f"faces={rep.face_count} vertex:tet ratio={rep.vertex_tet_ratio:.3f}")
    print(f"closed={rep.is_closed} boundary_faces={rep.boundary_faces} "
          f"overshared_faces={rep.overshared_faces}")
    return 0 if rep.is_closed else 1


def _cmd_project(args) -> int:
    cx, rc = _load_model(args.model)
    if cx is None:
        return rc
    try:
        drop = tuple(axis_index(a) for a in args.drop)
        rots = tuple((axis_index(i), axis_index(j), float(t))
                     for i, j, t in args.rotate)
        view = projector.ViewSpec(drop, rots, label="cli")
        ref = cx.referenced_vertices()
        pts = projector.project(cx.pool.as_array()[ref], view, cx.axes)
    except (projector.BadViewSpec, BadAxisPair) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    remap = {int(v): i for i, v in enumerate(ref)}
    e = np.concatenate([cx.tets[:, [a, b]]
                        for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))])
    e = np.unique(np.sort(e, axis=1), axis=0)
    edges = np.array([[remap[int(a)], remap[int(b)]] for a, b in e])
    modelio.export_wireframe_obj(pts, edges, args.output)
    print(f"wrote {args.output}: {len(pts)} points, {len(edges)} edges")
    return 0


def _cmd_serve(args) -> int:
    if not args.model_dir:
        print(f"error: give --model-dir or set ${MODEL_DIR_ENV}", file=sys.stderr)
        return 2
    try:
        from .service import create_app
        app = create_app(args.model_dir, workers=args.workers, ui_dir=args.ui)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    import uvicorn
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit 2
        return int(exc.code or 0)
    handlers = {
        "generate": _cmd_generate,
        "slice": _cmd_slice,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "project": _cmd_project,
        "serve": _cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
