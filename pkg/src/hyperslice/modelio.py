"""Durable text formats for complexes and meshes.

Model files (extension ``.hsl``) are line-oriented ASCII: a small header,
one ``v`` line per vertex with 17 significant digits (doubles round-trip
bit-exactly), and one ``tet`` line per tetrahedron with optional ``vel``
and ``org`` vector indices. Reading does not re-merge vertices: the file
is authoritative.

Meshes export to Wavefront OBJ (``v``/``f`` lines, 1-based, winding as
stored) or to the JSON wire shape consumed by the viewer and the service.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO

import numpy as np

from .ndvec import AXIS_NAMES, ActiveAxes, axis_index
from .simplicial import Complex3, TriMesh, VertexPool

FORMAT_LINE = "#hyperslice v1"
MESH_FORMAT = "hyperslice-mesh/1"


class ParseError(ValueError):
    """Malformed model file; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class IndexOutOfRange(ParseError):
    """A tetrahedron record references a vertex that does not exist."""


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def write_model(cx: Complex3, destination) -> None:
    """Serialize a complex; deterministic (pool order, tet order)."""
    own = isinstance(destination, (str, Path))
    fh: IO[str] = open(destination, "w") if own else destination
    try:
        fh.write(FORMAT_LINE + "\n")
        if cx.name:
            fh.write(f"name {cx.name}\n")
        fh.write("axes " + " ".join(AXIS_NAMES[i] for i in cx.axes) + "\n")
        fh.write(f"fclose {_g17(cx.pool.fclose)}\n")
        fh.write("color " + " ".join(_g17(c) for c in cx.color) + "\n")
        if cx.time_extent is not None:
            fh.write(f"textent {_g17(cx.time_extent[0])} {_g17(cx.time_extent[1])}\n")
        arr = cx.pool.as_array()
        for row in arr:
            fh.write("v " + " ".join(_g17(c) for c in row) + "\n")
        for i in range(cx.num_tets):
            parts = ["tet"] + [str(int(k)) for k in cx.tets[i]]
            if cx.velocity_idx[i] >= 0:
                parts += ["vel", str(int(cx.velocity_idx[i]))]
            if cx.origin_idx[i] >= 0:
                parts += ["org", str(int(cx.origin_idx[i]))]
            fh.write(" ".join(parts) + "\n")
    finally:
        if own:
            fh.close()


def read_model(source) -> Complex3:
    """Parse a model file into a frozen Complex3.

    Vertices are loaded without re-merging; indices are validated.
    Raises ParseError (with the offending line number) or IndexOutOfRange.
    """
    own = isinstance(source, (str, Path))
    fh: IO[str] = open(source) if own else source
    try:
        lines = fh.read().splitlines()
    finally:
        if own:
            fh.close()

    if not lines or lines[0].strip() != FORMAT_LINE:
        raise ParseError(1, f"missing header {FORMAT_LINE!r}")

    name = ""
    axes = None
    fclose = None
    color = None
    textent = None
    verts: list[list[float]] = []
    tets: list[tuple[int, int, int, int]] = []
    vels: list[int] = []
    orgs: list[int] = []
    tet_lines: list[int] = []

    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        kind, rest = tok[0], tok[1:]
        try:
            if kind == "name":
                name = line[len("name"):].strip()
            elif kind == "axes":
                axes = ActiveAxes(sorted(axis_index(a) for a in rest))
            elif kind == "fclose":
                fclose = float(rest[0])
            elif kind == "color":
                if len(rest) != 4:
                    raise ValueError("color needs 4 components")
                color = tuple(float(c) for c in rest)
            elif kind == "textent":
                if len(rest) != 2:
                    raise ValueError("textent needs 2 values")
                textent = (float(rest[0]), float(rest[1]))
            elif kind == "v":
                if len(rest) != 7:
                    raise ValueError(f"vertex needs 7 components, got {len(rest)}")
                verts.append([float(c) for c in rest])
            elif kind == "tet":
                if len(rest) < 4:
                    raise ValueError("tet needs 4 vertex indices")
                idx = tuple(int(c) for c in rest[:4])
                vel = org = -1
                extra = rest[4:]
                while extra:
                    if extra[0] == "vel" and len(extra) >= 2:
                        vel = int(extra[1])
                    elif extra[0] == "org" and len(extra) >= 2:
                        org = int(extra[1])
                    else:
                        raise ValueError(f"unknown tet field {extra[0]!r}")
                    extra = extra[2:]
                tets.append(idx)
                vels.append(vel)
                orgs.append(org)
                tet_lines.append(ln)
            else:
                raise ValueError(f"unknown record {kind!r}")
        except (ValueError, IndexError) as exc:
            raise ParseError(ln, str(exc)) from None

    if axes is None:
        raise ParseError(len(lines), "missing 'axes' header")
    nv = len(verts)
    for (idx, vel, org, ln) in zip(tets, vels, orgs, tet_lines):
        for k in idx:
            if not 0 <= k < nv:
                raise IndexOutOfRange(
                    ln, f"vertex index {k} out of range (have {nv})")
        for k in (vel, org):
            if k != -1 and not 0 <= k < nv:
                raise IndexOutOfRange(
                    ln, f"vector index {k} out of range (have {nv})")
    pool = VertexPool(fclose=fclose if fclose is not None else 0.0)
    if verts:
        pool.extend_unchecked(np.array(verts, dtype=np.float64))
    kwargs = {}
    if color is not None:
        kwargs["color"] = color
    return Complex3(pool, np.array(tets, dtype=np.int64).reshape(-1, 4),
                    axes=axes, name=name, time_extent=textent,
                    velocity_idx=np.array(vels, dtype=np.int64),
                    origin_idx=np.array(orgs, dtype=np.int64), **kwargs)


# -- mesh export -----------------------------------------------------------


def mesh_to_dict(m: TriMesh) -> dict:
    """The JSON wire shape: positions, triangle indices, per-triangle
    normals and colors (plus flags when any triangle is flagged)."""
    out = {
        "format": MESH_FORMAT,
        "points": np.ascontiguousarray(m.points3()).tolist(),
        "triangles": m.triangles.tolist(),
        "normals": m.normals.tolist(),
        "colors": m.colors.tolist(),
    }
    if bool(m.flags.any()):
        out["flags"] = m.flags.tolist()
    return out


def mesh_from_dict(d: dict) -> TriMesh:
    if d.get("format") != MESH_FORMAT:
        raise ValueError(f"not a {MESH_FORMAT} payload")
    pts = np.asarray(d["points"], dtype=np.float64).reshape(-1, 3)
    rows = np.zeros((len(pts), 7))
    rows[:, 1:4] = pts
    pool = VertexPool()
    pool.extend_unchecked(rows)
    tris = np.asarray(d["triangles"], dtype=np.int64).reshape(-1, 3)
    normals = np.asarray(d["normals"], dtype=np.float64).reshape(-1, 3)
    colors = np.asarray(d["colors"], dtype=np.float64).reshape(-1, 4)
    flags = np.asarray(d["flags"], dtype=bool) if "flags" in d else None
    return TriMesh(pool, tris, normals, colors, flags=flags)


def export_mesh(m: TriMesh, fmt: str, destination) -> None:
    """Write a mesh as ``obj`` or ``json``."""
    own = isinstance(destination, (str, Path))
    fh: IO[str] = open(destination, "w") if own else destination
    try:
        if fmt == "obj":
            fh.write("# hyperslice mesh\n")
            for row in m.points3():
                fh.write("v " + " ".join(_g17(c) for c in row) + "\n")
            for tr in m.triangles:
                fh.write(f"f {tr[0] + 1} {tr[1] + 1} {tr[2] + 1}\n")
        elif fmt == "json":
            json.dump(mesh_to_dict(m), fh, separators=(",", ":"))
        else:
            raise ValueError(f"unknown mesh format {fmt!r}")
    finally:
        if own:
            fh.close()


def export_wireframe_obj(points3: np.ndarray, edges: np.ndarray,
                         destination) -> None:
    """Write projected points plus ``l`` records (1-based edge list)."""
    own = isinstance(destination, (str, Path))
    fh: IO[str] = open(destination, "w") if own else destination
    try:
        fh.write("# hyperslice wireframe projection\n")
        for row in points3:
            fh.write("v " + " ".join(_g17(c) for c in row) + "\n")
        for a, b in edges:
            fh.write(f"l {int(a) + 1} {int(b) + 1}\n")
    finally:
        if own:
            fh.close()
