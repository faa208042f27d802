"""Intersect a 3-flat with every tetrahedron of a complex.

The kernel tests the six edges of each tetrahedron against the plane and
assembles the 3-or-4 crossing points into one or two triangles. Crossing
points are keyed by their parent complex edge, so adjacent tetrahedra share
mesh vertices exactly; tetrahedra touching the plane with a vertex (or
lying in it) take a scalar degenerate path whose points merge into the same
output pool within fclose.

Winding is made globally consistent by orienting each triangle against its
parent tet's outward 4D normal projected into the slicing frame (the
complex's tet orientation is computed once and cached), which also makes
every closed component's signed volume positive and its normals outward.

The tetrahedron sweep can be partitioned across worker threads; results are
merged in tetrahedron-index order, so output is bit-identical for any
worker count.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ndvec import (EPS_DIR, EPS_PLANE, EPS_S, Hyperplane3Flat, InvalidPlane,
                    VecN, add, blend, dot5, scale)
from .simplicial import Complex3, TriMesh, VertexPool

AREA_FLOOR = 1e-12

# The six tetrahedron edges in the order A..G of the classic case analysis.
EDGE_TABLE = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# Diagnostic colors: 3-case, 4-case split pair, degenerate edge, 5+/flagged.
COLOR_TRI = (0.55, 0.25, 0.85, 1.0)     # purple
COLOR_QUAD_A = (0.25, 0.45, 0.90, 1.0)  # blue
COLOR_QUAD_B = (0.30, 0.80, 0.40, 1.0)  # green
COLOR_EDGE = (0.60, 1.00, 0.80, 1.0)    # mint
COLOR_FLAG = (0.90, 0.20, 0.20, 1.0)    # red


class CollinearPoints(ValueError):
    """Triangle normal requested for collinear points."""


class EdgeStatus(enum.Enum):
    NONE = "none"
    CROSSING = "crossing"
    CONTAINED = "contained"


@dataclass(frozen=True)
class EdgeHit:
    """Outcome of intersecting one edge with the plane."""

    status: EdgeStatus
    point: VecN | None = None
    s: float | None = None


class OutcomeKind(enum.Enum):
    EMPTY = "empty"
    POINT = "point"
    EDGE = "edge"
    TRIANGLE = "triangle"
    QUAD = "quad"
    DEGENERATE_FACE = "degenerate_face"
    CONTAINED = "contained"


@dataclass(frozen=True)
class TetSliceOutcome:
    """Per-tetrahedron slice result.

    ``triangles`` holds 1 triple (TRIANGLE) or 2 triples sharing an edge
    (QUAD) of output-pool indices; every other kind carries none.
    DEGENERATE_FACE carries the coincident face as sorted complex vertex
    ids in ``face`` (or ``face=None`` for the never-observed 5+ case,
    which is counted but not triangulated).
    """

    kind: OutcomeKind
    triangles: tuple[tuple[int, int, int], ...] = ()
    face: tuple[int, int, int] | None = None
    point_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class SliceRequest:
    """Plane plus options for slicing one complex.

    ``tau`` must be present exactly when the complex carries velocities;
    ``diagnostics`` enables per-case coloring; ``view``, when given,
    replaces the plane-frame projection of the intersection points with an
    axis-drop projection (see projector.ViewSpec).
    """

    plane: Hyperplane3Flat
    tau: float | None = None
    diagnostics: bool = False
    view: object | None = None


@dataclass
class SliceDiagnostics:
    """Counts per outcome kind plus degenerate-case bookkeeping."""

    counts: dict[str, int] = field(default_factory=lambda: {
        k.value: 0 for k in OutcomeKind})
    five_plus: int = 0
    coincident_faces: int = 0
    dropped_area: int = 0
    out_of_extent: bool = False
    contained_faces: list[tuple[int, int, int]] = field(default_factory=list)


def intersect_edge(plane: Hyperplane3Flat, a: VecN, b: VecN) -> EdgeHit:
    """Intersect segment a-b with the plane.

    n is the incidence of a, d the incidence of the direction b-a; a
    parallel edge (|d| <= eps) is CONTAINED when it lies in the plane and
    NONE otherwise, else s = -n/d gives a CROSSING for s in [0,1] (with
    eps slack, clamped).
    """
    ax = plane.axes
    c = plane.cofactors
    n = dot5(c, (1.0, a[ax[0]], a[ax[1]], a[ax[2]], a[ax[3]]))
    d = dot5(c, (0.0, b[ax[0]] - a[ax[0]], b[ax[1]] - a[ax[1]],
                 b[ax[2]] - a[ax[2]], b[ax[3]] - a[ax[3]]))
    if abs(d) <= EPS_DIR:
        if abs(n) <= EPS_PLANE:
            return EdgeHit(EdgeStatus.CONTAINED)
        return EdgeHit(EdgeStatus.NONE)
    s = -n / d
    if -EPS_S <= s <= 1.0 + EPS_S:
        s = min(1.0, max(0.0, s))
        return EdgeHit(EdgeStatus.CROSSING, blend(a, b, s), s)
    return EdgeHit(EdgeStatus.NONE)


def _identity_store(p: VecN) -> VecN:
    return p


def slice_tet(plane: Hyperplane3Flat, tet, pool: VertexPool,
              out_pool: VertexPool, displacement: VecN | None = None,
              to_stored=None) -> TetSliceOutcome:
    """Slice a single tetrahedron, depositing crossing points in out_pool.

    ``to_stored`` maps a world-space intersection point to the coordinates
    stored in the output pool (the complex slicer passes the plane-frame
    projection; standalone use keeps world coordinates). Distinctness of
    crossing points is judged after pool merging, so a plane through a
    shared vertex yields one point, not three.
    """
    if to_stored is None:
        to_stored = _identity_store
    corners = [pool[i] for i in tet.vert_idx]
    if displacement is not None:
        corners = [add(cnr, displacement) for cnr in corners]
    vals = [plane.signed_incidence(cnr) for cnr in corners]
    on = [abs(v) <= EPS_PLANE for v in vals]
    n_on = sum(on)
    if n_on == 4:
        return TetSliceOutcome(OutcomeKind.CONTAINED)
    if n_on == 3:
        face = tuple(sorted(tet.vert_idx[k] for k in range(4) if on[k]))
        return TetSliceOutcome(OutcomeKind.DEGENERATE_FACE, face=face)

    ids: list[int] = []
    by_edge: dict[tuple[int, int], int] = {}
    for (i, j) in EDGE_TABLE:
        hit = intersect_edge(plane, corners[i], corners[j])
        if hit.status is EdgeStatus.CROSSING:
            sid = out_pool.put_vertex(to_stored(hit.point))
            by_edge[(i, j)] = sid
            if sid not in ids:
                ids.append(sid)
    k = len(ids)
    if k == 0:
        return TetSliceOutcome(OutcomeKind.EMPTY)
    if k == 1:
        return TetSliceOutcome(OutcomeKind.POINT, point_ids=tuple(ids))
    if k == 2:
        return TetSliceOutcome(OutcomeKind.EDGE, point_ids=tuple(ids))
    if k == 3:
        return TetSliceOutcome(OutcomeKind.TRIANGLE, (tuple(ids),),
                               point_ids=tuple(ids))
    if k == 4:
        # clean 2-2 split (on-plane corners never reach k == 4): order the
        # quad cycle through the tet faces: (ac, ad, bd, bc)
        neg = [p for p in range(4) if vals[p] < 0.0]
        pos = [p for p in range(4) if p not in neg]
        a, b = neg
        cc, dd = pos
        def eid(p, q):
            return by_edge[(p, q) if p < q else (q, p)]
        q0, q1, q2, q3 = eid(a, cc), eid(a, dd), eid(b, dd), eid(b, cc)
        return TetSliceOutcome(OutcomeKind.QUAD,
                               ((q0, q1, q2), (q0, q2, q3)),
                               point_ids=(q0, q1, q2, q3))
    return TetSliceOutcome(OutcomeKind.DEGENERATE_FACE, point_ids=tuple(ids))


def triangle_normal_and_frame(plane: Hyperplane3Flat, p0: VecN, p1: VecN,
                              p2: VecN) -> np.ndarray:
    """Unit normal of a triangle expressed in the plane's 3D frame.

    Raises CollinearPoints below the area floor. The frame comes from the
    canonical (normalized) cofactors, so rescaled planes give the same
    normal.
    """
    pts = np.array([[p[i] for i in plane.axes] for p in (p0, p1, p2)])
    q = plane.to_frame(pts)
    cr = np.cross(q[1] - q[0], q[2] - q[0])
    nrm = float(np.linalg.norm(cr))
    if nrm <= 2.0 * AREA_FLOOR:
        raise CollinearPoints("triangle points are collinear")
    return cr / nrm


def _classify_chunk(tets: np.ndarray, vals: np.ndarray, on_vertex: np.ndarray,
                    lo: int, hi: int):
    """Classify tets in [lo, hi): crossing edges per case.

    Returns (tri_edges (a,3,2), tri_rows, quad_edges (b,4,2), quad_rows,
    degen_rows, n_empty) with rows as absolute tet indices; tets touching
    the plane with a vertex land in degen_rows for the scalar path.
    """
    T = tets[lo:hi]
    tv = vals[T]
    cm = ~on_vertex[T].any(axis=1)
    neg = tv < 0.0
    nneg = neg.sum(axis=1)
    crossing = cm & (nneg > 0) & (nneg < 4)
    n_empty = int(cm.sum()) - int(crossing.sum())
    degen_rows = np.nonzero(~cm)[0] + lo

    rows = np.nonzero(crossing)[0]
    Tc = T[rows]
    negc = neg[rows]
    nnegc = nneg[rows]
    tri_m = (nnegc == 1) | (nnegc == 3)
    quad_m = nnegc == 2

    # 1-3 split: three edges from the lone vertex to the others
    Tt = Tc[tri_m]
    lonesel = np.where((nnegc[tri_m] == 1)[:, None], negc[tri_m], ~negc[tri_m])
    lone = np.take_along_axis(Tt, np.argmax(lonesel, axis=1)[:, None], axis=1)
    others = np.take_along_axis(
        Tt, np.argsort(lonesel, axis=1, kind="stable")[:, :3], axis=1)
    tri_edges = np.stack([np.broadcast_to(lone, others.shape), others], axis=2)

    # 2-2 split: edges (ac, ad, bd, bc) with a,b the negatives in position
    # order; this cyclic order is the section quad's boundary through the
    # four tet faces, hence always simple
    Tq = Tc[quad_m]
    nq = negc[quad_m]
    Vq = np.take_along_axis(Tq, np.argsort(~nq, axis=1, kind="stable"), axis=1)
    quad_edges = np.stack([Vq[:, [0, 2]], Vq[:, [0, 3]],
                           Vq[:, [1, 3]], Vq[:, [1, 2]]], axis=1)

    base = rows + lo
    return tri_edges, base[tri_m], quad_edges, base[quad_m], degen_rows, n_empty


def _empty_mesh(cx: Complex3) -> TriMesh:
    return TriMesh(VertexPool(fclose=cx.pool.fclose),
                   np.empty((0, 3), np.int64), np.empty((0, 3)),
                   np.empty((0, 4)))


def slice_complex(req: SliceRequest, cx: Complex3, workers: int | None = 1
                  ) -> tuple[TriMesh, SliceDiagnostics]:
    """Slice a complex with a 3-flat into a merged, oriented TriMesh.

    Output triangles are ordered by source tetrahedron index and the
    result is bit-identical for any worker count. Returns the mesh and
    per-outcome diagnostics.
    """
    plane = req.plane
    if tuple(plane.axes) != tuple(cx.axes):
        raise InvalidPlane(
            f"plane axes {plane.axes.names} do not match complex axes {cx.axes.names}")
    diags = SliceDiagnostics()
    m = cx.num_tets

    has_vel = cx.has_velocities()
    if has_vel and req.tau is None:
        raise ValueError("complex carries velocities: a slice needs tau")
    if not has_vel and req.tau is not None:
        raise ValueError("tau given but the complex carries no velocities")

    displacement: VecN | None = None
    if has_vel:
        ext = cx.time_extent
        if ext is not None and not (ext[0] <= req.tau <= ext[1]):
            diags.counts[OutcomeKind.EMPTY.value] = m
            diags.out_of_extent = True
            return _empty_mesh(cx), diags
        vel = cx.uniform_velocity()
        if vel is None:
            raise NotImplementedError("per-tet heterogeneous velocities")
        displacement = scale(vel, req.tau)

    if m == 0:
        return _empty_mesh(cx), diags

    act = cx.pool.active(cx.axes)
    if displacement is not None:
        act = act + np.array(displacement.active(cx.axes))
    vals = plane.incidence_of(act)
    on_vertex = np.abs(vals) <= EPS_PLANE

    # output coordinate frame: plane frame, or an axis-drop view
    if req.view is not None:
        from .projector import projection_matrix
        fmat = projection_matrix(req.view, cx.axes)[:, list(cx.axes)]
        foff = np.zeros(3)
    else:
        origin, basis = plane.frame()
        fmat, foff = basis, -(basis @ origin)

    nworkers = workers if workers else (os.cpu_count() or 1)
    nworkers = max(1, min(int(nworkers), m))
    if nworkers == 1:
        parts = [_classify_chunk(cx.tets, vals, on_vertex, 0, m)]
    else:
        bounds = [(m * i // nworkers, m * (i + 1) // nworkers)
                  for i in range(nworkers)]
        with ThreadPoolExecutor(nworkers) as ex:
            parts = list(ex.map(
                lambda b: _classify_chunk(cx.tets, vals, on_vertex, b[0], b[1]),
                bounds))

    tri_edges = np.concatenate([p[0] for p in parts])
    tri_rows = np.concatenate([p[1] for p in parts])
    quad_edges = np.concatenate([p[2] for p in parts])
    quad_rows = np.concatenate([p[3] for p in parts])
    degen_rows = np.concatenate([p[4] for p in parts])
    diags.counts[OutcomeKind.EMPTY.value] += sum(p[5] for p in parts)
    diags.counts[OutcomeKind.TRIANGLE.value] += len(tri_rows)
    diags.counts[OutcomeKind.QUAD.value] += len(quad_rows)

    # crossing points, one per distinct complex edge
    nv = cx.num_vertices
    all_e = np.concatenate([tri_edges.reshape(-1, 2), quad_edges.reshape(-1, 2)])
    ekey = (np.minimum(all_e[:, 0], all_e[:, 1]).astype(np.int64) * nv
            + np.maximum(all_e[:, 0], all_e[:, 1]))
    uk, inv = np.unique(ekey, return_inverse=True)
    ua, ub = uk // nv, uk % nv
    va, vb = vals[ua], vals[ub]
    s = va / (va - vb)
    p4 = act[ua] + s[:, None] * (act[ub] - act[ua])
    q = p4 @ fmat.T + foff

    k3 = len(tri_edges) * 3
    tris = np.concatenate([inv[:k3].reshape(-1, 3),
                           inv[k3:].reshape(-1, 4)[:, [0, 1, 2]],
                           inv[k3:].reshape(-1, 4)[:, [0, 2, 3]]])
    src = np.concatenate([tri_rows, quad_rows, quad_rows])
    ordinal = np.concatenate([np.zeros(len(tri_rows), np.int64),
                              np.zeros(len(quad_rows), np.int64),
                              np.ones(len(quad_rows), np.int64)])
    # case per triangle: 0 tri-split, 1/2 quad halves, 3 flagged face
    case = np.concatenate([np.zeros(len(tri_rows), np.int64),
                           np.full(len(quad_rows), 1, np.int64),
                           np.full(len(quad_rows), 2, np.int64)])
    flags = np.zeros(len(tris), dtype=bool)

    out_pool = VertexPool(fclose=cx.pool.fclose)
    rows7 = np.zeros((len(q), 7))
    rows7[:, 1:4] = q
    out_pool.extend_unchecked(rows7)

    # scalar path: tets with an on-plane vertex (and coincident faces)
    extra_tris: list[tuple[int, int, int]] = []
    extra_src: list[int] = []
    extra_ord: list[int] = []
    extra_case: list[int] = []
    extra_flags: list[bool] = []
    if len(degen_rows):
        def to_stored(p: VecN) -> VecN:
            pa = np.array([p[i] for i in cx.axes])
            qq = pa @ fmat.T + foff
            return VecN(0.0, qq[0], qq[1], qq[2])

        face_owner: dict[tuple[int, int, int], int] = {}
        for ti in degen_rows.tolist():
            outcome = slice_tet(plane, cx.tet(ti), cx.pool, out_pool,
                                displacement=displacement, to_stored=to_stored)
            kind = outcome.kind
            if kind is OutcomeKind.DEGENERATE_FACE and outcome.face is None:
                diags.five_plus += 1
            diags.counts[kind.value] += 1
            if kind in (OutcomeKind.TRIANGLE, OutcomeKind.QUAD):
                for o, tr in enumerate(outcome.triangles):
                    extra_tris.append(tr)
                    extra_src.append(ti)
                    extra_ord.append(o)
                    extra_case.append(0 if kind is OutcomeKind.TRIANGLE else 1 + o)
                    extra_flags.append(False)
            elif kind is OutcomeKind.DEGENERATE_FACE and outcome.face is not None:
                face_owner.setdefault(outcome.face, ti)
            elif kind is OutcomeKind.CONTAINED and req.diagnostics:
                for f in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
                    vi = cx.tets[ti]
                    diags.contained_faces.append(
                        tuple(sorted(int(vi[x]) for x in f)))

        # a face exactly in the plane is emitted once, flagged
        for face, owner in sorted(face_owner.items(), key=lambda kv: kv[1]):
            pts = [cx.pool[i] for i in face]
            if displacement is not None:
                pts = [add(pt, displacement) for pt in pts]
            ids = tuple(out_pool.put_vertex(to_stored(pt)) for pt in pts)
            if len(set(ids)) == 3:
                extra_tris.append(ids)
                extra_src.append(owner)
                extra_ord.append(2)
                extra_case.append(3)
                extra_flags.append(True)
                diags.coincident_faces += 1

    if extra_tris:
        tris = np.concatenate([tris, np.array(extra_tris, np.int64).reshape(-1, 3)])
        src = np.concatenate([src, np.array(extra_src, np.int64)])
        ordinal = np.concatenate([ordinal, np.array(extra_ord, np.int64)])
        case = np.concatenate([case, np.array(extra_case, np.int64)])
        flags = np.concatenate([flags, np.array(extra_flags, bool)])

    if not len(tris):
        return TriMesh(out_pool, np.empty((0, 3), np.int64),
                       np.empty((0, 3)), np.empty((0, 4))), diags

    # winding: orient against the parent tet's outward normal in-frame
    pts3 = out_pool.as_array()[:, 1:4]
    qq = pts3[tris]
    crs = np.cross(qq[:, 1] - qq[:, 0], qq[:, 2] - qq[:, 0])
    ref = cx.outward_normals()[src] @ fmat.T
    flip = (crs * ref).sum(axis=1) < 0.0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    crs[flip] = -crs[flip]

    # drop sub-floor areas, normalize normals
    nrm = np.linalg.norm(crs, axis=1)
    keep = nrm > 2.0 * AREA_FLOOR
    diags.dropped_area = int((~keep).sum())
    tris, src, ordinal, case, flags, crs, nrm = (
        tris[keep], src[keep], ordinal[keep], case[keep], flags[keep],
        crs[keep], nrm[keep])
    normals = crs / nrm[:, None]

    # canonical order: by source tet, then triangle ordinal within the tet
    order = np.lexsort((ordinal, src))
    tris, src, case, flags, normals = (
        tris[order], src[order], case[order], flags[order], normals[order])

    if req.diagnostics:
        table = np.array([COLOR_TRI, COLOR_QUAD_A, COLOR_QUAD_B, COLOR_FLAG])
        colors = table[case]
    else:
        colors = cx.tet_colors_array()[src]

    mesh = TriMesh(out_pool, tris, normals, colors, source_tets=src, flags=flags)
    return mesh, diags
