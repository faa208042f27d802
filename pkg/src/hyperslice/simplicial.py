"""Storage and topology of pure simplicial 3-complexes and triangle meshes.

A :class:`VertexPool` merges proximate vertices (Chebyshev distance at most
``fclose``) into shared indexed entries, so tetrahedra of a
:class:`Complex3` and triangles of a :class:`TriMesh` reference common
points exactly. Merging is first-come: an incoming point joins the nearest
already-stored vertex within tolerance (ties to the lowest index), and
stored vertices are always pairwise farther apart than ``fclose``.

Pools are single-writer; complexes and meshes are frozen at construction
and safe to share across any number of readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sortedcontainers import SortedList

from .ndvec import ActiveAxes, DEFAULT_AXES, VecN, cross4

FCLOSE_DEFAULT = 1e-6

# The four triangular faces of a tetrahedron, by omitted corner position.
TET_FACES = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))


class VertexPool:
    """Growable indexed array of VecN with proximity merging.

    The search index is an ordered map on one coordinate (``key_axis``,
    default x, which is informative for every generated model); a
    +/-fclose window scan on it yields merge candidates, which are then
    filtered by the full Chebyshev metric. Exact re-inserts are resolved
    by hash without touching the ordered index. Bulk loads from the slicer
    defer index construction until a proximity query actually needs it.
    """

    def __init__(self, fclose: float = FCLOSE_DEFAULT, key_axis: int = 1):
        if fclose < 0.0:
            raise ValueError("fclose must be >= 0")
        self.fclose = float(fclose)
        self.key_axis = int(key_axis)
        self._rows: list[tuple[float, ...]] = []
        self._pending: list[np.ndarray] = []
        self._pending_count = 0
        self._exact: dict[tuple[float, ...], int] = {}
        self._index: SortedList = SortedList()
        self._index_dirty = False
        self._arr: np.ndarray | None = None
        self._frozen = False

    def __len__(self) -> int:
        return len(self._rows) + self._pending_count

    def __getitem__(self, i: int) -> VecN:
        self._materialize()
        return VecN(*self._rows[i])

    def freeze(self) -> "VertexPool":
        self._frozen = True
        return self

    def _materialize(self) -> None:
        if self._pending:
            for block in self._pending:
                self._rows.extend(tuple(r) for r in block.tolist())
            self._pending.clear()
            self._pending_count = 0

    def _ensure_index(self) -> None:
        self._materialize()
        if self._index_dirty:
            self._exact = {}
            pairs = []
            for i, row in enumerate(self._rows):
                self._exact.setdefault(row, i)
                pairs.append((row[self.key_axis], i))
            self._index = SortedList(pairs)
            self._index_dirty = False

    def put_vertex(self, p: Sequence[float]) -> int:
        """Return the index of ``p``, merging into an existing vertex when
        one lies within ``fclose`` (Chebyshev); otherwise append."""
        if self._frozen:
            raise RuntimeError("pool is frozen")
        self._ensure_index()
        row = tuple(float(c) for c in VecN(*p))
        hit = self._exact.get(row)
        if hit is not None:
            return hit
        f = self.fclose
        if f > 0.0 and self._rows:
            key = row[self.key_axis]
            best: tuple[float, int] | None = None
            lo = self._index.bisect_left((key - f, -1))
            for k, idx in self._index.islice(lo):
                if k > key + f:
                    break
                cand = self._rows[idx]
                d = max(abs(a - b) for a, b in zip(cand, row))
                if d <= f and (best is None or (d, idx) < best):
                    best = (d, idx)
            if best is not None:
                self._exact[row] = best[1]
                return best[1]
        idx = len(self._rows)
        self._rows.append(row)
        self._exact[row] = idx
        self._index.add((row[self.key_axis], idx))
        self._arr = None
        return idx

    def extend_unchecked(self, points: np.ndarray) -> int:
        """Bulk-append (n, 7) rows the caller guarantees are already distinct
        (the slicer keys its points by unique parent edges). Returns the
        index of the first appended row."""
        if self._frozen:
            raise RuntimeError("pool is frozen")
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 7:
            raise ValueError("extend_unchecked expects an (n, 7) array")
        start = len(self)
        if len(pts):
            self._pending.append(pts.copy())
            self._pending_count += len(pts)
            self._index_dirty = True
            self._arr = None
        return start

    def as_array(self) -> np.ndarray:
        """All vertices as an (n, 7) float64 array (cached)."""
        if self._arr is None or len(self._arr) != len(self):
            parts = []
            if self._rows:
                parts.append(np.array(self._rows, dtype=np.float64))
            parts.extend(self._pending)
            if parts:
                self._arr = np.vstack(parts)
            else:
                self._arr = np.empty((0, 7), dtype=np.float64)
        return self._arr

    def active(self, axes: Sequence[int]) -> np.ndarray:
        return self.as_array()[:, list(axes)]


@dataclass(frozen=True)
class Tetrahedron:
    """Four vertex indices into a pool, plus optional velocity/origin
    vector indices (also pool entries) and an optional color override."""

    vert_idx: tuple[int, int, int, int]
    velocity_idx: int | None = None
    origin_idx: int | None = None
    color: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        vi = tuple(int(i) for i in self.vert_idx)
        if len(vi) != 4 or len(set(vi)) != 4:
            raise ValueError(f"tetrahedron needs 4 distinct vertex indices: {vi}")
        object.__setattr__(self, "vert_idx", vi)


DEFAULT_COLOR = (0.75, 0.75, 0.78, 1.0)


class Complex3:
    """A frozen pure simplicial 3-complex over a shared vertex pool.

    ``tets`` may be an iterable of :class:`Tetrahedron` or a prebuilt
    (m, 4) index array (with optional parallel velocity/origin index
    arrays, -1 meaning absent).
    """

    def __init__(self, pool: VertexPool, tets, axes: ActiveAxes = DEFAULT_AXES,
                 name: str = "",
                 color: tuple[float, float, float, float] = DEFAULT_COLOR,
                 time_extent: tuple[float, float] | None = None,
                 metadata: dict | None = None,
                 velocity_idx: np.ndarray | None = None,
                 origin_idx: np.ndarray | None = None,
                 tet_colors: list | None = None):
        self.pool = pool.freeze()
        self.axes = axes if isinstance(axes, ActiveAxes) else ActiveAxes(axes)
        self.name = name
        self.color = tuple(color)
        self.time_extent = tuple(time_extent) if time_extent is not None else None
        self.metadata = dict(metadata or {})
        n = len(pool)
        if isinstance(tets, np.ndarray):
            self.tets = np.asarray(tets, dtype=np.int64).reshape(-1, 4)
            m = len(self.tets)
            self.velocity_idx = (np.asarray(velocity_idx, dtype=np.int64)
                                 if velocity_idx is not None else np.full(m, -1, np.int64))
            self.origin_idx = (np.asarray(origin_idx, dtype=np.int64)
                               if origin_idx is not None else np.full(m, -1, np.int64))
            self._colors = tet_colors if tet_colors is not None else [None] * m
            srt = np.sort(self.tets, axis=1)
            if m and bool((srt[:, :-1] == srt[:, 1:]).any()):
                raise ValueError("tetrahedron with repeated vertex indices")
        else:
            tets = list(tets)
            self.tets = np.array([t.vert_idx for t in tets],
                                 dtype=np.int64).reshape(len(tets), 4)
            self.velocity_idx = np.array(
                [(-1 if t.velocity_idx is None else t.velocity_idx) for t in tets],
                dtype=np.int64)
            self.origin_idx = np.array(
                [(-1 if t.origin_idx is None else t.origin_idx) for t in tets],
                dtype=np.int64)
            self._colors = [t.color for t in tets]
        if self.tets.size and (self.tets.min() < 0 or self.tets.max() >= n):
            raise IndexError("tetrahedron vertex index out of range")
        for arr in (self.velocity_idx, self.origin_idx):
            if arr.size and arr.max() >= n:
                raise IndexError("tetrahedron metadata index out of range")
        self._orient_sign: np.ndarray | None = None
        self._outward: np.ndarray | None = None
        self._colors_arr: np.ndarray | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def num_tets(self) -> int:
        return len(self.tets)

    @property
    def num_vertices(self) -> int:
        return len(self.pool)

    def tet(self, i: int) -> Tetrahedron:
        vel = int(self.velocity_idx[i])
        org = int(self.origin_idx[i])
        return Tetrahedron(tuple(int(j) for j in self.tets[i]),
                           None if vel < 0 else vel,
                           None if org < 0 else org,
                           self._colors[i])

    def __iter__(self):
        return (self.tet(i) for i in range(self.num_tets))

    def tet_color(self, i: int) -> tuple[float, float, float, float]:
        c = self._colors[i]
        return c if c is not None else self.color

    def tet_colors_array(self) -> np.ndarray:
        """(m, 4) per-tet RGBA (complex color where no override), cached."""
        if self._colors_arr is None:
            arr = np.tile(np.asarray(self.color, dtype=np.float64),
                          (self.num_tets, 1))
            for i, c in enumerate(self._colors):
                if c is not None:
                    arr[i] = c
            self._colors_arr = arr
        return self._colors_arr

    def has_velocities(self) -> bool:
        return bool(self.velocity_idx.size) and bool((self.velocity_idx >= 0).any())

    def uniform_velocity(self) -> VecN | None:
        """The single shared velocity vector, or None if absent or mixed."""
        if not self.has_velocities():
            return None
        vals = np.unique(self.velocity_idx)
        if len(vals) != 1:
            return None
        return self.pool[int(vals[0])]

    def referenced_vertices(self) -> np.ndarray:
        """Indices of vertices used as tetrahedron corners (excludes
        velocity/origin metadata rows)."""
        return np.unique(self.tets)

    def bounds(self) -> dict[int, tuple[float, float]]:
        """Per-active-axis (min, max) over corner vertices."""
        if not self.num_tets:
            return {i: (0.0, 0.0) for i in self.axes}
        pts = self.pool.as_array()[self.referenced_vertices()]
        return {i: (float(pts[:, i].min()), float(pts[:, i].max())) for i in self.axes}

    # -- orientation -------------------------------------------------------

    def orientation(self) -> np.ndarray:
        """Per-tet signs (+1/-1) making every [a,b,c,d] consistently outward
        oriented; computed once on first use and cached.

        Signs propagate across shared faces (adjacent tets must induce
        opposite orientations on the common face); the global sign of each
        connected component is fixed so its enclosed 4-volume is positive.
        """
        if self._orient_sign is None:
            self._orient_sign = _orient_tets(self)
        return self._orient_sign

    def outward_normals(self) -> np.ndarray:
        """(m, 4) outward 4D normals of the oriented tets (active coords);
        computed once and cached."""
        if self._outward is None:
            sign = self.orientation()
            p = self.pool.active(self.axes)[self.tets]
            n = cross4(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0], p[:, 3] - p[:, 0])
            self._outward = sign[:, None] * n
        return self._outward


def _face_keys(tets: np.ndarray, nverts: int) -> np.ndarray:
    """Sorted-face keys (4m,), slot-major: slot*m + tet."""
    faces = np.concatenate([tets[:, list(f)] for f in TET_FACES])
    faces = np.sort(faces, axis=1)
    return (faces[:, 0].astype(np.int64) * nverts + faces[:, 1]) * nverts + faces[:, 2]


def face_incidence(cx: Complex3) -> dict[tuple[int, int, int], int]:
    """Count incident tetrahedra per distinct (sorted) triangular face."""
    n = max(cx.num_vertices, 1)
    keys = _face_keys(cx.tets, n)
    uk, counts = np.unique(keys, return_counts=True)
    out: dict[tuple[int, int, int], int] = {}
    for k, c in zip(uk.tolist(), counts.tolist()):
        ab, f2 = divmod(k, n)
        f0, f1 = divmod(ab, n)
        out[(f0, f1, f2)] = c
    return out


@dataclass(frozen=True)
class ClosedReport:
    is_closed: bool
    boundary_faces: int
    overshared_faces: int
    face_count: int
    tet_count: int
    vertex_count: int
    vertex_tet_ratio: float


def validate_closed(cx: Complex3) -> ClosedReport:
    """Check the closed-surface condition: every face in exactly 2 tets."""
    n = max(cx.num_vertices, 1)
    keys = _face_keys(cx.tets, n)
    _, counts = np.unique(keys, return_counts=True)
    boundary = int((counts == 1).sum())
    overshared = int((counts > 2).sum())
    nref = len(cx.referenced_vertices())
    ratio = nref / cx.num_tets if cx.num_tets else 0.0
    return ClosedReport(
        is_closed=bool(counts.size) and boundary == 0 and overshared == 0,
        boundary_faces=boundary,
        overshared_faces=overshared,
        face_count=int(counts.size),
        tet_count=cx.num_tets,
        vertex_count=nref,
        vertex_tet_ratio=ratio,
    )


def _offsets_within(counts: np.ndarray) -> np.ndarray:
    """[0..c0-1, 0..c1-1, ...] for a vector of group sizes."""
    total = int(counts.sum())
    out = np.arange(total, dtype=np.int64)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    return out - starts


def _orient_tets(cx: Complex3) -> np.ndarray:
    """Assign +/-1 per tet so shared faces get opposite induced orientations,
    then fix each connected component's sign by enclosed 4-volume."""
    m = cx.num_tets
    if m == 0:
        return np.empty(0, dtype=np.float64)
    n = max(cx.num_vertices, 1)
    tets = cx.tets
    faces = np.concatenate([tets[:, list(f)] for f in TET_FACES])
    slot = np.repeat(np.arange(4, dtype=np.int8), m)
    tids = np.tile(np.arange(m, dtype=np.int64), 4)
    inv_cnt = ((faces[:, 0] > faces[:, 1]).astype(np.int8)
               + (faces[:, 0] > faces[:, 2]) + (faces[:, 1] > faces[:, 2]))
    sgn = ((inv_cnt + slot) % 2).astype(np.int8)  # induced orientation parity
    fs = np.sort(faces, axis=1)
    keys = (fs[:, 0].astype(np.int64) * n + fs[:, 1]) * n + fs[:, 2]
    order = np.argsort(keys, kind="stable")
    ks = keys[order]
    if len(ks) > 2 and bool((ks[:-2] == ks[2:]).any()):
        raise ValueError("complex is not face-manifold (a face in >2 tets)")
    same = np.nonzero(ks[:-1] == ks[1:])[0]
    pa, pb = order[same], order[same + 1]
    ta, tb = tids[pa], tids[pb]
    # flip(tb) = flip(ta) XOR 1 exactly when the induced parities agree
    rel = (sgn[pa] == sgn[pb]).astype(np.int8)

    # symmetric CSR adjacency over tets
    src = np.concatenate([ta, tb])
    dst = np.concatenate([tb, ta])
    rr = np.concatenate([rel, rel])
    o = np.argsort(src, kind="stable")
    src, dst, rr = src[o], dst[o], rr[o]
    indptr = np.searchsorted(src, np.arange(m + 1))

    flip = np.full(m, -1, dtype=np.int8)
    comp = np.full(m, -1, dtype=np.int64)
    ncomp = 0
    unvisited_from = 0
    while True:
        while unvisited_from < m and flip[unvisited_from] >= 0:
            unvisited_from += 1
        if unvisited_from >= m:
            break
        seed = unvisited_from
        flip[seed] = 0
        comp[seed] = ncomp
        frontier = np.array([seed], dtype=np.int64)
        while len(frontier):
            starts = indptr[frontier]
            cnts = indptr[frontier + 1] - starts
            nbr = np.repeat(starts, cnts) + _offsets_within(cnts)
            nb = dst[nbr]
            nf = (np.repeat(flip[frontier], cnts) ^ rr[nbr]).astype(np.int8)
            new = flip[nb] < 0
            nbn, first = np.unique(nb[new], return_index=True)
            flip[nbn] = nf[new][first]
            comp[nbn] = ncomp
            frontier = nbn
        ncomp += 1

    # orientability check: every adjacency constraint must hold
    if same.size and not bool(np.all(flip[ta] ^ rel == flip[tb])):
        raise ValueError("complex is not orientable (or not face-manifold)")

    p = cx.pool.active(cx.axes)[tets]
    det = np.linalg.det(p)
    sign_out = np.where(flip == 0, 1.0, -1.0)
    vol = np.zeros(ncomp)
    np.add.at(vol, comp, sign_out * det / 24.0)
    neg = vol < 0.0
    if neg.any():
        sign_out = np.where(neg[comp], -sign_out, sign_out)
    return sign_out


# -- triangle meshes -------------------------------------------------------


class TriMesh:
    """A frozen indexed triangle mesh with per-triangle normals and colors.

    Points live in a 3D coordinate frame (the slicing plane's frame, or a
    projection frame) and are stored in the (x, y, z) slots of the pool's
    7-component vectors, the rest zero.
    """

    def __init__(self, pool: VertexPool, triangles: np.ndarray,
                 normals: np.ndarray, colors: np.ndarray,
                 source_tets: np.ndarray | None = None,
                 flags: np.ndarray | None = None):
        self.pool = pool.freeze()
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
        self.colors = np.asarray(colors, dtype=np.float64).reshape(-1, 4)
        nt = len(self.triangles)
        if len(self.normals) != nt or len(self.colors) != nt:
            raise ValueError("normals/colors must be per-triangle")
        if nt and (self.triangles.min() < 0 or self.triangles.max() >= len(pool)):
            raise IndexError("triangle vertex index out of range")
        self.source_tets = (np.asarray(source_tets, dtype=np.int64)
                            if source_tets is not None else np.full(nt, -1, np.int64))
        self.flags = (np.asarray(flags, dtype=bool)
                      if flags is not None else np.zeros(nt, dtype=bool))

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def is_empty(self) -> bool:
        return self.num_triangles == 0

    def points3(self) -> np.ndarray:
        """(n, 3) frame coordinates of all pool vertices."""
        return self.pool.as_array()[:, 1:4]

    def edges(self) -> np.ndarray:
        """Distinct undirected edges (e, 2), vertex ids ascending."""
        if self.is_empty:
            return np.empty((0, 2), dtype=np.int64)
        e = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        e = np.sort(e, axis=1)
        return np.unique(e, axis=0)


@dataclass(frozen=True)
class ComponentTopology:
    vertices: int
    edges: int
    faces: int
    euler: int
    closed: bool
    genus: int | None


@dataclass(frozen=True)
class TopologyReport:
    vertices: int
    edges: int
    faces: int
    euler: int
    components: int
    closed: bool
    non_manifold_edges: int
    per_component: tuple[ComponentTopology, ...]

    def genus_list(self) -> list[int | None]:
        return [c.genus for c in self.per_component]


def mesh_topology(m: TriMesh) -> TopologyReport:
    """V/E/F, Euler characteristic, edge-connected components, closedness
    and genus per closed component (chi = 2 - 2g).

    Vertex counts cover only vertices referenced by triangles; an edge
    bordered by more than two triangles is reported, not raised.
    """
    if m.is_empty:
        return TopologyReport(0, 0, 0, 0, 0, True, 0, ())
    tris = m.triangles
    nv = len(m.pool)
    e = np.sort(tris[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    ekeys = e[:, 0].astype(np.int64) * nv + e[:, 1]
    tri_of_edge = np.repeat(np.arange(len(tris)), 3)
    uk, counts = np.unique(ekeys, return_counts=True)
    non_manifold = int((counts > 2).sum())
    closed_all = bool((counts == 2).all())

    # triangle adjacency through shared edges (consecutive in sorted order)
    order = np.argsort(ekeys, kind="stable")
    ks = ekeys[order]
    same = np.nonzero(ks[:-1] == ks[1:])[0]
    ra, rb = tri_of_edge[order[same]], tri_of_edge[order[same + 1]]
    if len(ra):
        g = coo_matrix((np.ones(len(ra)), (ra, rb)), shape=(len(tris), len(tris)))
        ncomp, labels = connected_components(g, directed=False)
    else:
        ncomp, labels = len(tris), np.arange(len(tris))

    per = []
    for c in range(ncomp):
        tsel = tris[labels == c]
        vset = np.unique(tsel)
        esel = np.sort(tsel[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        ek = esel[:, 0].astype(np.int64) * nv + esel[:, 1]
        uek, ec = np.unique(ek, return_counts=True)
        V, E, F = len(vset), len(uek), len(tsel)
        chi = V - E + F
        comp_closed = bool((ec == 2).all())
        genus = (2 - chi) // 2 if comp_closed and chi % 2 == 0 else None
        per.append(ComponentTopology(V, E, F, chi, comp_closed, genus))

    V = len(np.unique(tris))
    E = len(uk)
    F = len(tris)
    return TopologyReport(V, E, F, V - E + F, ncomp, closed_all,
                          non_manifold, tuple(per))
