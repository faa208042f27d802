"""Shared test utilities: independent oracles and mesh audits."""

from __future__ import annotations

from collections import Counter

import numpy as np

from hyperslice import Hyperplane3Flat, TriMesh


def directed_edge_violations(mesh: TriMesh) -> int:
    """Count directed edges not matched by exactly one opposite edge.

    Zero means the mesh is a consistently oriented closed 2-manifold.
    """
    ce: Counter = Counter()
    for tr in mesh.triangles:
        a, b, c = (int(v) for v in tr)
        for e in ((a, b), (b, c), (c, a)):
            ce[e] += 1
    bad = 0
    for (a, b), cnt in ce.items():
        if cnt != 1 or ce.get((b, a), 0) != 1:
            bad += 1
    return bad


def edge_triangle_counts(mesh: TriMesh) -> np.ndarray:
    """Per distinct undirected edge: number of incident triangles."""
    if mesh.is_empty:
        return np.empty(0, dtype=np.int64)
    e = np.sort(mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    nv = len(mesh.pool)
    keys = e[:, 0] * nv + e[:, 1]
    _, counts = np.unique(keys, return_counts=True)
    return counts


def signed_volume(mesh: TriMesh) -> float:
    """Total signed volume enclosed by the mesh (cone from origin)."""
    p = mesh.points3()
    t = mesh.triangles
    return float(np.einsum("ij,ij->i", p[t[:, 0]],
                           np.cross(p[t[:, 1]], p[t[:, 2]])).sum() / 6.0)


def random_general_position_plane(rng: np.random.Generator, cx,
                                  min_gap: float = 1e-7) -> Hyperplane3Flat:
    """A random plane crossing the complex with no vertex within min_gap."""
    act = cx.pool.active(cx.axes)[cx.referenced_vertices()]
    for _ in range(200):
        n = rng.normal(size=4)
        n /= np.linalg.norm(n)
        proj = act @ n
        lo, hi = np.quantile(proj, 0.1), np.quantile(proj, 0.9)
        off = rng.uniform(lo, hi)
        vals = proj - off
        if np.abs(vals).min() > min_gap and (vals > 0).any() and (vals < 0).any():
            return Hyperplane3Flat((-off, *n), cx.axes)
    raise RuntimeError("could not find a general-position plane")


def random_nondegenerate_tet(rng: np.random.Generator) -> np.ndarray:
    """Four random points in 4-space, affinely independent."""
    while True:
        pts = rng.normal(size=(4, 4))
        d = pts[1:] - pts[0]
        # 3-volume via Gram determinant
        g = d @ d.T
        if np.linalg.det(g) > 1e-6:
            return pts
