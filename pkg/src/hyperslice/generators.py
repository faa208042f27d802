"""Bounding pure simplicial 3-complex generators.

The 3-torus follows the classic parameterization
x = (R + (tube + depth cos(Phi)) cos(Psi)) cos(Theta),
y = (R + (tube + depth cos(Phi)) cos(Psi)) sin(Theta),
z = (tube + depth cos(Phi)) sin(Psi),  w = depth sin(Phi),
with each curvilinear grid cell cut into two triangular prisms and each
prism into three tetrahedra. All angles are index-stepped (k * delta, with
the wrap taken on the lattice index), so opposite grid seams land on
bit-identical points and merge exactly in the vertex pool.

Generated complexes are stamped with active axes (x, y, z, w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ndvec import EPS_PLANE, SPATIAL_AXES, VecN
from .simplicial import Complex3, Tetrahedron, VertexPool

VOLUME_FLOOR = 1e-12

# Six tetrahedra per hexahedral cell: each prism splits (P0P1P2P3),
# (P1P2P3P4), (P2P3P4P5). The second prism's corners are ordered
# (V1,V2,V3 | V5,V6,V7) so cut diagonals match across neighboring cells
# on every face of the cell.
CELL_TETS = ((0, 1, 2, 4), (1, 2, 4, 5), (2, 4, 5, 6),
             (1, 2, 3, 5), (2, 3, 5, 6), (3, 5, 6, 7))

# Reductions for cells collapsed along one lattice edge (V0=V2, V4=V6 or
# V1=V3, V5=V7): the cell is a triangular prism and must be cut as one,
# with corner order chosen so its quad diagonals still match the regular
# neighbors. Face-collapsed (pole) cells reduce correctly under CELL_TETS
# by dropping the degenerate tets.
PRISM_LOW = ((0, 1, 3, 4), (1, 3, 4, 5), (3, 4, 5, 7))
PRISM_HIGH = ((1, 0, 2, 5), (0, 2, 5, 4), (2, 5, 4, 6))


class DegenerateCell(ValueError):
    """A cell produced an affinely dependent tetrahedron."""


class OriginVertex(ValueError):
    """Radial projection hit a vertex at the active-subspace origin."""


class BadVelocity(ValueError):
    """Extrusion velocity conflicts with the complex's active axes."""


@dataclass(frozen=True)
class TorusParams:
    """3-torus radii and angular grid step.

    ``2*pi / delta_ang`` must be a whole number of steps, and the radii
    must satisfy radius > tube + depth and tube > depth > 0 so the
    embedding does not self-intersect.
    """

    radius: float = 5.0
    tube: float = 2.0
    depth: float = 1.0
    delta_ang: float = math.pi / 4

    def __post_init__(self):
        if not (self.tube > self.depth > 0.0):
            raise ValueError("need tube > depth > 0")
        if not (self.radius > self.tube + self.depth):
            raise ValueError("need radius > tube + depth")
        if self.delta_ang <= 0.0:
            raise ValueError("delta_ang must be positive")
        steps = 2.0 * math.pi / self.delta_ang
        if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0) or round(steps) < 1:
            raise ValueError("2*pi / delta_ang must be a positive integer")

    @property
    def steps(self) -> int:
        return round(2.0 * math.pi / self.delta_ang)


@dataclass(frozen=True)
class SphereParams:
    """3-sphere radius and step counts for the three hyperspherical angles
    (chi in [0, pi], phi in [0, pi], theta in [0, 2*pi)).

    chi and phi need at least 2 steps and theta at least 3, below which
    the grid cannot tile the sphere.
    """

    radius: float = 1.0
    steps: tuple[int, int, int] = (8, 8, 16)

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        s = tuple(int(v) for v in self.steps)
        if len(s) != 3 or s[0] < 2 or s[1] < 2 or s[2] < 3:
            raise ValueError("steps must be at least (2, 2, 3)")
        object.__setattr__(self, "steps", s)


@dataclass(frozen=True)
class ExtrudeParams:
    """Linear extrusion along t, represented by per-tet velocity vectors."""

    velocity: VecN = VecN(t=1.0)
    t_min: float = 0.0
    t_max: float = 1.0
    t_steps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "velocity", VecN(*self.velocity))
        if not (self.t_max > self.t_min):
            raise ValueError("need t_max > t_min")
        if self.t_steps < 1:
            raise ValueError("t_steps must be a positive integer")
        if all(c == 0.0 for c in self.velocity):
            raise ValueError("velocity must be nonzero")


def three_torus_point(phi: float, psi: float, theta: float,
                      p: TorusParams = TorusParams()) -> VecN:
    """One point of the 3-torus embedding; lives in (x, y, z, w), t = 0."""
    ring = p.tube + p.depth * math.cos(phi)
    arm = p.radius + ring * math.cos(psi)
    return VecN(0.0,
                arm * math.cos(theta),
                arm * math.sin(theta),
                ring * math.sin(psi),
                p.depth * math.sin(phi))


def _tet_volume3(a: VecN, b: VecN, c: VecN, d: VecN) -> float:
    """3-volume of a tetrahedron embedded in 7-space (Gram determinant)."""
    d1 = [b[i] - a[i] for i in range(7)]
    d2 = [c[i] - a[i] for i in range(7)]
    d3 = [d[i] - a[i] for i in range(7)]
    g11 = sum(v * v for v in d1)
    g22 = sum(v * v for v in d2)
    g33 = sum(v * v for v in d3)
    g12 = sum(v1 * v2 for v1, v2 in zip(d1, d2))
    g13 = sum(v1 * v3 for v1, v3 in zip(d1, d3))
    g23 = sum(v2 * v3 for v2, v3 in zip(d2, d3))
    det = (g11 * (g22 * g33 - g23 * g23)
           - g12 * (g12 * g33 - g23 * g13)
           + g13 * (g12 * g23 - g22 * g13))
    return math.sqrt(max(det, 0.0)) / 6.0


def tessellate_cell(corners, velocity: VecN | None, pool: VertexPool, *,
                    drop_degenerate: bool = False,
                    color: tuple[float, float, float, float] | None = None
                    ) -> list[Tetrahedron]:
    """Split a hexahedral cell into six tetrahedra over a shared pool.

    ``corners`` are the 8 cell corners ordered V0..V7: V0..V3 one quad face
    row-major over two parameters (bit 0 the first parameter, bit 1 the
    second), V4..V7 the opposite face (bit 2 the third parameter). Corner
    vertices are deposited via put_vertex, so shared corners merge across
    cells.

    Raises DegenerateCell when a resulting tetrahedron is affinely
    dependent. With ``drop_degenerate`` collapsed cells reduce instead:
    a cell collapsed along one lattice edge is cut as the triangular
    prism it has become, and degenerate tets (pole cells) are dropped.
    """
    corners = [VecN(*c) for c in corners]
    if len(corners) != 8:
        raise ValueError("a cell needs exactly 8 corners")
    idx = [pool.put_vertex(c) for c in corners]
    vel_idx = pool.put_vertex(velocity) if velocity is not None else None
    pattern = CELL_TETS
    if drop_degenerate:
        face_collapse = (idx[0] == idx[1] == idx[2] == idx[3]
                         or idx[4] == idx[5] == idx[6] == idx[7])
        if not face_collapse:
            if idx[0] == idx[2] and idx[4] == idx[6]:
                pattern = PRISM_LOW
            elif idx[1] == idx[3] and idx[5] == idx[7]:
                pattern = PRISM_HIGH
    out: list[Tetrahedron] = []
    for t in pattern:
        vi = tuple(idx[k] for k in t)
        degenerate = len(set(vi)) != 4
        if not degenerate:
            vol = _tet_volume3(*(corners[k] for k in t))
            degenerate = vol <= VOLUME_FLOOR
        if degenerate:
            if drop_degenerate:
                continue
            raise DegenerateCell(f"degenerate tetrahedron from cell corners {t}")
        out.append(Tetrahedron(vi, velocity_idx=vel_idx, color=color))
    return out


def make_3torus(p: TorusParams = TorusParams(), name: str = "3-torus",
                fclose: float | None = None) -> Complex3:
    """Generate the 3-torus as a closed pure simplicial 3-complex.

    The (Phi, Psi, Theta) grid wraps in all three angles; the result has
    exactly 6 * steps**3 tetrahedra and passes validate_closed.
    """
    n = p.steps
    d = p.delta_ang
    pool = VertexPool() if fclose is None else VertexPool(fclose=fclose)

    # lattice points at (i*d, j*d, k*d); wrap on the index so seams merge
    k = np.arange(n)
    phi, psi, theta = np.meshgrid(k * d, k * d, k * d, indexing="ij")
    ring = p.tube + p.depth * np.cos(phi)
    arm = p.radius + ring * np.cos(psi)
    pts = np.zeros((n, n, n, 7))
    pts[..., 1] = arm * np.cos(theta)
    pts[..., 2] = arm * np.sin(theta)
    pts[..., 3] = ring * np.sin(psi)
    pts[..., 4] = p.depth * np.sin(phi)
    lattice = [VecN(*row) for row in pts.reshape(-1, 7).tolist()]

    def at(i: int, j: int, kk: int) -> VecN:
        return lattice[((i % n) * n + (j % n)) * n + (kk % n)]

    for v in lattice:
        pool.put_vertex(v)

    tets: list[Tetrahedron] = []
    for i in range(n):          # Phi
        for j in range(n):      # Psi
            for kk in range(n):  # Theta
                corners = [at(i + ((b >> 2) & 1), j + (b & 1), kk + ((b >> 1) & 1))
                           for b in range(8)]
                tets.extend(tessellate_cell(corners, None, pool))
    return Complex3(pool, tets, axes=SPATIAL_AXES, name=name,
                    metadata={"generator": "3torus", "radius": p.radius,
                              "tube": p.tube, "depth": p.depth,
                              "delta_ang": p.delta_ang})


def make_3sphere(p: SphereParams = SphereParams(), name: str = "3-sphere",
                 fclose: float | None = None) -> Complex3:
    """Generate the 3-sphere of radius R as a closed complex.

    Hyperspherical grid (chi, phi, theta); pole-collapsed cells reduce to
    fewer tetrahedra (degenerate ones are dropped). Every vertex satisfies
    ||(x,y,z,w)|| = R to within 1e-9.
    """
    nc, nf, nt = p.steps
    R = p.radius
    pool = VertexPool() if fclose is None else VertexPool(fclose=fclose)

    ci = np.arange(nc + 1) * (math.pi / nc)
    fj = np.arange(nf + 1) * (math.pi / nf)
    tk = np.arange(nt) * (2.0 * math.pi / nt)
    chi, phi, theta = np.meshgrid(ci, fj, tk, indexing="ij")
    pts = np.zeros(chi.shape + (7,))
    pts[..., 1] = R * np.sin(chi) * np.sin(phi) * np.cos(theta)
    pts[..., 2] = R * np.sin(chi) * np.sin(phi) * np.sin(theta)
    pts[..., 3] = R * np.sin(chi) * np.cos(phi)
    pts[..., 4] = R * np.cos(chi)
    lattice = [VecN(*row) for row in pts.reshape(-1, 7).tolist()]

    def at(i: int, j: int, kk: int) -> VecN:
        return lattice[(i * (nf + 1) + j) * nt + (kk % nt)]

    for v in lattice:
        pool.put_vertex(v)

    tets: list[Tetrahedron] = []
    for i in range(nc):          # chi
        for j in range(nf):      # phi
            for kk in range(nt):  # theta
                corners = [at(i + ((b >> 2) & 1), j + (b & 1), kk + ((b >> 1) & 1))
                           for b in range(8)]
                tets.extend(tessellate_cell(corners, None, pool,
                                            drop_degenerate=True))
    return Complex3(pool, tets, axes=SPATIAL_AXES, name=name,
                    metadata={"generator": "3sphere", "radius": R,
                              "steps": list(p.steps)})


def project_to_3sphere(cx: Complex3, radius: float) -> Complex3:
    """Radially rescale every corner vertex to the 3-sphere of ``radius``.

    Connectivity (and velocity/origin metadata rows) are unchanged.
    Raises OriginVertex when a corner sits at the active-subspace origin.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    arr = cx.pool.as_array().copy()
    ref = cx.referenced_vertices()
    cols = list(cx.axes)
    act = arr[np.ix_(ref, cols)]
    norms = np.linalg.norm(act, axis=1)
    if bool((norms < EPS_PLANE).any()):
        raise OriginVertex("a vertex lies at the origin of the active subspace")
    arr[np.ix_(ref, cols)] = act * (radius / norms)[:, None]
    pool = VertexPool(fclose=cx.pool.fclose, key_axis=cx.pool.key_axis)
    pool.extend_unchecked(arr)
    return Complex3(pool, cx.tets.copy(), axes=cx.axes, name=cx.name,
                    color=cx.color, time_extent=cx.time_extent,
                    metadata={**cx.metadata, "projected_radius": radius},
                    velocity_idx=cx.velocity_idx.copy(),
                    origin_idx=cx.origin_idx.copy(),
                    tet_colors=list(cx._colors))


def extrude_along_t(cx: Complex3, p: ExtrudeParams) -> Complex3:
    """Attach a shared extrusion velocity to every tetrahedron.

    The 5D body is represented implicitly: slicing at time tau displaces
    vertices by tau * velocity first, and tau outside [t_min, t_max]
    yields an empty slice.
    """
    if 0 in cx.axes:
        raise BadVelocity("complex is already active along t")
    if any(p.velocity[i] != 0.0 for i in cx.axes):
        raise BadVelocity("extrusion velocity must be zero on the active axes")
    arr = cx.pool.as_array()
    pool = VertexPool(fclose=cx.pool.fclose, key_axis=cx.pool.key_axis)
    pool.extend_unchecked(arr)
    vel_idx = pool.extend_unchecked(np.array(p.velocity, dtype=np.float64).reshape(1, 7))
    m = cx.num_tets
    return Complex3(pool, cx.tets.copy(), axes=cx.axes, name=cx.name,
                    color=cx.color, time_extent=(p.t_min, p.t_max),
                    metadata={**cx.metadata, "t_steps": p.t_steps},
                    velocity_idx=np.full(m, vel_idx, dtype=np.int64),
                    origin_idx=cx.origin_idx.copy(),
                    tet_colors=list(cx._colors))
