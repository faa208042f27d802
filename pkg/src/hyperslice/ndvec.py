"""Seven-component vector algebra, 3-flat hyperplanes, and axis-plane rotations.

Every point and direction in the engine is a :class:`VecN`: a fixed
seven-component double-precision vector in the order (t, x, y, z, w, v, u).
Lower-dimensional geometry simply leaves the trailing components at 0.0.
Which four (or five) of the seven coordinates participate in slicing and
projection is selected by an :class:`ActiveAxes` tuple.

All values here are immutable and every operation is a pure function, so
they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

AXIS_NAMES = "txyzwvu"

# Tolerances (cofactors are unit-normalized, world coordinates are O(10)).
EPS_PLANE = 1e-9   # |signed incidence| below this counts as "on the plane"
EPS_RANK = 1e-12   # normalized-minor floor for degeneracy detection
EPS_S = 1e-9       # slack on the s in [0,1] edge-parameter test
EPS_DIR = 1e-12    # |d| below this counts as "edge parallel to the plane"


class BadAxisPair(ValueError):
    """A rotation or pose names an invalid or inactive axis pair."""


class DegeneratePoints(ValueError):
    """Four points that are affinely dependent in the active subspace."""


class InvalidPlane(ValueError):
    """Hyperplane cofactors with a zero normal part."""


def axis_index(name: str) -> int:
    """Map an axis letter (t, x, y, z, w, v, u) to its component index."""
    try:
        return AXIS_NAMES.index(name.lower())
    except ValueError:
        raise BadAxisPair(f"unknown axis name {name!r}") from None


class VecN(NamedTuple):
    """A point or direction in up to seven Euclidean dimensions."""

    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w: float = 0.0
    v: float = 0.0
    u: float = 0.0

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "VecN":
        """Build from up to 7 leading components; the rest stay 0.0."""
        vals = [float(c) for c in a]
        if len(vals) > 7:
            raise ValueError("VecN takes at most 7 components")
        return cls(*vals)

    @classmethod
    def from_active(cls, values: Sequence[float], axes: "ActiveAxes") -> "VecN":
        """Place ``values`` into the slots named by ``axes``."""
        if len(values) != len(axes):
            raise ValueError("value count must match the active axis count")
        comps = [0.0] * 7
        for i, val in zip(axes, values):
            comps[i] = float(val)
        return cls(*comps)

    def to_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)

    def active(self, axes: "ActiveAxes") -> tuple[float, ...]:
        return tuple(self[i] for i in axes)


ZERO = VecN()


def add(a: VecN, b: VecN) -> VecN:
    return VecN(*(ai + bi for ai, bi in zip(a, b)))


def sub(a: VecN, b: VecN) -> VecN:
    return VecN(*(ai - bi for ai, bi in zip(a, b)))


def scale(a: VecN, s: float) -> VecN:
    return VecN(*(ai * s for ai in a))


def blend(a: VecN, b: VecN, s: float) -> VecN:
    """Linear blend a + s*(b - a); s=0 returns a, s=1 returns b."""
    return VecN(*(ai + s * (bi - ai) for ai, bi in zip(a, b)))


def norm(a: VecN) -> float:
    return math.sqrt(sum(c * c for c in a))


def dot5(cofactors: Sequence[float], column: Sequence[float]) -> float:
    """Inner product of two 5-rows (incidence numerator/denominator form)."""
    if len(cofactors) != 5 or len(column) != 5:
        raise ValueError("dot5 operands must have length 5")
    return (cofactors[0] * column[0] + cofactors[1] * column[1]
            + cofactors[2] * column[2] + cofactors[3] * column[3]
            + cofactors[4] * column[4])


class ActiveAxes(tuple):
    """Ordered component indices participating in slicing/projection.

    Indices are distinct, ascending, each in [0, 6]; length 4 for 3-flat
    slicing of 4D objects, 5 when a time parameter is active (3 is allowed
    for plain 3D payloads such as slice output).
    """

    def __new__(cls, indices: Iterable[int]):
        idx = tuple(int(i) for i in indices)
        if not 3 <= len(idx) <= 5:
            raise ValueError(f"ActiveAxes needs 3-5 indices, got {len(idx)}")
        if any(i < 0 or i > 6 for i in idx):
            raise ValueError(f"axis indices must lie in [0, 6]: {idx}")
        if len(set(idx)) != len(idx) or tuple(sorted(idx)) != idx:
            raise ValueError(f"axis indices must be distinct and ascending: {idx}")
        return super().__new__(cls, idx)

    @classmethod
    def from_names(cls, names: str) -> "ActiveAxes":
        return cls(sorted(axis_index(n) for n in names))

    @property
    def names(self) -> str:
        return "".join(AXIS_NAMES[i] for i in self)


DEFAULT_AXES = ActiveAxes((0, 1, 2, 3))     # (t, x, y, z)
SPATIAL_AXES = ActiveAxes((1, 2, 3, 4))     # (x, y, z, w): generator output


def rotate_in_plane(p: VecN, axis_i: int, axis_j: int, theta: float) -> VecN:
    """Rotate ``p`` by ``theta`` in the coordinate plane (axis_i, axis_j).

    (pi, pj) -> (pi cos - pj sin, pi sin + pj cos); other components and the
    Euclidean norm are unchanged.
    """
    if axis_i == axis_j or not (0 <= axis_i <= 6) or not (0 <= axis_j <= 6):
        raise BadAxisPair(f"bad rotation plane ({axis_i}, {axis_j})")
    c, s = math.cos(theta), math.sin(theta)
    comps = list(p)
    pi, pj = comps[axis_i], comps[axis_j]
    comps[axis_i] = pi * c - pj * s
    comps[axis_j] = pi * s + pj * c
    return VecN(*comps)


def cross4(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Generalized cross product of three 4-vectors (batched on leading axes).

    Sign convention: dot(t, cross4(u, v, w)) == det([t, u, v, w]) with the
    four vectors as matrix rows.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    m01 = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    m02 = u[..., 0] * v[..., 2] - u[..., 2] * v[..., 0]
    m03 = u[..., 0] * v[..., 3] - u[..., 3] * v[..., 0]
    m12 = u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1]
    m13 = u[..., 1] * v[..., 3] - u[..., 3] * v[..., 1]
    m23 = u[..., 2] * v[..., 3] - u[..., 3] * v[..., 2]
    out = np.empty(np.broadcast(u, v, w).shape, dtype=np.float64)
    out[..., 0] = +(w[..., 1] * m23 - w[..., 2] * m13 + w[..., 3] * m12)
    out[..., 1] = -(w[..., 0] * m23 - w[..., 2] * m03 + w[..., 3] * m02)
    out[..., 2] = +(w[..., 0] * m13 - w[..., 1] * m03 + w[..., 3] * m01)
    out[..., 3] = -(w[..., 0] * m12 - w[..., 1] * m02 + w[..., 2] * m01)
    return out


@dataclass(frozen=True)
class Hyperplane3Flat:
    """A 3-flat in the active 4-subspace, stored as a 5-component cofactor row.

    For a point with active coordinates (p1, p2, p3, p4) the signed incidence
    is c0 + c1 p1 + c2 p2 + c3 p3 + c4 p4. Cofactors are canonicalized at
    construction: unit normal (c1..c4), sign chosen so the first nonzero
    normal component is positive. Rescaled inputs therefore produce the
    identical plane object.
    """

    cofactors: tuple[float, float, float, float, float]
    axes: ActiveAxes = DEFAULT_AXES

    def __post_init__(self):
        cof = np.asarray(self.cofactors, dtype=np.float64)
        if cof.shape != (5,):
            raise InvalidPlane(f"need 5 cofactors, got {cof.shape}")
        if len(self.axes) != 4:
            raise InvalidPlane("a 3-flat needs exactly 4 active axes")
        length = float(np.linalg.norm(cof[1:]))
        if length < EPS_RANK:
            raise InvalidPlane("hyperplane normal (c1..c4) must be nonzero")
        cof = cof / length
        for c in cof[1:]:
            if abs(c) > EPS_RANK:
                if c < 0.0:
                    cof = -cof
                break
        object.__setattr__(self, "cofactors", tuple(float(c) for c in cof))
        if not isinstance(self.axes, ActiveAxes):
            object.__setattr__(self, "axes", ActiveAxes(self.axes))

    @property
    def normal(self) -> np.ndarray:
        """Unit normal in active coordinates (c1..c4)."""
        return np.array(self.cofactors[1:], dtype=np.float64)

    def signed_incidence(self, p: VecN) -> float:
        c = self.cofactors
        a = self.axes
        return c[0] + c[1] * p[a[0]] + c[2] * p[a[1]] + c[3] * p[a[2]] + c[4] * p[a[3]]

    def incidence_of(self, active_coords: np.ndarray) -> np.ndarray:
        """Vectorized signed incidence for an (n, 4) array of active coords."""
        c = np.asarray(self.cofactors)
        return c[0] + active_coords @ c[1:]

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        """Deterministic orthonormal 3D frame spanning the plane.

        Returns (origin, basis): origin is the active-coordinate point on the
        plane nearest the subspace origin; basis is a (3, 4) row-orthonormal
        matrix. In-plane coordinates of a point P are basis @ (P - origin).
        """
        n = self.normal
        origin = -self.cofactors[0] * n
        rows = []
        for k in np.argsort(np.abs(n), kind="stable")[:3]:
            e = np.zeros(4)
            e[k] = 1.0
            e -= (e @ n) * n
            for r in rows:
                e -= (e @ r) * r
            e /= np.linalg.norm(e)
            rows.append(e)
        return origin, np.stack(rows)

    def to_frame(self, active_coords: np.ndarray) -> np.ndarray:
        """Express active-coordinate points (n, 4) in the plane's 3D frame."""
        origin, basis = self.frame()
        return (np.asarray(active_coords, dtype=np.float64) - origin) @ basis.T


def hyperplane_from_points(p0: VecN, p1: VecN, p2: VecN, p3: VecN,
                           axes: ActiveAxes = DEFAULT_AXES) -> Hyperplane3Flat:
    """Construct the 3-flat through four affinely independent points.

    The normal is the cofactor expansion of the homogeneous 5x5 determinant
    over the active coordinates; the result is canonicalized (unit normal,
    deterministic sign), making the construction order-insensitive.

    Raises DegeneratePoints when the points are affinely dependent.
    """
    if len(axes) != 4:
        raise InvalidPlane("hyperplane_from_points needs 4 active axes")
    q = np.array([[p[i] for i in axes] for p in (p0, p1, p2, p3)], dtype=np.float64)
    d = q[1:] - q[0]
    n = cross4(d[0], d[1], d[2])
    scale3 = float(np.prod(np.linalg.norm(d, axis=1)))
    if float(np.linalg.norm(n)) <= EPS_RANK * max(scale3, EPS_RANK):
        raise DegeneratePoints("the four points are affinely dependent")
    c0 = -float(n @ q[0])
    return Hyperplane3Flat((c0, *n), axes)


@dataclass(frozen=True)
class PlanePose:
    """Anchor point plus axis-pair rotations parameterizing a 3-flat.

    With no angles the plane passes through ``anchor`` with its normal along
    the last active axis; each (axis_i, axis_j, radians) entry then rotates
    that normal, applied in listed order.
    """

    anchor: VecN = ZERO
    angles: tuple[tuple[int, int, float], ...] = ()
    axes: ActiveAxes = DEFAULT_AXES

    def __post_init__(self):
        object.__setattr__(self, "anchor", VecN(*self.anchor))
        object.__setattr__(
            self, "angles",
            tuple((int(i), int(j), float(th)) for i, j, th in self.angles))
        if not isinstance(self.axes, ActiveAxes):
            object.__setattr__(self, "axes", ActiveAxes(self.axes))


def pose_to_hyperplane(pose: PlanePose) -> Hyperplane3Flat:
    """Realize a PlanePose as a canonical Hyperplane3Flat.

    Raises BadAxisPair if an angle names an axis outside the active set.
    """
    axes = pose.axes
    normal = VecN(*(1.0 if i == axes[-1] else 0.0 for i in range(7)))
    for (i, j, theta) in pose.angles:
        if i not in axes or j not in axes:
            raise BadAxisPair(f"rotation axes ({i}, {j}) outside active axes {tuple(axes)}")
        normal = rotate_in_plane(normal, i, j, theta)
    n4 = np.array(normal.active(axes))
    anchor4 = np.array(pose.anchor.active(axes))
    c0 = -float(n4 @ anchor4)
    return Hyperplane3Flat((c0, *n4), axes)


def axis_plane(axis: int, offset: float, axes: ActiveAxes) -> Hyperplane3Flat:
    """The plane ``axis = offset`` (normal along one active axis)."""
    if axis not in axes:
        raise BadAxisPair(f"axis {axis} is not active in {tuple(axes)}")
    n4 = [1.0 if i == axis else 0.0 for i in axes]
    return Hyperplane3Flat((-float(offset), *n4), axes)
