"""Axis-drop projections to 3-space and the standard multi-viewport sets.

Projection is orthographic: an optional list of coordinate-plane
pre-rotations is applied, then the dropped components are discarded and
the remaining three active coordinates are emitted in ascending axis
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ndvec import AXIS_NAMES, ActiveAxes, VecN, axis_index


class BadViewSpec(ValueError):
    """Drop/rotation axes inconsistent with the model's active axes."""


@dataclass(frozen=True)
class ViewSpec:
    """One 3D viewport: axes to drop, pre-rotations, and a label."""

    drop: tuple[int, ...]
    rotations: tuple[tuple[int, int, float], ...] = ()
    label: str = ""

    def __post_init__(self):
        d = tuple(int(i) for i in self.drop)
        if not 1 <= len(d) <= 2 or len(set(d)) != len(d):
            raise BadViewSpec(f"drop must name 1 or 2 distinct axes: {d}")
        if any(i < 0 or i > 6 for i in d):
            raise BadViewSpec(f"drop axes must lie in [0, 6]: {d}")
        object.__setattr__(self, "drop", d)
        object.__setattr__(
            self, "rotations",
            tuple((int(i), int(j), float(t)) for i, j, t in self.rotations))


def _validate(view: ViewSpec, axes: ActiveAxes) -> tuple[int, ...]:
    """Check the view against the active axes; return the kept axes."""
    for i in view.drop:
        if i not in axes:
            raise BadViewSpec(
                f"drop axis {AXIS_NAMES[i]} not active in {axes.names}")
    kept = tuple(i for i in axes if i not in view.drop)
    if len(kept) != 3:
        raise BadViewSpec(
            f"dropping {view.drop} from {tuple(axes)} leaves {len(kept)} axes, need 3")
    for (i, j, _) in view.rotations:
        if i == j or not (0 <= i <= 6) or not (0 <= j <= 6):
            raise BadViewSpec(f"bad rotation plane ({i}, {j})")
    return kept


def rotation_matrix7(rotations) -> np.ndarray:
    """Compose coordinate-plane rotations into a 7x7 matrix (listed order)."""
    m = np.eye(7)
    for (i, j, theta) in rotations:
        r = np.eye(7)
        c, s = math.cos(theta), math.sin(theta)
        r[i, i] = c
        r[i, j] = -s
        r[j, i] = s
        r[j, j] = c
        m = r @ m
    return m


def projection_matrix(view: ViewSpec, axes: ActiveAxes) -> np.ndarray:
    """(3, 7) linear map realizing the view: rotate, then keep 3 axes."""
    kept = _validate(view, axes)
    m = rotation_matrix7(view.rotations)
    return m[list(kept), :]


def project(points, view: ViewSpec, axes: ActiveAxes) -> np.ndarray:
    """Project points (VecN sequence or (n, 7) array) to (n, 3).

    Point count and order are preserved; with no rotations the surviving
    coordinates pass through unchanged.
    """
    mat = projection_matrix(view, axes)
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=np.float64)
    else:
        arr = np.array([tuple(VecN(*p)) for p in points], dtype=np.float64)
    arr = arr.reshape(-1, 7)
    return arr @ mat.T


# Front/Side/Top: fixed rotations of the default-drop projection.
_ROTATED_VIEWS = (
    ("Front", ((axis_index("x"), axis_index("z"), math.pi / 2),)),
    ("Side", ((axis_index("x"), axis_index("z"), -math.pi / 2),)),
    ("Top", ((axis_index("y"), axis_index("z"), math.pi / 2),)),
)


def standard_viewports(active_count: int,
                       axes: ActiveAxes | None = None) -> list[ViewSpec]:
    """The standard 3D viewport set.

    For 5 active axes: twelve views — three rotated views of the primary
    (t, w)-drop projection, then the axis-pair drops (WX, WY, WZ),
    (TX, TY, TZ), (ZY, ZX, YX). For 4 active axes: the four single-axis
    drops plus three rotated views of the default (last-axis) drop.
    """
    if active_count not in (4, 5):
        raise ValueError("active_count must be 4 or 5")
    if axes is None:
        axes = ActiveAxes(tuple(range(active_count)))  # t,x,y,z[,w]
    if len(axes) != active_count:
        raise BadViewSpec("axes length must equal active_count")

    views: list[ViewSpec] = []
    if active_count == 5:
        primary = (axes[0], axes[4])
        for label, rot in _ROTATED_VIEWS:
            views.append(ViewSpec(primary, rot, label))
        t, x, y, z, w = axes
        pairs = ((w, x), (w, y), (w, z), (t, x), (t, y), (t, z),
                 (z, y), (z, x), (y, x))
        for a, b in pairs:
            views.append(ViewSpec((a, b), (),
                                  f"{AXIS_NAMES[a].upper()}{AXIS_NAMES[b].upper()}"))
    else:
        default = axes[-1]
        for label, rot in _ROTATED_VIEWS:
            views.append(ViewSpec((default,), rot, label))
        for a in axes:
            views.append(ViewSpec((a,), (), f"drop {AXIS_NAMES[a].upper()}"))
    for v in views:
        _validate(v, axes)
    return views
