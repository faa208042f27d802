import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperslice.ndvec import (ActiveAxes, BadAxisPair, DegeneratePoints,
                              Hyperplane3Flat, InvalidPlane, PlanePose,
                              SPATIAL_AXES, VecN, axis_plane, blend, dot5,
                              hyperplane_from_points, pose_to_hyperplane,
                              rotate_in_plane, scale, sub)

XYZW = SPATIAL_AXES


def test_blend_midpoint():
    a = VecN(w=-1.0)
    b = VecN(w=+1.0)
    assert blend(a, b, 0.5) == VecN()
    assert blend(a, b, 0.0) == a
    assert blend(a, b, 1.0) == b


def test_scale_annihilator():
    v = VecN(1, 2, 3, 4, 5, 6, 7)
    assert scale(v, 0.0) == VecN()


def test_sub_identity():
    v = VecN(0.3, -2, 9, 1e8, 0, 1, -7)
    assert sub(v, v) == VecN()


def test_dot5_examples():
    assert dot5((0, 0, 0, 0, 1), (1, 0, 0, 0, 0)) == 0.0
    assert dot5((0, 0, 0, 0, 1), (1, 0, 0, 0, 0.7)) == pytest.approx(0.7)
    # point w=-1 lies on w+1=0 scaled by 2
    assert dot5((2, 0, 0, 0, 2), (1, 0, 0, 0, -1)) == 0.0
    with pytest.raises(ValueError):
        dot5((1, 2, 3), (1, 2, 3))


def test_active_axes_validation():
    assert ActiveAxes((0, 1, 2, 3)).names == "txyz"
    assert ActiveAxes.from_names("xyzw") == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        ActiveAxes((3, 1, 2, 0))  # not ascending
    with pytest.raises(ValueError):
        ActiveAxes((0, 1, 2, 2))  # repeated
    with pytest.raises(ValueError):
        ActiveAxes((0, 1))  # too short
    with pytest.raises(ValueError):
        ActiveAxes((0, 1, 2, 9))  # out of range


def test_vecn_from_active():
    v = VecN.from_active([1, 2, 3, 4], XYZW)
    assert v == VecN(0, 1, 2, 3, 4)
    assert v.active(XYZW) == (1, 2, 3, 4)


def test_rotate_quarter_turn():
    p = VecN(x=1.0)
    q = rotate_in_plane(p, 1, 4, math.pi / 2)  # (x, w)
    assert q.w == pytest.approx(1.0, abs=1e-15)
    assert abs(q.x) < 1e-15


def test_rotate_identity():
    p = VecN(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    assert rotate_in_plane(p, 2, 5, 0.0) == p


def test_rotate_bad_pair():
    with pytest.raises(BadAxisPair):
        rotate_in_plane(VecN(), 3, 3, 0.4)
    with pytest.raises(BadAxisPair):
        rotate_in_plane(VecN(), 0, 9, 0.4)


@given(st.lists(st.floats(-1e3, 1e3), min_size=7, max_size=7),
       st.integers(0, 6), st.integers(0, 6), st.floats(-10, 10))
def test_rotate_isometry_and_inverse(comps, i, j, theta):
    if i == j:
        return
    p = VecN(*comps)
    q = rotate_in_plane(p, i, j, theta)
    assert math.sqrt(sum(c * c for c in q)) == pytest.approx(
        math.sqrt(sum(c * c for c in p)), abs=1e-9 * (1 + max(map(abs, p))))
    back = rotate_in_plane(q, i, j, -theta)
    for a, b in zip(back, p):
        assert a == pytest.approx(b, abs=1e-12 * (1 + abs(b)))


def test_hyperplane_coordinate_example():
    pts = [VecN.from_active(c, XYZW) for c in
           ((0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0))]
    h = hyperplane_from_points(*pts, axes=XYZW)
    assert np.allclose(h.normal, (0, 0, 0, 1))
    assert h.cofactors[0] == pytest.approx(0.0, abs=1e-15)


def test_hyperplane_translated_anchor():
    pts = [VecN.from_active((a, b, c, 0.3), XYZW) for a, b, c in
           ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))]
    h = hyperplane_from_points(*pts, axes=XYZW)
    assert np.allclose(h.normal, (0, 0, 0, 1))
    assert h.signed_incidence(VecN()) == pytest.approx(-0.3)


def test_hyperplane_degenerate_points():
    p = VecN.from_active((1, 2, 3, 4), XYZW)
    q = VecN.from_active((0, 1, 0, 0), XYZW)
    r = VecN.from_active((0, 0, 1, 0), XYZW)
    with pytest.raises(DegeneratePoints):
        hyperplane_from_points(p, p, q, r, axes=XYZW)


def test_hyperplane_order_insensitive_exactly():
    rng = np.random.default_rng(5)
    pts = [VecN.from_active(rng.normal(size=4), XYZW) for _ in range(4)]
    h1 = hyperplane_from_points(pts[0], pts[1], pts[2], pts[3], axes=XYZW)
    h2 = hyperplane_from_points(pts[2], pts[0], pts[3], pts[1], axes=XYZW)
    assert np.allclose(h1.cofactors, h2.cofactors, atol=1e-12)


def test_cofactor_scale_invariance():
    h = Hyperplane3Flat((-1.0, 0.0, 2.0, 0.0, 1.0), XYZW)
    for k in (3.0, -0.25, 1e6):
        hk = Hyperplane3Flat(tuple(k * c for c in (-1.0, 0.0, 2.0, 0.0, 1.0)), XYZW)
        assert hk.cofactors == pytest.approx(h.cofactors, abs=1e-15)
    with pytest.raises(InvalidPlane):
        Hyperplane3Flat((1.0, 0.0, 0.0, 0.0, 0.0), XYZW)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_hyperplane_incidence_randomized(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(scale=5.0, size=(4, 4))
    d = pts[1:] - pts[0]
    if abs(np.linalg.det(d @ d.T)) < 1e-6:
        return
    vecs = [VecN.from_active(p, XYZW) for p in pts]
    h = hyperplane_from_points(*vecs, axes=XYZW)
    for v in vecs:
        assert abs(h.signed_incidence(v)) < 1e-9


def test_pose_default_is_last_axis_plane():
    h = pose_to_hyperplane(PlanePose(axes=XYZW))
    assert h.cofactors == pytest.approx((0, 0, 0, 0, 1), abs=1e-15)


def test_pose_translated_anchor():
    h = pose_to_hyperplane(PlanePose(anchor=VecN(w=0.5), axes=XYZW))
    assert h.signed_incidence(VecN(w=0.5)) == pytest.approx(0.0, abs=1e-15)
    assert h.signed_incidence(VecN()) == pytest.approx(-0.5)


def test_pose_quarter_turn_gives_x_plane():
    h = pose_to_hyperplane(PlanePose(angles=((1, 4, math.pi / 2),), axes=XYZW))
    # normal rotated from w to (-x); canonical sign flips it to +x
    assert h.normal == pytest.approx((1, 0, 0, 0), abs=1e-12)
    assert h.cofactors[0] == pytest.approx(0.0, abs=1e-15)


def test_pose_bad_axis():
    with pytest.raises(BadAxisPair):
        pose_to_hyperplane(PlanePose(angles=((0, 4, 0.3),), axes=XYZW))  # t inactive


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_pose_anchor_always_on_plane(seed):
    rng = np.random.default_rng(seed)
    anchor = VecN.from_active(rng.normal(scale=5.0, size=4), XYZW)
    pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    angles = tuple(
        (*pairs[rng.integers(len(pairs))], float(rng.uniform(-math.pi, math.pi)))
        for _ in range(rng.integers(0, 4)))
    h = pose_to_hyperplane(PlanePose(anchor=anchor, angles=angles, axes=XYZW))
    assert abs(h.signed_incidence(anchor)) < 1e-9


def test_axis_plane_shorthand():
    h = axis_plane(4, 0.5, XYZW)
    assert h.signed_incidence(VecN(w=0.5)) == pytest.approx(0.0, abs=1e-15)
    assert h.signed_incidence(VecN(w=0.6)) > 0
    with pytest.raises(BadAxisPair):
        axis_plane(0, 0.5, XYZW)


def test_frame_orthonormal_and_on_plane():
    h = Hyperplane3Flat((-0.7, 0.3, -1.2, 0.4, 2.0), XYZW)
    origin, basis = h.frame()
    assert np.allclose(basis @ basis.T, np.eye(3), atol=1e-12)
    assert np.allclose(basis @ h.normal, 0.0, atol=1e-12)
    assert h.cofactors[0] + origin @ h.normal == pytest.approx(0.0, abs=1e-12)


def test_frame_invariant_under_rescale():
    c = (-0.7, 0.3, -1.2, 0.4, 2.0)
    h1 = Hyperplane3Flat(c, XYZW)
    h2 = Hyperplane3Flat(tuple(-11.0 * x for x in c), XYZW)
    o1, b1 = h1.frame()
    o2, b2 = h2.frame()
    assert np.allclose(o1, o2) and np.allclose(b1, b2)
