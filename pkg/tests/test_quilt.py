import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypquilt import hyp_core as hc
from hypquilt import lemmas as lm
from hypquilt import quilt as Q

LN2 = math.log(2.0)


def test_normalize_examples():
    A, B, img = Q.normalize_compact_set(Q.CompactSetSpec.parse([[0, 3]]), LN2)
    assert A == pytest.approx(1 / 3, abs=1e-15) and B == pytest.approx(1.0, abs=1e-15)
    assert img.components == ((1.0, 2.0),)
    A, B, img = Q.normalize_compact_set(Q.CompactSetSpec.parse([0, 1]), LN2)
    assert (A, B) == (1.0, 1.0) and img.points() == [1.0, 2.0]
    A2, B2, _ = Q.normalize_compact_set(img, LN2)
    assert abs(A2 - 1) < 1e-15 and abs(B2) < 1e-15


def test_normalize_degenerate():
    with pytest.raises(hc.DegenerateInputError):
        Q.normalize_compact_set(Q.CompactSetSpec.parse([2.0]), LN2)


def test_compact_set_validation():
    with pytest.raises(Q.QuiltConfigError):
        Q.CompactSetSpec(((0.0, 1.0), (0.5, 2.0)))
    with pytest.raises(Q.QuiltConfigError):
        Q.CompactSetSpec(())
    with pytest.raises(Q.QuiltConfigError):
        Q.CompactSetSpec.parse(["x"])
    K = Q.CompactSetSpec.parse([3, [0, 1]])
    assert K.components == ((0.0, 1.0), (3.0, 3.0))
    assert K.to_json() == [[0.0, 1.0], 3.0]


def test_lambda_map_examples():
    a = 0.8
    assert Q.lambda_map(math.exp(a / 2), a) == pytest.approx(a / 2, abs=1e-15)
    assert Q.lambda_map(1.0, a) == 0.0
    for c in (1.0, 1.3, math.exp(a)):
        assert abs(Q.lambda_inverse(Q.lambda_map(c, a)) - c) < 1e-12
    with pytest.raises(Q.QuiltConfigError):
        Q.lambda_map(0.5, a)


def test_complement_examples():
    cs = Q.CircleSet(1.0, ((0.2, 0.2), (0.5, 0.5)), basepoint=0.0)
    I = Q.complement_intervals(cs)
    assert (I[0].start, I[0].end) == (0.5, pytest.approx(0.2))
    assert I[0].length == pytest.approx(0.7) and I[1].length == pytest.approx(0.3)
    assert (I[1].start, I[1].end) == (0.2, 0.5)
    tie = Q.complement_intervals(Q.CircleSet(1.0, ((0.25, 0.25), (0.75, 0.75)), basepoint=0.0))
    assert tie[0].start == 0.25 and tie[1].start == 0.75
    with pytest.raises(Q.QuiltConfigError):
        Q.complement_intervals(Q.CircleSet(1.0, ((0.3, 0.3),)))


@given(st.lists(st.floats(0.0, 0.999), min_size=2, max_size=8, unique=True))
def test_complement_partition(pts):
    pts = sorted(pts)
    if min(b - a for a, b in zip(pts, pts[1:] + [pts[0] + 1.0])) < 1e-6:
        return
    cs = Q.CircleSet(1.0, tuple((p, p) for p in pts), basepoint=0.5)
    I = Q.complement_intervals(cs)
    assert abs(sum(iv.length for iv in I) - 1.0) < 1e-12
    lens = [iv.length for iv in I]
    assert all(b <= a + 1e-12 for a, b in zip(lens, lens[1:]))
    assert [iv.index for iv in I] == list(range(1, len(I) + 1))


def test_scaffolding_lifts():
    assert Q.scaffolding_lift(0.0) == hc.Semicircle(0.0, 1.0)
    a = 0.7
    g0 = hc.Isometry.dilation(math.exp(a))
    moved = hc.apply_geodesic(g0, Q.scaffolding_lift(0.0))
    assert abs(moved.radius - Q.scaffolding_lift(a).radius) < 1e-14
    # orthogonal to the core: the lift meets the imaginary axis at its top
    for s in (0.0, 0.3, 1.1):
        g = Q.scaffolding_lift(s)
        top = hc.HPoint(0.0, math.exp(s))
        assert hc.contains_point(g, top, 1e-12)
        assert abs(g.center) < 1e-12


def test_shipped_spec(shipped_spec):
    s = shipped_spec
    assert s.basepoint == pytest.approx(LN2 / 2)
    assert len(s.circle_set.point_positions()) == 2          # 0 and a identified
    assert s.c_positions == pytest.approx((0.0, math.log(4 / 3), LN2))
    assert len(s.intervals) == 2 and len(s.flutes) == 2
    I1, I2 = s.intervals
    assert I1.length == pytest.approx(LN2 - math.log(4 / 3), abs=1e-12)
    assert I2.length == pytest.approx(math.log(4 / 3), abs=1e-12)
    for iv, fl in zip(s.intervals, s.flutes):
        assert fl.first_length == iv.length and fl.depth == 3
        assert fl.tail_length == pytest.approx(lm.kappa_inverse(LN2 + 1), abs=1e-14)
    assert s.reproject() == pytest.approx([0.0, 1.0, 3.0], abs=1e-10)
    assert s.c_star == pytest.approx([1.0, 4 / 3, 2.0])


def test_spec_errors():
    with pytest.raises(Q.QuiltConfigError):
        Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1]), LN2)
    with pytest.raises(Q.QuiltConfigError):
        Q.build_quilt_spec(Q.CompactSetSpec.parse([[0, 1]]), LN2)
    with pytest.raises(Q.QuiltConfigError):
        Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), 1.5)
    with pytest.raises(Q.QuiltConfigError, match="collar"):
        Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), 0.95, theoremC=True)
    with pytest.raises(Q.QuiltConfigError):
        Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), LN2, depth=[2, 3, 4])
    Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), 0.9, theoremC=True)


def test_per_flute_depth():
    s = Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), LN2, depth=[2, 4])
    assert [f.depth for f in s.flutes] == [2, 4]
    assert s.flutes[1].lengths() == [s.flutes[1].first_length] + [s.flutes[1].tail_length] * 3


def test_cantor_stage():
    K = Q.cantor_stage(2)
    assert len(K.components) == 4
    assert K.components[1] == pytest.approx((2 / 9, 1 / 3))
    s = Q.build_quilt_spec(K, LN2, 2, 6)
    # four arcs, the outer two joined through the identified endpoint
    assert len(s.circle_set.arcs) == 3 and len(s.intervals) == 3
    assert s.reproject() == pytest.approx(K.points(), abs=1e-10)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=7, unique=True),
       st.floats(0.2, 1.0))
def test_reprojection_roundtrip(xs, a):
    xs = sorted(xs)
    if min(b - x for x, b in zip(xs, xs[1:])) < 1e-3 * (xs[-1] - xs[0]):
        return
    s = Q.build_quilt_spec(Q.CompactSetSpec.parse(xs), a, 2, 2)
    assert s.reproject() == pytest.approx(xs, abs=1e-10 * max(1.0, abs(xs[0]), abs(xs[-1])) * 10)
    assert abs(sum(iv.length for iv in s.intervals) - a) < 1e-12


def test_annulus_spec():
    s = Q.annulus_spec(LN2, 3)
    assert s.flutes == () and s.K is None and s.c_star == []
    assert s.p_tilde.x == 0.0 and s.p_tilde.y == pytest.approx(math.sqrt(2), abs=1e-15)


def test_spec_to_json(shipped_spec):
    j = Q.spec_to_json(shipped_spec)
    assert j["K"] == [0.0, 1.0, 3.0]
    assert [f["depth"] for f in j["flutes"]] == [3, 3]
