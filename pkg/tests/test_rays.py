import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypquilt import groups as G
from hypquilt import hyp_core as hc
from hypquilt import quilt as Q
from hypquilt import rays as R
from oracles import dist

LN2 = math.log(2.0)


def test_sigma_ray_examples():
    r = R.sigma_ray(0.0)
    assert r.base == hc.HPoint(0.0, 1.0) and r.endpoint == 1.0
    for s in (0.0, 0.3, LN2):
        ray = R.sigma_ray(s)
        for t in (0.5, 2.0, 6.0):
            z = ray.point(t)
            assert abs(abs(z.z) - math.exp(s)) < 1e-12 * math.exp(s)
            assert abs(hc.distance(ray.base, z) - t) < 1e-9
        # leaves the imaginary axis orthogonally: the chord slope is O(t)
        z = ray.point(1e-6)
        assert abs(z.y - ray.base.y) < 1e-5 * abs(z.x)


def test_delta_rays_examples():
    s, l = R.delta_c_rays(0.0, LN2)
    assert s.endpoint == pytest.approx(1.0) and l.endpoint == pytest.approx(2.0)
    assert s.base.y == pytest.approx(math.sqrt(2.0))
    s, l = R.delta_c_rays(LN2 / 2, LN2)
    assert s.endpoint == pytest.approx(math.sqrt(2.0))
    assert l.endpoint == pytest.approx(math.sqrt(2.0) * 2.0)
    # short and long rays end at g0-translates of sigma_c's endpoint
    for c in (0.0, math.log(4 / 3)):
        for ray in R.delta_c_rays(c, LN2):
            k = math.log(ray.endpoint / math.exp(c)) / LN2
            assert abs(k - round(k)) < 1e-12


def test_ray_points_hit_the_endpoint():
    ray = R.RaySpec(hc.HPoint(0.3, 1.2), 1.5)
    z = ray.point(30.0)
    assert abs(z.x - 1.5) < 1e-9 and z.y < 1e-9
    for t in (0.5, 3.0):
        assert abs(hc.distance(ray.base, ray.point(t)) - t) < 1e-9


def test_surface_distance_annulus(annulus_group):
    g = annulus_group
    z = hc.HPoint(0.4, 1.1)
    w = hc.apply(G.g0(LN2), z)
    sd = R.surface_distance(z, w, g)
    assert sd.value < 1e-9 and sd.certified
    # w in the fundamental annulus near z: plane distance is the answer
    w = hc.HPoint(0.6, 1.3)
    assert abs(R.surface_distance(z, w, g).value - dist(z.z, w.z)) < 1e-12


def test_surface_distance_trivial_ball(annulus_group):
    spec = Q.annulus_spec(LN2, 0)
    grp = G.assemble_group(spec)
    z, w = hc.HPoint(0.0, 1.0), hc.HPoint(0.1, 1.2)
    sd = R.surface_distance(z, w, grp, exact=False)
    assert len(grp.ball) == 1 and sd.value == pytest.approx(hc.distance(z, w), abs=1e-14)


pts = st.tuples(st.floats(-0.6, 0.6), st.floats(1.0, 2.0))


@settings(max_examples=25)
@given(pts, pts, pts)
def test_surface_distance_metric(shipped_group, a, b, c):
    A, B, C = (hc.HPoint(*p) for p in (a, b, c))
    d = lambda u, v: R.surface_distance(u, v, shipped_group).value
    ab, ba, bc, ac = d(A, B), d(B, A), d(B, C), d(A, C)
    assert abs(ab - ba) < 1e-9
    assert ac <= ab + bc + 1e-9
    assert ab <= hc.distance(A, B) + 1e-12


def test_delta_annulus_critical(annulus_group):
    # psi(e^{a/2}) leaves the core orthogonally into the funnel: Delta stays 0
    p = annulus_group.basepoint
    ray = R.RaySpec(p, -math.exp(LN2 / 2))
    prof = R.delta_profile(ray, R.sample_times(6.0, 1.0), annulus_group)
    assert all(prof.certified_flags) and max(prof.delta_values) < 1e-6
    assert prof.verdict == "critical-consistent"


def test_delta_spiral_grows(annulus_group):
    # straight down the core: the quotient distance stays bounded by a
    ray = R.RaySpec(annulus_group.basepoint, 0.0)
    prof = R.delta_profile(ray, R.sample_times(8.0, 1.0), annulus_group)
    d = prof.delta_values
    assert all(b >= a - 1e-12 for a, b in zip(d, d[1:]))
    assert d[-1] > 8.0 - LN2 and prof.verdict == "horocyclic-consistent"


def test_delta_nonnegative_nondecreasing(shipped_spec, shipped_group):
    ray = R.probe_ray(shipped_spec, shipped_group)
    prof = R.delta_profile(ray, R.sample_times(6.0, 0.5), shipped_group)
    cd = [v for v, c in zip(prof.delta_values, prof.certified_flags) if c]
    assert all(v >= 0 for v in prof.delta_values)
    assert all(b >= a - 1e-9 for a, b in zip(cd, cd[1:]))


def test_sigma_critical(shipped_spec, shipped_group):
    for c in shipped_spec.c_positions:
        prof = R.delta_profile(R.sigma_ray(c), R.sample_times(4.0, 1.0), shipped_group)
        assert all(abs(v) < 1e-6 for v, k in zip(prof.delta_values, prof.certified_flags) if k)


def test_threads_match_serial(shipped_spec, shipped_group):
    ray = R.delta_c_rays(0.0, LN2)[0]
    ts = R.sample_times(3.0, 0.5)
    a = R.delta_profile(ray, ts, shipped_group, workers=1).to_json()
    b = R.delta_profile(ray, ts, shipped_group, workers=4).to_json()
    assert a == b


def test_probe_ray(shipped_spec, shipped_group, theoremc_spec, theoremc_group):
    r = R.probe_ray(shipped_spec, shipped_group)
    assert r.endpoint == pytest.approx(1.5005, abs=1e-4)
    assert 1.0 < r.endpoint < 2.0
    assert all(abs(r.endpoint - c) > 0.05 for c in shipped_spec.c_star)
    r = R.probe_ray(theoremc_spec, theoremc_group)
    assert r.endpoint == pytest.approx(1.32644, abs=1e-4)
    spec = Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), LN2, depth=1, word_ball=2)
    grp = G.assemble_group(spec)
    iv = spec.intervals[0]
    assert R.probe_ray(spec, grp).endpoint == pytest.approx(math.exp(iv.start + iv.length / 2))


def test_classify_profile():
    assert R.classify_profile([1, 2], [0.0, 0.0], [True, True]) == "critical-consistent"
    assert R.classify_profile([1, 2], [3.0, 6.0], [True, True]) == "horocyclic-consistent"
    assert R.classify_profile([1, 2, 3], [0.5, 0.5, 0.5], [True] * 3) == "subcritical-consistent"
    assert R.classify_profile([1], [0.0], [False]) == "inconclusive"


def test_scaffold_distance_examples(shipped_spec, shipped_group):
    for s in shipped_spec.c_positions:
        z = hc.point_at(Q.scaffolding_lift(s), 0.7)
        assert R.scaffold_distance(z, shipped_spec, shipped_group) < 1e-9
    # p~ sits on the core between the lifts at heights 1 and 4/3 (and 2)
    p = shipped_spec.p_tilde
    expect = min(abs(p.y and math.log(p.y) - s) for s in shipped_spec.c_positions)
    assert abs(R.scaffold_distance(p, shipped_spec, shipped_group) - expect) < 1e-12


def test_scaffold_equivariance(shipped_spec, shipped_group):
    z = hc.HPoint(0.2, 1.3)
    base = R.scaffold_distance(z, shipped_spec, shipped_group)
    for i in range(1, 12):
        g = shipped_group.isometry(i)
        assert abs(R.scaffold_distance(hc.apply(g, z), shipped_spec, shipped_group) - base) < 1e-9


def test_sigma_scan(shipped_spec, shipped_group):
    s = R.theorem_sigma_scan(R.sigma_ray(math.log(4 / 3)), 0.1, 4.0, shipped_spec, shipped_group)
    assert max(s.trace) < 1e-9 and s.t_epsilon == s.times[0]
    ray = R.delta_c_rays(0.0, LN2)[0]
    loose = R.theorem_sigma_scan(ray, 0.1, 8.0, shipped_spec, shipped_group)
    tight = R.theorem_sigma_scan(ray, 0.01, 8.0, shipped_spec, shipped_group)
    assert loose.t_epsilon is not None and loose.t_epsilon <= 8.0
    assert tight.t_epsilon is None or tight.t_epsilon >= loose.t_epsilon


def test_distance_lemma_battery(shipped_spec, shipped_group):
    rep = R.verify_distance_lemmas(shipped_spec, shipped_group, trials=100)
    assert rep["passed"], rep["failures"]
    assert rep["trials"] == {"a": 100, "b": 100, "c": 100}
    assert rep["worst"]["a"] < 1e-6 and rep["worst"]["b"] > 0 and rep["worst"]["c"] > 0


def test_battery_deterministic(shipped_spec, shipped_group):
    a = R.verify_distance_lemmas(shipped_spec, shipped_group, 30, np.random.default_rng(5))
    b = R.verify_distance_lemmas(shipped_spec, shipped_group, 30, np.random.default_rng(5))
    assert a == b
