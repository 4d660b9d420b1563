"""The thirteen acceptance criteria, one test each.

Every test prints a single ``[ACCEPT nn] PASS|FAIL name (details)`` line to
the terminal, even under captured output, and then asserts. Run directly with
``python3 tests/test_acceptance.py`` for just the summary.
"""

import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hypquilt import cli  # noqa: E402
from hypquilt import dirichlet as D  # noqa: E402
from hypquilt import groups as G  # noqa: E402
from hypquilt import hyp_core as hc  # noqa: E402
from hypquilt import lemmas as lm  # noqa: E402
from hypquilt import quilt as Q  # noqa: E402
from hypquilt import rays as R  # noqa: E402
from oracles import dist  # noqa: E402

LN2 = math.log(2.0)
EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "hypquilt" / "examples"
N = 10_000


def _say(n, name, ok, detail, t0):
    line = f"[ACCEPT {n:02d}] {'PASS' if ok else 'FAIL'} {name} ({detail}; {time.perf_counter() - t0:.2f}s)"
    _OUT["write"](line)
    return ok


_OUT = {"write": print}


@pytest.fixture(autouse=True)
def _show(pytestconfig):
    # the PASS/FAIL lines must reach the terminal even with capture on
    tr = pytestconfig.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        _OUT["write"] = lambda line: (tr.ensure_newline(), tr.write_line(line))
    yield


@pytest.fixture(scope="module")
def shipped():
    spec = Q.build_quilt_spec(Q.CompactSetSpec.parse([0, 1, 3]), LN2, 3, 10)
    return spec, G.assemble_group(spec)


def test_01_distance_kernel():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(N):
        z = complex(rng.uniform(-5, 5), math.exp(rng.uniform(-3, 3)))
        w = complex(rng.uniform(-5, 5), math.exp(rng.uniform(-3, 3)))
        ref = dist(z, w)
        got = hc.distance(hc.HPoint.from_complex(z), hc.HPoint.from_complex(w))
        worst = max(worst, abs(got - ref))
    core = max(abs(hc.distance(hc.HPoint(0, 1), hc.HPoint(0, math.exp(a))) - a)
               for a in (0.1, LN2, 1.0, 5.0))
    ok = worst < 1e-10 and core < 1e-12
    assert _say(1, "distance kernel", ok, f"max err {worst:.2e}, core err {core:.1e}", t0)


def test_02_triangle_lemma():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    margin, agree = math.inf, 0.0
    for _ in range(N):
        k, t = math.exp(rng.uniform(0.001, 4.0)), rng.uniform(1e-4, 1 - 1e-4)
        lo, hi = lm.triangle_bounds(k)
        f = lm.triangle_gap(k, t)
        margin = min(margin, lo, f - lo, hi - f)
        agree = max(agree, abs(f - lm.triangle_gap_metric(k, t)))
    lim = max(max(abs(lm.triangle_gap(k, lm.LIMIT_T0) - lm.triangle_bounds(k)[0]),
                  abs(lm.triangle_gap(k, lm.LIMIT_T1) - lm.triangle_bounds(k)[1]))
              for k in (1.1, 2.0, 5.0, 20.0))
    ok = margin > 0 and agree < 1e-9 and lim < 1e-6
    assert _say(2, "lemma triangle", ok,
                f"min margin {margin:.2e}, metric err {agree:.1e}, limit err {lim:.1e}", t0)


def test_03_quad_lemma():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    side_err, zero_err = 0.0, 0.0
    for _ in range(500):
        x0, r = rng.uniform(0.01, 0.99), rng.uniform(1.0, 20.0)
        cf, mt = lm.quad_sides(x0, r), lm.quad_sides_metric(x0, r)
        side_err = max(side_err, max(abs(cf[s] - mt[s]) for s in cf))
        zero_err = max(zero_err, abs(lm.quad_defect(x0, 1.0)))
    grid = [lm.quad_defect(0.5, r) for r in np.linspace(1.0, 10.0, 101)[1:]]
    ok = side_err < 1e-10 and zero_err < 1e-10 and min(grid) > 0
    assert _say(3, "lemma quad", ok,
                f"side err {side_err:.1e}, defect(r=1) {zero_err:.1e}, min defect {min(grid):.2e}", t0)


def test_04_fewercases():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = math.inf
    for _ in range(N):
        sa, sc = rng.uniform(-4, 4, size=2)
        ang, lr = rng.uniform(0.05, math.pi - 0.05), rng.uniform(-3, 3)
        B = hc.HPoint(math.exp(lr) * math.cos(ang), math.exp(lr) * math.sin(ang))
        s = lm.fewercases_slack(hc.HPoint(0, math.exp(sa)), hc.HPoint(0, math.exp(sc)), B,
                                hc.IMAG_AXIS)
        worst = min(worst, s)
    assert _say(4, "lemma fewercases", worst > 0, f"min slack {worst:.2e}", t0)


def test_05_gamma0_exactness():
    t0 = time.perf_counter()
    errs = []
    for a in (LN2, 0.5, 1.0):
        spec = Q.annulus_spec(a, 4)
        ap = D.boundary_at_infinity(spec.p_tilde, G.assemble_group(spec).ball.mats)
        got = sorted((iv.lo, iv.hi) for iv in ap.boundary_at_infinity)
        want = [(-math.exp(a), -1.0), (1.0, math.exp(a))]
        errs.append(max(abs(x - y) for p, q in zip(got, want) for x, y in zip(p, q))
                    if len(got) == 2 else math.inf)
    ok = max(errs) < 1e-10
    assert _say(5, "Gamma0 Dirichlet exactness", ok, f"max endpoint err {max(errs):.1e}", t0)


def test_06_group_fidelity():
    t0 = time.perf_counter()
    res = {}
    for f in sorted(EXAMPLES.glob("*.json")):
        cfg = cli.load_config(str(f), {})
        spec = cli.build_spec(cfg)
        res[f.stem] = G.fidelity_checks(spec, cli.build_group(cfg, spec))
    ok = all(r["passed"] for r in res.values())
    detail = ", ".join(f"{k}: len {r['max_length_error']:.0e} tr {r['max_parabolic_trace_error']:.0e} "
                       f"disp {r['min_displacement']:.3f}" for k, r in res.items())
    assert _say(6, "group fidelity", ok, detail, t0)


def test_07_sigma_critical(shipped):
    t0 = time.perf_counter()
    spec, grp = shipped
    times = R.sample_times(8.0, 0.5)
    worst, fracs = 0.0, []
    for c in spec.c_positions:
        p = R.delta_profile(R.sigma_ray(c), times, grp)
        cd = [abs(d) for d, k in zip(p.delta_values, p.certified_flags) if k]
        worst = max([worst] + cd)
        fracs.append(len(cd) / len(times))
    ok = worst < 1e-6 and min(fracs) >= 0.8
    assert _say(7, "theorem sigma criticality", ok,
                f"max |Delta| {worst:.1e}, min certified {min(fracs):.0%}", t0)


def test_08_onepoint_critical(shipped):
    t0 = time.perf_counter()
    spec, grp = shipped
    times = R.sample_times(8.0, 0.5)
    verdicts = {}
    for c in sorted({round(s % spec.a, 14) for s in spec.c_positions}):
        s, l = (R.delta_profile(r, times, grp) for r in R.delta_c_rays(c, spec.a))
        verdicts[f"{c:.4f}"] = (s.verdict, l.verdict)
    probe = R.delta_profile(R.probe_ray(spec, grp), times, grp)
    ok = all("critical-consistent" in v for v in verdicts.values()) and \
        probe.verdict != "critical-consistent"
    assert _say(8, "one-point criticality", ok,
                f"delta {verdicts}, {probe.label} -> {probe.verdict}", t0)


def test_09_boundary_convergence(shipped):
    t0 = time.perf_counter()
    spec, grp = shipped
    balls = [G.enumerate_ball(grp.generators, L, spec.p_tilde, G.DEFAULT_PRUNE) for L in (6, 8, 10)]
    rep = D.convergence_report(spec.p_tilde, balls, spec)
    inside = all(r["all_c_star_contained"] for r in rep["reports"])
    ex = [r["excess_measure"] for r in rep["reports"]]
    ok = rep["monotone"] and inside and rep["excess_nonincreasing"]
    assert _say(9, "boundary convergence", ok,
                f"nested {rep['nested']}, C* inside {inside}, excess {[round(e, 6) for e in ex]}", t0)


def test_10_theoremC():
    t0 = time.perf_counter()
    K = Q.CompactSetSpec.parse([0, 1, 3])
    out = {}
    for flag in (True, False):
        spec = Q.build_quilt_spec(K, 0.5, 3, 10, theoremC=flag)
        grp = G.assemble_group(spec)
        ap = D.boundary_at_infinity(spec.p_tilde, grp.ball.mats, 10)
        out[flag] = D.compare_to_prediction(ap, spec)
    on, off = out[True], out[False]
    ok = on["left_interval_measure"] < 0.05 and off["left_interval_full"] and \
        abs(off["left_interval_measure"] - (math.exp(0.5) - 1)) < 1e-10
    assert _say(10, "theorem C", ok,
                f"measure with {on['left_interval_measure']:.3g}, without "
                f"{off['left_interval_measure']:.6f} (full {off['left_interval_full']})", t0)


def test_11_theorem_Sigma(shipped):
    t0 = time.perf_counter()
    spec, grp = shipped
    res = []
    for c in sorted({round(s % spec.a, 14) for s in spec.c_positions}):
        for ray in R.delta_c_rays(c, spec.a):
            sc = R.theorem_sigma_scan(ray, 0.1, 8.0, spec, grp)
            q = sc.trace[-max(2, len(sc.trace) // 4):]
            mono = all(b <= a + 1e-12 for a, b in zip(q, q[1:]))
            res.append((ray.label, sc.t_epsilon, mono))
    ok = all(t is not None and t <= 8.0 and m for _, t, m in res)
    assert _say(11, "theorem Sigma scaffold scan", ok,
                ", ".join(f"{l}: t_eps={t} mono={m}" for l, t, m in res), t0)


def test_12_distance_battery(shipped):
    t0 = time.perf_counter()
    spec, grp = shipped
    rep = R.verify_distance_lemmas(spec, grp, 1000, np.random.default_rng(0))
    w = rep["worst"]
    assert _say(12, "distance-lemma battery", rep["passed"],
                f"trials {rep['trials']}, worst a {w['a']:.1e} b {w['b']:.3f} c {w['c']:.3f}", t0)


def test_13_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = str(EXAMPLES / "two_flute.json")
    same = {}
    for cmd in ("build", "dirichlet", "ray"):
        outs = []
        for i in range(2):
            out = tmp_path / f"{cmd}{i}"
            cli.main([cmd, "--config", cfg, "--out", str(out)])
            outs.append((out / "report.json").read_bytes())
        same[cmd] = outs[0] == outs[1] and json.loads(outs[0])["schema"] == 1
    assert _say(13, "determinism", all(same.values()), f"byte-identical {same}", t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
