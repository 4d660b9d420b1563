"""Closed-form plane-geometry quantities with brute-force metric checks.

Each closed form comes with a function that rebuilds the configuration from
explicit points and measures it with :func:`hyp_core.distance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hyp_core as hc


class LemmaDomainError(ValueError):
    pass


# ---------------------------------------------------------------- triangle


@dataclass(frozen=True)
class RightTriangleSample:
    k: float
    t: float

    def __post_init__(self):
        if not (self.k > 1 and 0 < self.t < 1):
            raise LemmaDomainError(f"need k > 1 and 0 < t < 1, got k={self.k}, t={self.t}")

    def points(self):
        s = math.sqrt(1.0 - self.t * self.t)
        return hc.HPoint(0.0, 1.0), hc.HPoint(0.0, self.k), hc.HPoint(s, self.t)


def triangle_gap(k: float, t: float) -> float:
    """e - b for the right triangle with E = i, B = ki, A = s + ti."""
    RightTriangleSample(k, t)
    k2 = k * k
    num = 1.0 + k2 + math.sqrt(1.0 + k2 * k2 + 2.0 * k2 * (1.0 - 2.0 * t * t))
    den = 2.0 * k * (1.0 + math.sqrt(1.0 - t * t))
    return math.log(num / den)


def triangle_gap_metric(k: float, t: float) -> float:
    E, B, A = RightTriangleSample(k, t).points()
    return hc.distance(A, B) - hc.distance(A, E)


# Sample points for the two limits. Near t = 1 the gap behaves like
# log k - sqrt(1 - t^2), so the upper sample is placed where the leg
# sqrt(1 - t^2) equals 1e-7 rather than where 1 - t does.
LIMIT_T0 = 1e-6
LIMIT_T1 = math.sqrt(1.0 - 1e-14)


def triangle_bounds(k: float) -> tuple[float, float]:
    """(infimum at t -> 0, supremum at t -> 1)."""
    return math.log((k * k + 1.0) / (2.0 * k)), math.log(k)


# ---------------------------------------------------------------- fewercases


def kappa_gap(k: float) -> float:
    return 2.0 * math.log((k * k + 1.0) / (2.0 * k))


def fewercases_slack(A: hc.HPoint, C: hc.HPoint, B: hc.HPoint, gam: hc.Geodesic) -> float:
    """|AB| + |BC| - |AC| - 2 log((k^2+1)/2k) with log k = d(B, gam)."""
    depth = hc.distance_to_geodesic(B, gam)
    if depth <= 1e-12:
        raise hc.DegenerateInputError("B lies on the geodesic")
    k = math.exp(depth)
    return hc.distance(A, B) + hc.distance(B, C) - hc.distance(A, C) - kappa_gap(k)


# ---------------------------------------------------------------- quad


@dataclass(frozen=True)
class QuadSample:
    x0: float
    r: float

    def __post_init__(self):
        if not (0 < self.x0 < 1 and self.r >= 1):
            raise LemmaDomainError(f"need 0 < x0 < 1 and r >= 1, got x0={self.x0}, r={self.r}")

    def points(self):
        x0, r = self.x0, self.r
        y0 = math.sqrt(1.0 - x0 * x0)
        y1 = math.sqrt(r * r - x0 * x0)
        return {"A": hc.HPoint(x0, y0), "B": hc.HPoint(0.0, 1.0),
                "C": hc.HPoint(x0, y1), "D": hc.HPoint(0.0, r)}


def quad_sides(x0: float, r: float) -> dict:
    QuadSample(x0, r)
    y0 = math.sqrt(1.0 - x0 * x0)
    y1 = math.sqrt(r * r - x0 * x0)
    return {"BD": math.log(r), "AB": math.log((1.0 + x0) / y0),
            "AC": math.log(y1 / y0), "CD": math.log((r + x0) / y1)}


def quad_sides_metric(x0: float, r: float) -> dict:
    p = QuadSample(x0, r).points()
    return {s: hc.distance(p[s[0]], p[s[1]]) for s in ("BD", "AB", "AC", "CD")}


def quad_defect(x0: float, r: float) -> float:
    """(|AB| + |BD|) - (|AC| + |CD|)."""
    QuadSample(x0, r)
    return math.log1p(x0) + math.log(r / (r + x0))


def quad_defect_metric(x0: float, r: float) -> float:
    s = quad_sides_metric(x0, r)
    return (s["AB"] + s["BD"]) - (s["AC"] + s["CD"])


# ---------------------------------------------------------------- collar constants


def kappa(R: float) -> float:
    if R < 0:
        raise LemmaDomainError("kappa needs R >= 0")
    # 2 log cosh R without overflow for large R
    return 2.0 * (R + math.log1p(math.exp(-2.0 * R)) - math.log(2.0))


def kappa_inverse(y: float) -> float:
    if y < 0:
        raise LemmaDomainError("kappa_inverse needs y >= 0")
    return math.acosh(math.exp(0.5 * y))


def collar_halfwidth(length: float) -> float:
    if not length > 0:
        raise LemmaDomainError("collar needs a positive length")
    return math.asinh(1.0 / (2.0 * math.sinh(0.5 * length)))


# ---------------------------------------------------------------- batteries


def _random_isometry(rng) -> hc.Isometry:
    a, b, c = rng.normal(size=3)
    # pick d so ad - bc = 1, avoiding tiny a
    a = a if abs(a) > 0.2 else 0.2 + abs(a)
    return hc.Isometry.from_matrix(a, b, c, (1.0 + b * c) / a)


def battery_triangle(rng, trials: int, tol: float = 1e-9) -> dict:
    ks = np.exp(rng.uniform(1e-3, 4.0, trials))
    ts = rng.uniform(1e-4, 1 - 1e-4, trials)
    worst_match, min_margin = 0.0, math.inf
    for k, t in zip(ks, ts):
        f = triangle_gap(k, t)
        lo, hi = triangle_bounds(k)
        min_margin = min(min_margin, lo, f - lo, hi - f)
        worst_match = max(worst_match, abs(f - triangle_gap_metric(k, t)))
    lim_err = 0.0
    for k in (1.5, 2.0, 5.0):
        lo, hi = triangle_bounds(k)
        lim_err = max(lim_err, abs(triangle_gap(k, LIMIT_T0) - lo), abs(triangle_gap(k, LIMIT_T1) - hi))
    ok = min_margin > 0 and worst_match < tol and lim_err < 1e-6
    return {"passed": bool(ok), "trials": trials, "min_chain_margin": min_margin,
            "max_metric_error": worst_match, "max_limit_error": lim_err}


def battery_fewercases(rng, trials: int) -> dict:
    worst = math.inf
    for _ in range(trials):
        g = _random_isometry(rng)
        gam = hc.apply_geodesic(g, hc.IMAG_AXIS)
        sa, sc = rng.uniform(-4, 4, 2)
        A = hc.apply(g, hc.HPoint(0.0, math.exp(sa)))
        C = hc.apply(g, hc.HPoint(0.0, math.exp(sc)))
        ang = rng.uniform(0.05, math.pi - 0.05)
        rad = math.exp(rng.uniform(-3, 3))
        B = hc.apply(g, hc.HPoint(rad * math.cos(ang), rad * math.sin(ang)))
        worst = min(worst, fewercases_slack(A, C, B, gam))
    return {"passed": bool(worst > 0), "trials": trials, "min_slack": worst}


def battery_quad(rng, trials: int, tol: float = 1e-10) -> dict:
    side_err = 0.0
    for x0, r in zip(rng.uniform(0.01, 0.99, trials), np.exp(rng.uniform(0, 3, trials))):
        cf, mt = quad_sides(x0, r), quad_sides_metric(x0, r)
        side_err = max(side_err, *(abs(cf[s] - mt[s]) for s in cf))
        side_err = max(side_err, abs(quad_defect(x0, r) - quad_defect_metric(x0, r)))
    at_one = max(abs(quad_defect(x0, 1.0)) for x0 in np.linspace(0.05, 0.95, 19))
    grid = [(x0, r) for x0 in np.linspace(0.1, 0.9, 10) for r in np.linspace(1.1, 5.0, 10)]
    min_pos = min(quad_defect(x0, r) for x0, r in grid)
    ok = side_err < tol and at_one < tol and min_pos > 0
    return {"passed": bool(ok), "trials": trials, "max_side_error": side_err,
            "max_defect_at_r1": at_one, "min_defect_on_grid": min_pos}


def battery_kappa(tol: float = 1e-10) -> dict:
    ys = np.linspace(0.0, 20.0, 201)
    rt = max(abs(kappa(kappa_inverse(y)) - y) for y in ys)
    Rs = np.linspace(0.0, 10.0, 101)
    vals = [kappa(R) for R in Rs]
    mono = all(b > a for a, b in zip(vals, vals[1:]))
    return {"passed": bool(rt < tol and mono), "max_roundtrip_error": rt, "increasing": mono}


def run_all(seed: int = 0, trials: int = 10_000, tol: float = 1e-9) -> dict:
    rng = np.random.default_rng(seed)
    out = {
        "triangle": battery_triangle(rng, trials, tol=tol),
        "fewercases": battery_fewercases(rng, trials),
        "quad": battery_quad(rng, min(trials, 1000), tol=min(tol, 1e-10)),
        "kappa": battery_kappa(tol=min(tol, 1e-10)),
    }
    out["passed"] = all(v["passed"] for v in out.values())
    return out
