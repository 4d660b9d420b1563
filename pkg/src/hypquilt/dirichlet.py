"""Truncated Dirichlet polygons and their trace on the extended real line.

Each ball element g contributes the half-plane of points closer to p than to
g(p). Its excluded side meets the boundary in an open arc (the shadow).
What is left after removing every shadow is the boundary-at-infinity
approximation, a closed set that can only shrink as the ball grows.

Ideal points are floats with ``math.inf`` for the point at infinity. An
``IdealInterval(lo, hi)`` runs from lo to hi in increasing order and wraps
through infinity when ``lo > hi``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import hyp_core as hc
from ._kernels import bisectors

INF = math.inf
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class IdealInterval:
    lo: float
    hi: float

    @property
    def wraps(self) -> bool:
        return self.lo > self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float, tol: float = 1e-10) -> bool:
        if hc.is_infinite(x):
            return self.wraps or hc.is_infinite(self.hi) or hc.is_infinite(self.lo)
        t = tol * max(1.0, abs(x))
        if self.wraps:
            return x >= self.lo - t or x <= self.hi + t
        return self.lo - t <= x <= self.hi + t

    def measure_in(self, a: float, b: float) -> float:
        """Lebesgue measure of the intersection with the finite window [a, b]."""
        if self.wraps:
            return (IdealInterval(self.lo, INF).measure_in(a, b)
                    + IdealInterval(-INF, self.hi).measure_in(a, b))
        return max(0.0, min(b, self.hi) - max(a, self.lo))

    def to_json(self):
        f = lambda v: "inf" if hc.is_infinite(v) else v
        return [f(self.lo), f(self.hi)]


# ---------------------------------------------------------------- half-planes


def bisector_halfplane(center: hc.HPoint, g: hc.Isometry) -> hc.HalfPlane:
    gc = hc.apply(g, center)
    if hc.distance(center, gc) < 1e-12:
        raise hc.DegenerateInputError("element fixes the center")
    return hc.HalfPlane.containing(hc.perpendicular_bisector(center, gc), center)


def shadow(hp: hc.HalfPlane) -> IdealInterval:
    """Open arc of the boundary lying on the excluded side of ``hp``."""
    g = hp.boundary
    if isinstance(g, hc.Vertical):
        # side +1 keeps the right: the shadow runs from infinity up to the foot
        return IdealInterval(INF, g.foot) if hp.side == 1 else IdealInterval(g.foot, INF)
    u, v = g.endpoints()
    return IdealInterval(u, v) if hp.side == 1 else IdealInterval(v, u)


def _shadow_arrays(center: hc.HPoint, mats: np.ndarray):
    """Vectorised shadows: arrays (lo, hi) with wrapping arcs where lo > hi."""
    vert, c, r = bisectors(np.ascontiguousarray(mats, dtype=float), center.x, center.y)
    vert = np.asarray(vert, dtype=bool)
    inside = np.hypot(center.x - c, center.y) < r
    lo = np.where(inside, c + r, c - r)
    hi = np.where(inside, c - r, c + r)
    # vertical bisectors: center right of the foot -> shadow (inf, foot)
    right = center.x > c
    lo = np.where(vert, np.where(right, INF, c), lo)
    hi = np.where(vert, np.where(right, c, INF), hi)
    return lo, hi


# ---------------------------------------------------------------- sweep


def complement_of_arcs(lo: np.ndarray, hi: np.ndarray, tol: float = MERGE_TOL):
    """Closed complement of a union of open arcs.

    Returns (intervals, touch_points): maximal IdealIntervals, with isolated
    points as degenerate intervals, and the list of those isolated points.
    Arcs that overlap by less than ``tol`` (relative) count as touching.
    """
    segs = []
    inf_covered = False
    for a, b in zip(np.asarray(lo).tolist(), np.asarray(hi).tolist()):
        if a == INF:
            segs.append((-INF, b))
        elif a > b:
            segs += [(a, INF), (-INF, b)]
            inf_covered = True
        else:
            segs.append((a, b))
    segs.sort()
    gaps = []
    reach = -INF
    for a, b in segs:
        if a == -INF:
            pass
        elif a >= reach:
            gaps.append((reach, a))
        elif reach - a <= tol * max(1.0, abs(a)):
            m = 0.5 * (a + reach)
            if not gaps or gaps[-1] != (m, m):
                gaps.append((m, m))
        reach = max(reach, b)
    if reach < INF:
        gaps.append((reach, INF))

    res = [IdealInterval(a, b) for a, b in gaps if a > -INF and b < INF]
    if not inf_covered:
        head = [g for g in gaps if g[0] == -INF]
        tail = [g for g in gaps if g[1] == INF and g[0] > -INF]
        if head and head[0][1] == INF:
            res.append(IdealInterval(-INF, INF))          # nothing removed at all
        elif head and tail:
            res.append(IdealInterval(tail[0][0], head[0][1]))
        elif head:
            res.append(IdealInterval(INF, head[0][1]))
        elif tail:
            res.append(IdealInterval(tail[0][0], INF))
        else:
            res.append(IdealInterval(INF, INF))           # arcs touch at infinity
    res.sort(key=lambda iv: (iv.wraps, iv.lo, iv.hi))
    touch = [iv.lo for iv in res if iv.is_point]
    return res, touch


# ---------------------------------------------------------------- approximation


@dataclass
class DirichletApprox:
    center: hc.HPoint
    n_elements: int
    shadows_lo: np.ndarray
    shadows_hi: np.ndarray
    boundary_at_infinity: list
    touch_points: list
    parabolics: list = field(default_factory=list)
    ball_param: int = 0

    def contains(self, x: float, tol: float = 1e-10) -> bool:
        return any(iv.contains(x, tol) for iv in self.boundary_at_infinity)

    def measure_in(self, a: float, b: float) -> float:
        return sum(iv.measure_in(a, b) for iv in self.boundary_at_infinity)

    def intervals_in(self, a: float, b: float) -> list:
        out = []
        for iv in self.boundary_at_infinity:
            if iv.wraps:
                continue
            lo, hi = max(a, iv.lo), min(b, iv.hi)
            if lo <= hi:
                out.append(IdealInterval(lo, hi))
        return out

    def to_json(self):
        return {"ball_param": self.ball_param, "elements": self.n_elements,
                "boundary_at_infinity": [iv.to_json() for iv in self.boundary_at_infinity],
                "parabolics": [{"point": p, "gap": g} for p, g in self.parabolics]}


def boundary_at_infinity(center: hc.HPoint, mats: np.ndarray, ball_param: int = 0,
                         tol: float = MERGE_TOL) -> DirichletApprox:
    """Boundary approximation from every non-identity row of ``mats``."""
    mats = np.asarray(mats, dtype=float).reshape(-1, 4)
    keep = ~np.all(np.abs(mats - np.array([1.0, 0.0, 0.0, 1.0])) < 1e-12, axis=1)
    mats = mats[keep]
    if len(mats) == 0:
        warnings.warn("no nontrivial elements: boundary is the whole circle")
        return DirichletApprox(center, 0, np.zeros(0), np.zeros(0),
                               [IdealInterval(-INF, INF)], [], [], ball_param)
    lo, hi = _shadow_arrays(center, mats)
    ivs, touch = complement_of_arcs(lo, hi, tol)
    return DirichletApprox(center, len(mats), lo, hi, ivs, touch, [], ball_param)


def _segments(iv: IdealInterval):
    """Pieces of an ideal interval on the line [-inf, inf]."""
    if iv.lo == INF:
        return [(-INF, iv.hi)]
    if iv.wraps:
        return [(iv.lo, INF), (-INF, iv.hi)]
    return [(iv.lo, iv.hi)]


def is_contained(inner: DirichletApprox, outer: DirichletApprox, tol: float = 1e-12) -> bool:
    """Every interval of ``inner`` lies inside one interval of ``outer``."""
    osegs = [s for iv in outer.boundary_at_infinity for s in _segments(iv)]
    for iv in inner.boundary_at_infinity:
        for lo, hi in _segments(iv):
            if not any(lo >= olo - tol * max(1.0, abs(lo)) if math.isfinite(lo) else lo == olo
                       for olo, ohi in osegs
                       if (hi <= ohi + tol * max(1.0, abs(hi)) if math.isfinite(hi) else hi == ohi)):
                return False
    return True


# ---------------------------------------------------------------- parabolics


def parabolic_points(mats: np.ndarray, band: float = hc.PARABOLIC_BAND) -> list[float]:
    mats = np.asarray(mats, dtype=float).reshape(-1, 4)
    tr = np.abs(mats[:, 0] + mats[:, 3])
    ident = np.all(np.abs(mats - np.array([1.0, 0.0, 0.0, 1.0])) < 1e-10, axis=1)
    sel = (np.abs(tr - 2.0) <= band) & ~ident
    pts = []
    for a, b, c, d in mats[sel]:
        pts.append(INF if abs(c) <= 1e-13 else (a - d) / (2.0 * c))
    return sorted(set(round(p, 12) if math.isfinite(p) else p for p in pts))


def detect_parabolic_boundary(mats: np.ndarray, window: IdealInterval,
                              approx: DirichletApprox, tol: float = 1e-9) -> list:
    """Parabolic fixed points in ``window`` that survive in ``approx``.

    Each comes with its gap: distance to the nearest other boundary material,
    or 0 if the point still sits inside a nondegenerate interval.
    """
    out = []
    finite = [iv for iv in approx.boundary_at_infinity if not iv.wraps]
    for x in parabolic_points(mats):
        if not math.isfinite(x) or not window.contains(x, 0.0):
            continue
        host = [iv for iv in approx.boundary_at_infinity if iv.contains(x, tol)]
        if not host:
            continue
        if any(not iv.is_point for iv in host):
            out.append((x, 0.0))
            continue
        others = [iv for iv in finite if not iv.contains(x, tol)]
        gap = min((min(abs(x - iv.lo), abs(x - iv.hi)) for iv in others), default=INF)
        out.append((x, gap))
    return out


# ---------------------------------------------------------------- predictions


def compare_to_prediction(approx: DirichletApprox, spec, parabolic_tol: float = 1e-9) -> dict:
    """Containment of C*, excess over C* in [1, e^a] and presence of [-e^a, -1]."""
    a = spec.a
    ea = math.exp(a)
    cstar = spec.c_star
    c_arcs = []
    if spec.K is not None:
        A, B = spec.phi
        c_arcs = [(A * lo + B, A * hi + B) for lo, hi in spec.K.components]
    contained = [bool(approx.contains(x, 1e-10)) for x in cstar]
    pieces = approx.intervals_in(1.0, ea)
    # excess: boundary in [1, e^a] outside the arcs of C*
    excess = 0.0
    haus = 0.0
    for iv in pieces:
        if iv.is_point:
            continue
        m = iv.hi - iv.lo
        for lo, hi in c_arcs:
            m -= max(0.0, min(hi, iv.hi) - max(lo, iv.lo))
        excess += max(0.0, m)
        for x in (iv.lo, iv.hi, 0.5 * (iv.lo + iv.hi)):
            haus = max(haus, _dist_to_arcs(x, c_arcs) if c_arcs else 0.0)
    left = approx.measure_in(-ea, -1.0)
    full_left = any(iv.contains(-ea, 1e-12) and iv.contains(-1.0, 1e-12)
                    and (iv.wraps or iv.lo <= -ea + 1e-12) and (iv.wraps or iv.hi >= -1.0 - 1e-12)
                    for iv in approx.boundary_at_infinity)
    return {
        "ball_param": approx.ball_param,
        "c_star": cstar,
        "c_star_contained": contained,
        "all_c_star_contained": all(contained),
        "excess_measure": excess,
        "hausdorff_excess": haus,
        "left_interval_measure": left,
        "left_interval_full": bool(full_left),
        "left_interval_present": bool(left > 0.05),
    }


def _dist_to_arcs(x, arcs):
    return min(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)) for lo, hi in arcs)


def convergence_report(center: hc.HPoint, balls, spec) -> dict:
    """Reports across nested balls plus the monotonicity trace."""
    approxes = [boundary_at_infinity(center, b.mats, b.max_len) for b in balls]
    reps = [compare_to_prediction(ap, spec) for ap in approxes]
    mono = [is_contained(approxes[i + 1], approxes[i]) for i in range(len(approxes) - 1)]
    ex = [r["excess_measure"] for r in reps]
    return {
        "reports": reps,
        "nested": mono,
        "monotone": all(mono),
        "excess_nonincreasing": all(b <= a + 1e-12 for a, b in zip(ex, ex[1:])),
        "approxes": approxes,
    }
