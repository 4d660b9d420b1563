"""Geodesic rays on the quotient surface: surface distances, Delta profiles, scans.

Surface distances are minima of plane distances over deck transformations.
Two certificates are available:

* the orbit bound: elements outside the ball move p~ by more than the
  certified radius, so ``d(z, g w) >= r_ball - d(p~, z) - d(p~, w)``;
* the tile search: when the group carries an explicit fundamental domain,
  a breadth-first walk over the tiles meeting the current distance ball
  finds the true minimum.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import hyp_core as hc
from ._kernels import min_dist_to_centered, orbit_distances, orbit_min_distance
from .groups import GroupApprox
from .lemmas import kappa_gap
from .quilt import QuiltSpec

CRITICAL_TOL = 1e-4
DELTA_CAP = 5.0
DRIFT_TOL = 1e-5
TILE_CAP = 400_000


class TileSearchError(RuntimeError):
    pass


# ---------------------------------------------------------------- rays


@dataclass(frozen=True)
class RaySpec:
    base: hc.HPoint
    endpoint: float
    label: str = ""

    def __post_init__(self):
        if not hc.is_infinite(self.endpoint) and not math.isfinite(self.endpoint):
            raise ValueError("endpoint must be finite or +inf")

    def _frame(self) -> hc.Isometry:
        # orientation-preserving map sending the endpoint to infinity
        if hc.is_infinite(self.endpoint):
            return hc.Isometry.identity()
        return hc.Isometry(0.0, -1.0, 1.0, -self.endpoint)

    def point(self, t: float) -> hc.HPoint:
        T = self._frame()
        b = hc.apply(T, self.base)
        return hc.apply(hc.invert(T), hc.HPoint(b.x, b.y * math.exp(t)))

    def points(self, times) -> list[hc.HPoint]:
        return [self.point(float(t)) for t in times]


def sigma_ray(s: float) -> RaySpec:
    """Ray from i e^s along psi(e^s), leaving the core orthogonally on the right."""
    return RaySpec(hc.HPoint(0.0, math.exp(s)), math.exp(s), f"sigma({s:.6g})")


def delta_c_rays(c_position: float, a: float) -> tuple[RaySpec, RaySpec]:
    """(short, long) rays from p~ = i e^{a/2} asymptotic to sigma_c.

    The short ray ends at e^{s'} for the lift s' of c nearest a/2 (the
    smaller one on a tie); the long ray uses the lift on the other side.
    """
    p = hc.HPoint(0.0, math.exp(0.5 * a))
    c = c_position % a
    cands = [c - a, c, c + a]
    s_short = min(cands, key=lambda s: (round(abs(s - 0.5 * a), 12), s))
    s_long = s_short + a if s_short <= 0.5 * a else s_short - a
    return (RaySpec(p, math.exp(s_short), f"delta_s({c_position:.6g})"),
            RaySpec(p, math.exp(s_long), f"delta_l({c_position:.6g})"))


def probe_ray(spec: QuiltSpec, group: GroupApprox) -> RaySpec:
    """Ray from p~ to a boundary point of (1, e^a) off C* and off the cusps.

    The target is the center of the first side disc of the first flute, which
    sits between two tangency (parabolic) points. A depth-one flute has no
    discs; then the geometric midpoint of the first interval is used.
    """
    for side in group.domain or []:
        g = side.halfplane.boundary
        if side.label.startswith("Q1.") and isinstance(g, hc.Semicircle):
            x = g.center
            break
    else:
        iv = spec.intervals[0]
        x = math.exp(iv.start + 0.5 * iv.length)
    if x > math.exp(spec.a):
        x /= math.exp(spec.a)
    return RaySpec(spec.p_tilde, x, f"probe({x:.6g})")


# ---------------------------------------------------------------- distances


def _inverse_rows(m: np.ndarray) -> np.ndarray:
    return np.stack([m[:, 3], -m[:, 1], -m[:, 2], m[:, 0]], axis=1)


def _act(m: np.ndarray, x: float, y: float):
    z = complex(x, y)
    w = (m[:, 0] * z + m[:, 1]) / (m[:, 2] * z + m[:, 3])
    return w.real, w.imag


def _halfplane_lower_bound(sides, x, y) -> np.ndarray:
    """max over sides of the distance from (x, y) to the side's half-plane."""
    lb = np.zeros_like(x)
    for s in sides:
        g, sgn = s.halfplane.boundary, s.halfplane.side
        if isinstance(g, hc.Vertical):
            off = sgn * (x - g.foot)
            d = np.arcsinh(np.abs(x - g.foot) / y)
        else:
            q = (x - g.center) ** 2 + y * y
            off = sgn * (np.sqrt(q) - g.radius)
            d = np.arcsinh(np.abs(q - g.radius ** 2) / (2.0 * g.radius * y))
        lb = np.maximum(lb, np.where(off >= 0, 0.0, d))
    return lb


class OrbitPointSet:
    """Set of orbit points g(p) with tolerant membership.

    Long products drift (det ~ 1 - 1e-8 after a few dozen factors), so two
    words for the same element can land a little apart. Points are bucketed
    by (log y, x / y_cell) and compared by hyperbolic distance against the
    neighbouring buckets. Distinct orbit points are far apart compared with
    ``tol``.
    """

    def __init__(self, tol: float = 1e-4, cell: float = 0.05):
        self.tol = tol
        self.cell = cell
        self._cells: dict = {}

    def _key(self, x, y):
        ky = math.floor(math.log(y) / self.cell)
        yc = math.exp(ky * self.cell)
        return ky, math.floor(x / (yc * self.cell))

    def add(self, x: float, y: float) -> bool:
        """Insert (x, y); return False when an equal point is already present."""
        ky, kx = self._key(x, y)
        for dy in (-1, 0, 1):
            yc = math.exp((ky + dy) * self.cell)
            kx2 = math.floor(x / (yc * self.cell))
            for dx in (-1, 0, 1):
                for (px, py) in self._cells.get((ky + dy, kx2 + dx), ()):
                    s = math.hypot(x - px, y - py) / (2.0 * math.sqrt(y * py))
                    if 2.0 * math.asinh(s) < self.tol:
                        return False
        self._cells.setdefault((ky, kx), []).append((x, y))
        return True


def reduce_to_domain(z: hc.HPoint, group: GroupApprox, max_steps: int = 100_000):
    """Return (h, z0) with z = h z0 and z0 in the fundamental domain."""
    if group.domain is None:
        raise TileSearchError("group has no explicit fundamental domain")
    h = hc.Isometry.identity()
    q = z
    for _ in range(max_steps):
        # points within 1e-12 of a side count as inside; avoids ping-pong on the boundary
        worst, arg = 1e-12, None
        for s in group.domain:
            if not s.halfplane.contains(q):
                d = hc.distance_to_geodesic(q, s.halfplane.boundary)
                if d > worst:
                    worst, arg = d, s
        if arg is None:
            return h, q
        q = hc.apply(hc.invert(arg.neighbor), q)
        h = hc.compose(h, arg.neighbor)
    raise TileSearchError("domain reduction did not terminate")


def tile_search_distance(z: hc.HPoint, w: hc.HPoint, group: GroupApprox,
                         upper: float | None = None, cap: int = TILE_CAP):
    """Exact min_g d(z, g w) by walking tiles that meet the current ball around z.

    Returns (value, tiles_visited).
    """
    sides = group.domain
    hz, _ = reduce_to_domain(z, group)
    hw, w0 = reduce_to_domain(w, group)
    best = hc.distance(z, w) if upper is None else min(upper, hc.distance(z, w))
    nb = np.array([[s.neighbor.m11, s.neighbor.m12, s.neighbor.m21, s.neighbor.m22]
                   for s in sides]).reshape(-1, 2, 2)
    front = np.array([[hz.m11, hz.m12, hz.m21, hz.m22]])
    p = group.basepoint
    seen = OrbitPointSet()
    seen.add(*(float(v[0]) for v in _act(front, p.x, p.y)))
    visited = 0
    while len(front):
        visited += len(front)
        if visited > cap:
            raise TileSearchError(f"tile search exceeded {cap} tiles")
        inv = _inverse_rows(front)
        x, y = _act(inv, z.x, z.y)
        lb = _halfplane_lower_bound(sides, x, y)
        keep = lb <= best + 1e-12
        front = front[keep]
        if not len(front):
            break
        d = orbit_distances(np.ascontiguousarray(_inverse_rows(front)), w0.x, w0.y, z.x, z.y)
        best = min(best, float(d.min()))
        kids = np.matmul(front.reshape(-1, 1, 2, 2), nb[None]).reshape(-1, 4)
        kx, ky = _act(kids, p.x, p.y)
        fresh = [i for i, (x, y) in enumerate(zip(kx.tolist(), ky.tolist())) if seen.add(x, y)]
        front = kids[fresh] if fresh else np.zeros((0, 4))
    return best, visited


@dataclass
class SurfaceDistance:
    value: float
    certified: bool
    method: str
    element: int = -1


def surface_distance(z: hc.HPoint, w: hc.HPoint, group: GroupApprox,
                     exact: bool = True) -> SurfaceDistance:
    """min over the ball of d(z, g w), certified by the orbit bound or by tiles."""
    ball = group.ball
    val, idx = orbit_min_distance(ball.mats, z.x, z.y, w.x, w.y)
    p = group.basepoint
    bound = ball.certified_radius - hc.distance(p, z) - hc.distance(p, w)
    if val < bound:
        return SurfaceDistance(val, True, "orbit-bound", idx)
    if exact and group.domain is not None:
        v, _ = tile_search_distance(z, w, group, upper=val)
        return SurfaceDistance(min(v, val), True, "tiles", idx if val <= v else -1)
    return SurfaceDistance(val, False, "ball", idx)


# ---------------------------------------------------------------- profiles


@dataclass
class DeltaProfile:
    times: list
    delta_values: list
    certified_flags: list
    methods: list
    verdict: str
    label: str = ""

    def to_json(self):
        return {"label": self.label, "times": self.times, "deltas": self.delta_values,
                "certified": self.certified_flags, "methods": self.methods,
                "verdict": self.verdict}


def classify_profile(times, deltas, certified) -> str:
    cd = [d for d, c in zip(deltas, certified) if c]
    if not cd:
        return "inconclusive"
    if all(d < CRITICAL_TOL for d in cd):
        return "critical-consistent"
    if cd[-1] > DELTA_CAP and (len(cd) < 2 or cd[-1] > cd[-2]):
        return "horocyclic-consistent"
    q = cd[-max(2, len(cd) // 4):]
    if CRITICAL_TOL <= q[-1] <= DELTA_CAP and (max(q) - min(q)) < DRIFT_TOL:
        return "subcritical-consistent"
    return "inconclusive"


def sample_times(t_max: float = 8.0, step: float = 0.5) -> list[float]:
    n = int(round(t_max / step))
    return [round(step * (i + 1), 12) for i in range(n)]


def delta_profile(ray: RaySpec, times, group: GroupApprox, exact: bool = True,
                  workers: int = 1) -> DeltaProfile:
    def one(t):
        return surface_distance(ray.base, ray.point(t), group, exact=exact)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, times))
    else:
        results = [one(t) for t in times]
    deltas, cert, meth = [], [], []
    for t, sd in zip(times, results):
        deltas.append(max(0.0, float(t) - sd.value))
        cert.append(bool(sd.certified))
        meth.append(sd.method)
    return DeltaProfile([float(t) for t in times], deltas, cert, meth,
                        classify_profile(times, deltas, cert), ray.label)


# ---------------------------------------------------------------- scaffolding


def _sector_distance(x, y, lo, hi):
    """Distance to the set of sigma rays over the arc [e^lo, e^hi] (right half, |z| in range)."""
    r = np.hypot(x, y)
    inside = (x >= 0) & (r >= math.exp(lo)) & (r <= math.exp(hi))
    # distance to the core segment between heights e^lo and e^hi
    h = np.clip(r, math.exp(lo), math.exp(hi))
    seg = 2.0 * np.log((np.hypot(x, y + h) + np.hypot(x, y - h)) / (2.0 * np.sqrt(y * h)))
    return np.where(inside, 0.0, seg)


def scaffold_distance(z: hc.HPoint, spec: QuiltSpec, group: GroupApprox) -> float:
    """Distance from z to the orbit of the scaffolding lifts."""
    ball = group.ball
    radii = np.array([math.exp(s) for s in spec.c_positions], dtype=float)
    best, _, _ = min_dist_to_centered(ball.mats, z.x, z.y, radii)
    arcs = [arc for arc in spec.circle_set.arcs if spec.circle_set.arc_length(arc) > 0]
    if arcs:
        x, y = _act(_inverse_rows(ball.mats), z.x, z.y)
        for lo, hi in arcs:
            if hi < lo:
                hi = hi + spec.a
            for shift in (0.0, -spec.a):
                best = min(best, float(_sector_distance(x, y, lo + shift, hi + shift).min()))
    return float(best)


@dataclass
class SigmaScan:
    epsilon: float
    t_epsilon: float | None
    times: list
    trace: list

    def to_json(self):
        return {"epsilon": self.epsilon, "t_epsilon": self.t_epsilon,
                "times": self.times, "trace": self.trace}


def theorem_sigma_scan(ray: RaySpec, epsilon: float, t_max: float, spec: QuiltSpec,
                       group: GroupApprox, step: float = 0.25) -> SigmaScan:
    times = sample_times(t_max, step)
    trace = [scaffold_distance(ray.point(t), spec, group) for t in times]
    t_eps = None
    for i in range(len(times) - 1, -1, -1):
        if trace[i] < epsilon:
            t_eps = times[i]
        else:
            break
    return SigmaScan(epsilon, t_eps, times, trace)


# ---------------------------------------------------------------- lemma battery


def _flute_cover(chain, depth_words: int = 3):
    """Small word ball of the cut-open flute group and its boundary lifts."""
    from .groups import Generator, enumerate_ball, flute_side_pairings
    pair = flute_side_pairings(chain)
    gens = [Generator(f"Q{j}", q) for j, (q, _, _) in enumerate(pair, start=1)]
    ball = enumerate_ball(gens, depth_words, hc.HPoint(0.0, 1.0)) if gens else None
    return gens, ball


def _crosses(seg_a: hc.HPoint, seg_b: hc.HPoint, geo: hc.Geodesic) -> bool:
    sa, sb = hc.signed_side(geo, seg_a), hc.signed_side(geo, seg_b)
    tol = 1e-12 * max(1.0, abs(seg_a.x), abs(seg_b.x), seg_a.y, seg_b.y)
    return (sa > tol and sb < -tol) or (sa < -tol and sb > tol)


def _segment_points(A: hc.HPoint, B: hc.HPoint, n: int):
    ray = RaySpec(A, _far_endpoint(A, B))
    L = hc.distance(A, B)
    return [ray.point(L * i / (n - 1)) for i in range(n)], L


def _far_endpoint(A: hc.HPoint, B: hc.HPoint) -> float:
    g = hc.geodesic_between(A, B)
    if isinstance(g, hc.Vertical):
        return hc.INF if B.y > A.y else g.foot
    u, v = g.endpoints()
    # the endpoint reached by moving from A through B
    return v if B.x > A.x else u


def verify_distance_lemmas(spec: QuiltSpec, group: GroupApprox, trials: int = 1000,
                           rng=None, t_range=(0.05, 4.0)) -> dict:
    """Randomized checks of the three distance statements used for scaffolding.

    (a) sigma_c(t) is at surface distance t from the core;
    (b) arcs between two sigma rays are longer than the height difference;
    (c) arcs crossing a flute pay the extra 2 log((k^2+1)/2k).
    """
    from .groups import reflection_chain
    rng = np.random.default_rng(0) if rng is None else rng
    ball = group.ball
    inv = _inverse_rows(ball.mats)
    cpos = list(spec.c_positions) or [0.0]
    worst = {"a": 0.0, "b": math.inf, "c": math.inf}
    fails = []

    def dist_to_core(z):
        x, y = _act(inv, z.x, z.y)
        return float(np.arcsinh(np.abs(x) / y).min())

    n_a = n_b = n_c = 0
    per = max(1, trials)
    for _ in range(per):
        c = cpos[rng.integers(len(cpos))]
        t = rng.uniform(*t_range)
        z = sigma_ray(c).point(t)
        err = abs(dist_to_core(z) - t)
        worst["a"] = max(worst["a"], err)
        n_a += 1
        if err > 1e-6:
            fails.append({"check": "a", "c": c, "t": t, "error": err})
    for _ in range(per):
        c, c2 = (cpos[i] for i in rng.integers(len(cpos), size=2))
        t, t2 = rng.uniform(*t_range, size=2)
        gi = int(rng.integers(len(ball)))
        X = sigma_ray(c).point(t)
        Y = hc.apply(group.isometry(gi), sigma_ray(c2).point(t2))
        slack = hc.distance(X, Y) - abs(t2 - t)
        if gi == 0 and c == c2:
            # same ray: the arc is a subarc, equality is allowed
            ok = slack >= -1e-9
        else:
            ok = slack > -1e-9
        worst["b"] = min(worst["b"], float(slack))
        n_b += 1
        if not ok:
            fails.append({"check": "b", "c": c, "c2": c2, "t": t, "t2": t2,
                          "word": group.word_string(ball.words[gi]), "slack": slack})
    flutes = [reflection_chain(f) for f in spec.flutes]
    covers = [_flute_cover(ch) for ch in flutes]
    attempts = 0
    while n_c < per and flutes and attempts < 50 * per:
        attempts += 1
        fi = int(rng.integers(len(flutes)))
        ch = flutes[fi]
        gens, fball = covers[fi]
        r0 = hc.reflect_in(ch.gammas[0])
        beta1 = hc.IMAG_AXIS
        beta2 = hc.apply_geodesic(r0, beta1)
        lifts = [beta1, beta2]
        elems = [hc.Isometry.identity()]
        if fball is not None:
            elems = [hc.Isometry.from_matrix(*m) for m in fball.mats]
            lifts = [hc.apply_geodesic(g, b) for g in elems for b in (beta1, beta2)]
        t1, t2 = rng.uniform(*t_range, size=2)
        X = hc.HPoint(0.0, math.exp(t1))
        g = elems[int(rng.integers(len(elems)))]
        Y = hc.apply(g, hc.apply(r0, hc.HPoint(0.0, math.exp(t2))))
        # the arc must stay inside the cut-open flute: no boundary lift separates X and Y
        if any(_crosses(X, Y, L) for L in lifts):
            continue
        pts, length = _segment_points(X, Y, 65)
        depth = max(min(hc.distance_to_geodesic(p, L) for L in lifts) for p in pts)
        if depth <= 1e-9:
            continue
        k = math.exp(depth)
        slack = length - abs(t2 - t1) - kappa_gap(k)
        worst["c"] = min(worst["c"], slack)
        n_c += 1
        if slack <= -1e-6:
            fails.append({"check": "c", "flute": fi + 1, "t1": t1, "t2": t2,
                          "k": k, "slack": slack})
    return {"passed": not fails, "trials": {"a": n_a, "b": n_b, "c": n_c},
            "worst": {k: float(v) for k, v in worst.items()}, "failures": fails[:20]}
