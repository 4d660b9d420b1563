"""Quilt recipe: the compact set K, its image C on the core geodesic, and flute data.

Positions on the core geodesic are log-heights: position ``s`` is the point
``i*e^s`` of the imaginary axis, so the circle of circumference ``a`` is the
quotient of the axis by ``z -> e^a z``. The basepoint ``p`` lifts to
``i*e^(a/2)`` and therefore sits at position ``a/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import hyp_core as hc
from .lemmas import collar_halfwidth, kappa_inverse

POS_TOL = 1e-12


class QuiltConfigError(ValueError):
    """A recipe violates one of its invariants; the message names the clause."""


# ---------------------------------------------------------------- compact sets


@dataclass(frozen=True)
class CompactSetSpec:
    """Finite union of closed intervals ``(lo, hi)``; points have lo == hi."""

    components: tuple[tuple[float, float], ...]

    def __post_init__(self):
        comps = self.components
        if not comps:
            raise QuiltConfigError("K: empty set")
        for lo, hi in comps:
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise QuiltConfigError(f"K: bad component ({lo}, {hi})")
        for (_, h0), (l1, _) in zip(comps, comps[1:]):
            if not l1 > h0:
                raise QuiltConfigError("K: components must be sorted and pairwise disjoint")

    @classmethod
    def parse(cls, items) -> "CompactSetSpec":
        """Accept a list whose entries are numbers or [lo, hi] pairs."""
        comps = []
        for it in items:
            if isinstance(it, (int, float)):
                comps.append((float(it), float(it)))
            elif isinstance(it, (list, tuple)) and len(it) == 2:
                comps.append((float(it[0]), float(it[1])))
            else:
                raise QuiltConfigError(f"K: cannot parse component {it!r}")
        return cls(tuple(sorted(comps)))

    @property
    def lo(self) -> float:
        return self.components[0][0]

    @property
    def hi(self) -> float:
        return self.components[-1][1]

    def is_interval(self) -> bool:
        return len(self.components) == 1 and self.lo < self.hi

    def contains(self, x: float, tol: float = 1e-10) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.components)

    def points(self) -> list[float]:
        """Component endpoints (each point once)."""
        out = []
        for lo, hi in self.components:
            out.append(lo)
            if hi > lo:
                out.append(hi)
        return out

    def to_json(self):
        return [c[0] if c[0] == c[1] else [c[0], c[1]] for c in self.components]


def cantor_stage(n: int, lo: float = 0.0, hi: float = 1.0) -> CompactSetSpec:
    """Middle-thirds Cantor construction after ``n`` steps: 2^n intervals."""
    if n < 0:
        raise QuiltConfigError("cantor stage must be >= 0")
    comps = [(lo, hi)]
    for _ in range(n):
        nxt = []
        for a, b in comps:
            w = (b - a) / 3.0
            nxt += [(a, a + w), (b - w, b)]
        comps = nxt
    return CompactSetSpec(tuple(comps))


def normalize_compact_set(K: CompactSetSpec, a: float):
    """Affine map phi(z) = A z + B with phi(min K) = 1 and phi(max K) = e^a."""
    if not a > 0:
        raise QuiltConfigError("a must be positive")
    if not K.hi > K.lo:
        raise hc.DegenerateInputError("K needs at least two points")
    A = (math.exp(a) - 1.0) / (K.hi - K.lo)
    B = 1.0 - A * K.lo
    img = [[A * lo + B, A * hi + B] for lo, hi in K.components]
    img[0][0], img[-1][1] = 1.0, math.exp(a)
    # pin the extremes exactly; point components stay points
    for (lo, hi), c in zip(K.components, img):
        if lo == hi:
            c[0] = c[1] = c[0] if c is img[0] else c[1]
    img = [tuple(c) for c in img]
    return A, B, CompactSetSpec(tuple(img))


def lambda_map(c_star: float, a: float) -> float:
    if not (1.0 - 1e-12 <= c_star <= math.exp(a) * (1 + 1e-12)):
        raise QuiltConfigError(f"lambda_map: {c_star} outside [1, e^a]")
    return math.log(c_star)


def lambda_inverse(s: float) -> float:
    return math.exp(s)


# ---------------------------------------------------------------- circle sets


@dataclass(frozen=True)
class IntervalRec:
    index: int
    start: float
    end: float
    length: float


@dataclass(frozen=True)
class CircleSet:
    """Closed arcs on a circle of circumference ``a``.

    An arc ``(lo, hi)`` with ``hi < lo`` wraps through position 0.
    """

    circumference: float
    arcs: tuple[tuple[float, float], ...]
    basepoint: float = 0.0

    def __post_init__(self):
        a = self.circumference
        if not a > 0:
            raise QuiltConfigError("circle circumference must be positive")
        for lo, hi in self.arcs:
            if not (0 <= lo < a + POS_TOL and 0 <= hi < a + POS_TOL):
                raise QuiltConfigError(f"arc ({lo}, {hi}) outside [0, a)")

    def arc_length(self, arc) -> float:
        lo, hi = arc
        return (hi - lo) % self.circumference if hi != lo else 0.0

    def point_positions(self) -> list[float]:
        pts = set()
        for lo, hi in self.arcs:
            pts.add(lo)
            pts.add(hi)
        return sorted(pts)


def complement_intervals(cs: CircleSet) -> list[IntervalRec]:
    """Components of the complement, longest first.

    Equal lengths are ordered by the oriented distance from the basepoint to
    the start of the interval.
    """
    a = cs.circumference
    arcs = sorted(cs.arcs, key=lambda ab: ab[0])
    if not arcs:
        raise QuiltConfigError("circle set is empty")
    raw = []
    for i, (lo, hi) in enumerate(arcs):
        nlo = arcs[(i + 1) % len(arcs)][0]
        gap = (nlo - hi) % a
        if len(arcs) == 1:
            gap = (lo - hi) % a
        if gap > POS_TOL:
            raw.append((hi, (hi + gap) % a, gap))
    if len(raw) < 2:
        raise QuiltConfigError(f"complement has {len(raw)} component(s); at least 2 are required")

    def key(r):
        return (-round(r[2], 12), round((r[0] - cs.basepoint) % a, 12))

    raw.sort(key=key)
    return [IntervalRec(i + 1, s, e, L) for i, (s, e, L) in enumerate(raw)]


def scaffolding_lift(s: float) -> hc.Semicircle:
    """Lift of the geodesic orthogonal to the core at position s."""
    return hc.Semicircle(0.0, math.exp(s))


def scaffolding_lifts(intervals: Sequence[IntervalRec]) -> list[hc.Semicircle]:
    pos = sorted({iv.start for iv in intervals} | {iv.end for iv in intervals})
    return [scaffolding_lift(s) for s in pos]


# ---------------------------------------------------------------- recipe


@dataclass(frozen=True)
class FluteSpec:
    first_length: float
    tail_length: float
    depth: int

    def __post_init__(self):
        if not self.first_length > 0 or not self.tail_length > 0:
            raise QuiltConfigError("flute lengths must be positive")
        if self.depth < 1:
            raise QuiltConfigError("flute depth must be >= 1")

    def lengths(self) -> list[float]:
        return [self.first_length] + [self.tail_length] * (self.depth - 1)


@dataclass(frozen=True)
class QuiltSpec:
    a: float
    basepoint: float
    circle_set: CircleSet
    intervals: tuple[IntervalRec, ...]
    flutes: tuple[FluteSpec, ...]
    word_ball: int
    theoremC: bool = False
    K: CompactSetSpec | None = None
    phi: tuple[float, float] = (1.0, 0.0)
    c_positions: tuple[float, ...] = field(default=())

    @property
    def p_tilde(self) -> hc.HPoint:
        return hc.HPoint(0.0, math.exp(self.basepoint))

    @property
    def c_star(self) -> list[float]:
        """Normalized images of K's boundary points in [1, e^a]."""
        if self.K is None:
            return []
        A, B = self.phi
        return [A * x + B for x in self.K.points()]

    def reproject(self) -> list[float]:
        """Map the circle positions of C back to K through exp and phi^-1."""
        A, B = self.phi
        return [(math.exp(s) - B) / A for s in self.c_positions]


def annulus_spec(a: float, word_ball: int = 4) -> QuiltSpec:
    """The bare annulus: no flutes, group generated by z -> e^a z."""
    cs = CircleSet(a, (), basepoint=a / 2)
    return QuiltSpec(a, a / 2, cs, (), (), word_ball)


def check_theoremC(a: float):
    if not 0 < a < 1:
        raise QuiltConfigError(f"theoremC needs 0 < a < 1, got a={a}")
    w = collar_halfwidth(a)
    if not w > a:
        raise QuiltConfigError(f"theoremC needs collar_halfwidth(a) > a, got {w:.6f} <= {a}")


def build_quilt_spec(K: CompactSetSpec, a: float, depth=3, word_ball: int = 10,
                     theoremC: bool = False) -> QuiltSpec:
    """Validated recipe for K. ``depth`` is an int or one int per flute."""
    if not 0 < a <= 1:
        raise QuiltConfigError(f"need 0 < a <= 1, got a={a}")
    if theoremC:
        check_theoremC(a)
    if K.is_interval():
        raise QuiltConfigError("K must not be a single interval")
    if word_ball < 0:
        raise QuiltConfigError("word_ball must be >= 0")
    A, B, img = normalize_compact_set(K, a)
    # positions of K's components; max K lands on a and is identified with 0
    arcs = []
    for lo, hi in img.components:
        s_lo, s_hi = lambda_map(lo, a), lambda_map(hi, a)
        arcs.append([s_lo % a if s_lo < a - POS_TOL else 0.0,
                     s_hi % a if s_hi < a - POS_TOL else 0.0])
    first, last = arcs[0], arcs[-1]
    if len(arcs) > 1:
        # merge the last arc into the first through the identified point
        arcs[0] = [last[0], first[1]]
        arcs.pop()
    cs = CircleSet(a, tuple((float(x), float(y)) for x, y in arcs), basepoint=a / 2)
    intervals = complement_intervals(cs)
    depths = [depth] * len(intervals) if isinstance(depth, int) else list(depth)
    if len(depths) != len(intervals):
        raise QuiltConfigError(f"got {len(depths)} depths for {len(intervals)} flutes")
    R = kappa_inverse(a + 1.0)
    flutes = tuple(FluteSpec(iv.length, R, int(d)) for iv, d in zip(intervals, depths))
    cpos = sorted({lambda_map(x, a) for x in img.points()})
    return QuiltSpec(a, a / 2, cs, tuple(intervals), flutes, word_ball, theoremC, K, (A, B),
                     tuple(cpos))


def spec_to_json(spec: QuiltSpec) -> dict:
    return {
        "a": spec.a,
        "basepoint": spec.basepoint,
        "K": spec.K.to_json() if spec.K is not None else None,
        "phi": list(spec.phi),
        "c_positions": list(spec.c_positions),
        "c_star": spec.c_star,
        "arcs": [list(x) for x in spec.circle_set.arcs],
        "intervals": [{"index": iv.index, "start": iv.start, "end": iv.end, "length": iv.length}
                      for iv in spec.intervals],
        "flutes": [{"first_length": f.first_length, "tail_length": f.tail_length,
                    "depth": f.depth} for f in spec.flutes],
        "word_ball": spec.word_ball,
        "theoremC": spec.theoremC,
    }
