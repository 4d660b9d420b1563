"""Upper half-plane kernel: points, ideal points, geodesics and isometries.

Ideal points are plain floats; ``math.inf`` is the single point at infinity
(``-inf`` is never produced). Isometries are stored as a unimodular real
matrix plus an orientation flag. An orientation -1 isometry acts as the
matrix applied to ``-conj(z)``, i.e. it is ``M o J`` with ``J(z) = -conj(z)``
the reflection in the imaginary axis. This keeps ``det M = +1`` for both
orientations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

INF = math.inf

# |(|tr| - 2)| below this counts as parabolic
PARABOLIC_BAND = 1e-9
DET_TOL = 1e-12
# entries smaller than this are treated as zero when picking the sign
_SIGN_EPS = 1e-13


class DegenerateInputError(ValueError):
    """Raised for coincident or otherwise degenerate geometric input."""


class HypDomainError(ValueError):
    """Raised when an operation is undefined for its input (e.g. elliptic length)."""


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")
        if self.y <= 0:
            raise ValueError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(float(z.real), float(z.imag))

    def __repr__(self):
        return f"HPoint({self.x!r}, {self.y!r})"


def is_infinite(q: float) -> bool:
    return math.isinf(q)


# ---------------------------------------------------------------- geodesics


@dataclass(frozen=True)
class Vertical:
    """The vertical geodesic over ``foot``."""

    foot: float

    def endpoints(self) -> tuple[float, float]:
        return (self.foot, INF)


@dataclass(frozen=True)
class Semicircle:
    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def endpoints(self) -> tuple[float, float]:
        return (self.center - self.radius, self.center + self.radius)


Geodesic = Union[Vertical, Semicircle]

IMAG_AXIS = Vertical(0.0)


def psi(x: float) -> Semicircle:
    """Geodesic with endpoints -x and x."""
    return Semicircle(0.0, abs(x))


def contains_point(g: Geodesic, z: HPoint, tol: float = 1e-9) -> bool:
    return abs(signed_side(g, z)) <= tol * max(1.0, abs(z.x), z.y)


def signed_side(g: Geodesic, z: HPoint) -> float:
    """Euclidean signed offset of ``z`` from ``g``.

    Positive means right of a vertical, or outside a semicircle.
    """
    if isinstance(g, Vertical):
        return z.x - g.foot
    return math.hypot(z.x - g.center, z.y) - g.radius


# ---------------------------------------------------------------- distances


def distance(z: HPoint, w: HPoint) -> float:
    """Hyperbolic distance via the log formula.

    ``log[(|z-w̄|+|z-w|)/(|z-w̄|-|z-w|)]`` with the denominator rewritten as
    ``4 y_z y_w / (|z-w̄|+|z-w|)`` so large distances do not cancel.
    """
    dz = abs(z.z - w.z)
    dzb = abs(z.z - w.z.conjugate())
    return 2.0 * math.log((dzb + dz) / (2.0 * math.sqrt(z.y * w.y)))


def distance_cosh(z: HPoint, w: HPoint) -> float:
    """Arccosh form of the distance; kept as an independent check."""
    return math.acosh(1.0 + abs(z.z - w.z) ** 2 / (2.0 * z.y * w.y))


def distance_to_geodesic(z: HPoint, g: Geodesic) -> float:
    if isinstance(g, Vertical):
        return math.asinh(abs(z.x - g.foot) / z.y)
    dx = z.x - g.center
    return math.asinh(abs(dx * dx + z.y * z.y - g.radius ** 2) / (2.0 * g.radius * z.y))


# ---------------------------------------------------------------- isometries


def _canon(m11, m12, m21, m22):
    for v in (m11, m12, m21, m22):
        if abs(v) > _SIGN_EPS:
            if v < 0:
                return -m11, -m12, -m21, -m22
            break
    return m11, m12, m21, m22


@dataclass(frozen=True)
class Isometry:
    m11: float
    m12: float
    m21: float
    m22: float
    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        det = self.m11 * self.m22 - self.m12 * self.m21
        # relative: large entries lose digits to cancellation in det
        scale = max(1.0, self.m11 ** 2, self.m12 ** 2, self.m21 ** 2, self.m22 ** 2)
        if abs(det - 1.0) > 1e-9 * scale:
            raise ValueError(f"matrix is not unimodular (det={det!r})")

    @classmethod
    def from_matrix(cls, m11, m12, m21, m22, orientation: int = 1) -> "Isometry":
        """Normalize to determinant one and canonical sign."""
        det = m11 * m22 - m12 * m21
        if det <= 0:
            raise ValueError(f"matrix must have positive determinant, got {det}")
        s = math.sqrt(det)
        return cls(*_canon(m11 / s, m12 / s, m21 / s, m22 / s), orientation)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0, 1)

    @classmethod
    def dilation(cls, lam: float) -> "Isometry":
        """z -> lam * z."""
        r = math.sqrt(lam)
        return cls(r, 0.0, 0.0, 1.0 / r, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def _mobius(self, w: complex) -> complex:
        return (self.m11 * w + self.m12) / (self.m21 * w + self.m22)

    def __call__(self, z):
        if isinstance(z, HPoint):
            return apply(self, z)
        return apply_ideal(self, z)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def inverse(self) -> "Isometry":
        return invert(self)


def apply(g: Isometry, z: HPoint) -> HPoint:
    w = z.z if g.orientation == 1 else -z.z.conjugate()
    return HPoint.from_complex(g._mobius(w))


def apply_ideal(g: Isometry, q: float) -> float:
    if g.orientation == -1 and not is_infinite(q):
        q = -q
    a, b, c, d = g.m11, g.m12, g.m21, g.m22
    if is_infinite(q):
        return INF if c == 0 else a / c
    den = c * q + d
    if den == 0:
        return INF
    return (a * q + b) / den


def _twist(a, b, c, d):
    # J M J for J(z) = -conj(z)
    return a, -b, -c, d


def compose(g: Isometry, h: Isometry) -> Isometry:
    """Return g o h."""
    a, b, c, d = h.m11, h.m12, h.m21, h.m22
    if g.orientation == -1:
        a, b, c, d = _twist(a, b, c, d)
    m11 = g.m11 * a + g.m12 * c
    m12 = g.m11 * b + g.m12 * d
    m21 = g.m21 * a + g.m22 * c
    m22 = g.m21 * b + g.m22 * d
    return Isometry(*_canon(m11, m12, m21, m22), g.orientation * h.orientation)


def invert(g: Isometry) -> Isometry:
    a, b, c, d = g.m22, -g.m12, -g.m21, g.m11
    if g.orientation == -1:
        a, b, c, d = _twist(a, b, c, d)
    return Isometry(*_canon(a, b, c, d), g.orientation)


def is_identity(g: Isometry, tol: float = 1e-10) -> bool:
    return (g.orientation == 1 and abs(g.m11 - 1) <= tol and abs(g.m22 - 1) <= tol
            and abs(g.m12) <= tol and abs(g.m21) <= tol)


def isometries_close(g: Isometry, h: Isometry, tol: float = 1e-10) -> bool:
    if g.orientation != h.orientation:
        return False
    return max(abs(g.m11 - h.m11), abs(g.m12 - h.m12),
               abs(g.m21 - h.m21), abs(g.m22 - h.m22)) <= tol


def apply_geodesic(g: Isometry, gam: Geodesic) -> Geodesic:
    u, v = gam.endpoints()
    return geodesic_from_endpoints(apply_ideal(g, u), apply_ideal(g, v))


# ---------------------------------------------------------------- constructors


def geodesic_between(p: HPoint, q: HPoint) -> Geodesic:
    scale = max(1.0, abs(p.x), abs(q.x), p.y, q.y)
    if abs(p.x - q.x) <= 1e-14 * scale:
        if abs(p.y - q.y) <= 1e-14 * scale:
            raise DegenerateInputError("coincident points")
        return Vertical(0.5 * (p.x + q.x))
    c = (q.x ** 2 + q.y ** 2 - p.x ** 2 - p.y ** 2) / (2.0 * (q.x - p.x))
    return Semicircle(c, math.hypot(p.x - c, p.y))


def geodesic_from_endpoints(u: float, v: float) -> Geodesic:
    if is_infinite(u) and is_infinite(v):
        raise DegenerateInputError("both endpoints at infinity")
    if is_infinite(u):
        return Vertical(v)
    if is_infinite(v):
        return Vertical(u)
    if u == v:
        raise DegenerateInputError("coincident ideal endpoints")
    return Semicircle(0.5 * (u + v), 0.5 * abs(v - u))


def perpendicular_bisector(p: HPoint, q: HPoint) -> Geodesic:
    """Locus y_q|z-p|^2 = y_p|z-q|^2."""
    if p == q:
        raise DegenerateInputError("bisector of a point with itself")
    dy = q.y - p.y
    scale = max(p.y, q.y)
    if abs(dy) <= 1e-15 * scale:
        if abs(p.x - q.x) <= 1e-15 * max(1.0, abs(p.x)):
            raise DegenerateInputError("bisector of a point with itself")
        return Vertical(0.5 * (p.x + q.x))
    c = (q.y * p.x - p.y * q.x) / dy
    const = (q.y * (p.x ** 2 + p.y ** 2) - p.y * (q.x ** 2 + q.y ** 2)) / dy
    r2 = c * c - const
    return Semicircle(c, math.sqrt(r2))


def standardizer(gam: Geodesic) -> Isometry:
    """Orientation-preserving isometry taking ``gam`` to the imaginary axis.

    The first endpoint goes to 0, the second to infinity, and the reference
    point of ``gam`` (``foot + i`` or the top of the semicircle) goes to i.
    """
    if isinstance(gam, Vertical):
        return Isometry(1.0, -gam.foot, 0.0, 1.0)
    u, v = gam.endpoints()
    return Isometry.from_matrix(1.0, -u, -1.0, v)


def foot_of_perpendicular(z: HPoint, gam: Geodesic) -> HPoint:
    t = standardizer(gam)
    w = apply(t, z)
    return apply(invert(t), HPoint(0.0, abs(w.z)))


def point_at(gam: Geodesic, s: float) -> HPoint:
    """Point at signed arc length ``s`` from the reference point of ``gam``."""
    t = standardizer(gam)
    return apply(invert(t), HPoint(0.0, math.exp(s)))


def orthogonal_geodesic_at(gam: Geodesic, s: float) -> Geodesic:
    t = standardizer(gam)
    return apply_geodesic(invert(t), Semicircle(0.0, math.exp(s)))


def reflect_in(gam: Geodesic) -> Isometry:
    if isinstance(gam, Vertical):
        # z -> 2f - conj(z)
        return Isometry(1.0, 2.0 * gam.foot, 0.0, 1.0, -1)
    c, r = gam.center, gam.radius
    # z -> c + r^2/(conj(z) - c), written in w = -conj(z)
    return Isometry(*_canon(c / r, (c * c - r * r) / r, 1.0 / r, c / r), -1)


# ---------------------------------------------------------------- classification


def classify(g: Isometry, band: float = PARABOLIC_BAND) -> str:
    if g.orientation != 1:
        raise HypDomainError("classification needs an orientation-preserving isometry")
    if is_identity(g):
        return "identity"
    t = abs(g.trace)
    if t < 2.0 - band:
        return "elliptic"
    if t <= 2.0 + band:
        return "parabolic"
    return "hyperbolic"


def translation_length(g: Isometry) -> float:
    kind = classify(g)
    if kind == "elliptic":
        raise HypDomainError("elliptic elements have no translation length")
    if kind != "hyperbolic":
        return 0.0
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def fixed_points(g: Isometry) -> tuple[float, ...]:
    """Boundary fixed points (empty for the identity and elliptics)."""
    kind = classify(g)
    if kind in ("identity", "elliptic"):
        return ()
    a, b, c, d = g.m11, g.m12, g.m21, g.m22
    if kind == "parabolic":
        if abs(c) <= _SIGN_EPS:
            return (INF,)
        return ((a - d) / (2.0 * c) + 0.0,)
    disc = math.sqrt(max((a + d) ** 2 - 4.0, 0.0))
    if abs(c) <= _SIGN_EPS:
        return (b / (d - a) + 0.0, INF)   # + 0.0 turns -0.0 into 0.0
    r1 = (a - d - disc) / (2.0 * c)
    r2 = (a - d + disc) / (2.0 * c)
    return (min(r1, r2) + 0.0, max(r1, r2) + 0.0)


def axis(g: Isometry) -> Geodesic:
    fp = fixed_points(g)
    if len(fp) != 2:
        raise HypDomainError("only hyperbolic elements have an axis")
    return geodesic_from_endpoints(*fp)


def geodesic_gap(g1: Geodesic, g2: Geodesic) -> float:
    """Length of the common perpendicular of two ultraparallel geodesics.

    Returns 0.0 for asymptotic pairs and nan for crossing ones.
    """
    e1, e2 = g1.endpoints(), g2.endpoints()
    for p in e1:
        for q in e2:
            if p == q or (math.isfinite(p) and math.isfinite(q)
                          and abs(p - q) <= 1e-14 * max(1.0, abs(p))):
                return 0.0       # shared endpoint: round-off in t could flip a sign
    t = standardizer(g1)
    u, v = (apply_ideal(t, q) for q in e2)
    if is_infinite(u) or is_infinite(v) or u == 0.0 or v == 0.0:
        return 0.0
    if (u < 0) != (v < 0):
        return math.nan
    u, v = sorted((abs(u), abs(v)))
    if u == v:
        return 0.0
    return math.acosh((v + u) / (v - u))


@dataclass(frozen=True)
class HalfPlane:
    """One side of a geodesic. ``side=+1`` is right of a vertical or outside a semicircle."""

    boundary: Geodesic
    side: int

    def __post_init__(self):
        if self.side not in (1, -1):
            raise ValueError("side must be +1 or -1")

    @classmethod
    def containing(cls, boundary: Geodesic, z: HPoint) -> "HalfPlane":
        s = signed_side(boundary, z)
        if s == 0.0:
            raise DegenerateInputError("point lies on the boundary geodesic")
        return cls(boundary, 1 if s > 0 else -1)

    def contains(self, z: HPoint, tol: float = 0.0) -> bool:
        return self.side * signed_side(self.boundary, z) > -tol

    def distance_from(self, z: HPoint) -> float:
        """Hyperbolic distance from z to this half-plane (0 inside)."""
        if self.contains(z):
            return 0.0
        return distance_to_geodesic(z, self.boundary)
