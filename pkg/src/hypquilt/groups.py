"""Matrix generators for truncated quilt groups and word-ball enumeration.

Each flute is realised by a chain of reflections. The imaginary axis plays
the boundary geodesic beta*, the semicircles gamma_j are tangent in a row,
and the unit semicircle is the lift of the first dividing loop. Products of
consecutive reflections are the puncture parabolics. ``align_map`` moves the
cut-open flute onto the strip over its complement interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import hyp_core as hc
from .quilt import FluteSpec, IntervalRec, QuiltSpec, check_theoremC

DEFAULT_CAP = 2_000_000
KEY_GRID = 1e-9
DEFAULT_PRUNE = 10.0   # displacement radius; free-group balls explode without it


class GroupConstructionError(RuntimeError):
    pass


class BallCapError(RuntimeError):
    """Raised when enumeration exceeds its element cap; carries the partial ball."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial
        self.partial_result = True


# ---------------------------------------------------------------- flutes


@dataclass(frozen=True)
class ReflectionChain:
    boundary_lift: hc.Geodesic
    gammas: tuple[hc.Semicircle, ...]
    lengths: tuple[float, ...]
    u: tuple[float, ...]
    v: tuple[float, ...]

    @property
    def depth(self) -> int:
        return len(self.gammas)

    def reflections(self) -> list[hc.Isometry]:
        return [hc.reflect_in(g) for g in self.gammas]


def reflection_chain(spec: FluteSpec) -> ReflectionChain:
    lengths = spec.lengths()
    if any(not L > 0 for L in lengths):
        raise hc.HypDomainError("chain lengths must be positive")
    u, v = [], []
    for j, L in enumerate(lengths):
        c = math.cosh(0.5 * L)
        tau = (c + 1.0) / (c - 1.0)
        if j == 0:
            u.append(tau ** -0.5)
            v.append(tau ** 0.5)
        else:
            u.append(v[-1])
            v.append(tau * u[-1])
    gammas = tuple(hc.geodesic_from_endpoints(a, b) for a, b in zip(u, v))
    return ReflectionChain(hc.IMAG_AXIS, gammas, tuple(lengths), tuple(u), tuple(v))


def flute_loop_elements(chain: ReflectionChain) -> list[hc.Isometry]:
    """h_j = rho_beta o rho_j; hyperbolic with translation length l_j."""
    rb = hc.reflect_in(chain.boundary_lift)
    return [hc.compose(rb, r) for r in chain.reflections()]


def flute_parabolics(chain: ReflectionChain) -> list[hc.Isometry]:
    """P_j = rho_j o rho_{j+1}, fixing the tangency point v_j."""
    rs = chain.reflections()
    return [hc.compose(rs[j], rs[j + 1]) for j in range(len(rs) - 1)]


def flute_side_pairings(chain: ReflectionChain):
    """Side pairings of the cut-open flute domain.

    Q_j = rho_0 o rho_j maps the outside of gamma_j into the disc bounded by
    rho_0(gamma_j), for j = 1..k-1. Returns (Q_j, gamma_j, rho_0(gamma_j)).
    """
    rs = chain.reflections()
    out = []
    for j in range(1, chain.depth):
        out.append((hc.compose(rs[0], rs[j]), chain.gammas[j],
                    hc.apply_geodesic(rs[0], chain.gammas[j])))
    return out


def align_map(chain: ReflectionChain, interval: IntervalRec) -> hc.Isometry:
    """Orientation-reversing z -> e^{s1} (conj(z) + 1)/(conj(z) - 1).

    Sends the unit semicircle onto the imaginary axis with i -> i e^{s1}, the
    imaginary axis onto psi(e^{s1}) and the outside of the unit disc onto the
    right half-plane, where the flute is glued.
    """
    l0 = chain.lengths[0]
    s1 = interval.start
    if abs(interval.length - l0) > 1e-9:
        raise GroupConstructionError(
            f"interval length {interval.length} does not match first loop {l0}")
    lam = math.exp(0.5 * s1)
    r2 = math.sqrt(2.0)
    return hc.Isometry(lam / r2, -lam / r2, 1.0 / (lam * r2), 1.0 / (lam * r2), -1)


def conjugate(m: hc.Isometry, g: hc.Isometry) -> hc.Isometry:
    return hc.compose(hc.compose(m, g), hc.invert(m))


# ---------------------------------------------------------------- domain


@dataclass(frozen=True)
class DomainSide:
    """A side of the fundamental domain: the domain lies in ``halfplane``.

    Crossing the side from the domain leads to the tile ``neighbor(D)``.
    """

    halfplane: hc.HalfPlane
    neighbor: hc.Isometry
    label: str


# ---------------------------------------------------------------- group


@dataclass
class Generator:
    label: str
    element: hc.Isometry

    def to_json(self):
        e = self.element
        return {"label": self.label, "matrix": [e.m11, e.m12, e.m21, e.m22],
                "kind": hc.classify(e)}


@dataclass
class Ball:
    mats: np.ndarray            # (n, 4) rows m11 m12 m21 m22, identity first
    words: list                 # tuples of letter indices
    displacement: np.ndarray    # d(p, g p)
    max_len: int
    prune_radius: float | None
    certified_radius: float

    def __len__(self):
        return len(self.words)


@dataclass
class GroupApprox:
    generators: list
    basepoint: hc.HPoint
    word_ball: int
    a: float
    letters: list = field(default_factory=list)   # generators then inverses
    letter_labels: list = field(default_factory=list)
    domain: list | None = None
    ball: Ball | None = None
    stage_info: dict = field(default_factory=dict)

    def isometry(self, idx: int) -> hc.Isometry:
        m = self.ball.mats[idx]
        return hc.Isometry.from_matrix(*m)

    def word_string(self, word) -> str:
        return ".".join(self.letter_labels[i] for i in word) or "id"

    def nontrivial(self):
        return range(1, len(self.ball))


def _letters(gens: Sequence[Generator]):
    lets, labels = [], []
    for g in gens:
        lets.append(g.element)
        labels.append(g.label)
    for g in gens:
        lets.append(hc.invert(g.element))
        labels.append(g.label + "^-1")
    return lets, labels


def _canon_rows(m: np.ndarray) -> np.ndarray:
    """Flip signs so the first entry above 1e-13 in magnitude is positive."""
    big = np.abs(m) > 1e-13
    first = np.argmax(big, axis=1)
    s = np.sign(m[np.arange(len(m)), first])
    s[s == 0] = 1.0
    return m * s[:, None]


def _keys(m: np.ndarray):
    q = np.round(m / KEY_GRID).astype(np.int64)
    return [r.tobytes() for r in q]


def _disp(m: np.ndarray, p: hc.HPoint) -> np.ndarray:
    from ._kernels import displacements
    return displacements(np.ascontiguousarray(m), p.x, p.y)


def enumerate_ball(gens: Sequence[Generator], max_len: int, basepoint: hc.HPoint,
                   prune_radius: float | None = None, cap: int = DEFAULT_CAP) -> Ball:
    """All reduced words up to ``max_len``, deduplicated on canonical matrices.

    Words are expanded in generator order so the output order is
    (length, letter sequence). With ``prune_radius`` a word moving the
    basepoint further than the radius is dropped with its whole branch.
    The certified radius is the smallest displacement among the words one
    letter longer than the ball (or the prune radius if that is smaller).
    """
    lets, _ = _letters(gens)
    if any(g.orientation != 1 for g in lets):
        raise GroupConstructionError("enumeration needs orientation-preserving generators")
    n = len(gens)
    L = np.array([[g.m11, g.m12, g.m21, g.m22] for g in lets]).reshape(-1, 2, 2)
    inv_of = np.array([(i + n) % (2 * n) for i in range(2 * n)])

    mats = [np.array([[1.0, 0.0, 0.0, 1.0]])]
    words = [()]
    disps = [np.zeros(1)]
    seen = set(_keys(mats[0]))
    front_m = mats[0].reshape(-1, 2, 2)
    front_w = [()]
    front_last = np.array([-1])
    frontier_min = math.inf
    total = 1
    for length in range(1, max_len + 2):
        if len(front_w) == 0:
            break
        # children: every front element times every letter except the inverse of its last
        fi, li = np.nonzero(np.ones((len(front_w), 2 * n), dtype=bool))
        keep = (front_last[fi] < 0) | (li != inv_of[np.maximum(front_last[fi], 0)])
        fi, li = fi[keep], li[keep]
        prod = np.matmul(front_m[fi], L[li]).reshape(-1, 4)
        prod = _canon_rows(prod)
        d = _disp(prod, basepoint)
        if length == max_len + 1:
            frontier_min = float(d.min()) if len(d) else math.inf
            break
        if prune_radius is not None:
            ok = d <= prune_radius
            fi, li, prod, d = fi[ok], li[ok], prod[ok], d[ok]
        keys = _keys(prod)
        new_idx = []
        for j, k in enumerate(keys):
            if k not in seen:
                seen.add(k)
                new_idx.append(j)
        new_idx = np.array(new_idx, dtype=np.int64)
        if len(new_idx) == 0:
            front_w = []
            break
        fi, li, prod, d = fi[new_idx], li[new_idx], prod[new_idx], d[new_idx]
        new_words = [front_w[f] + (int(l),) for f, l in zip(fi, li)]
        total += len(new_words)
        mats.append(prod)
        words.extend(new_words)
        disps.append(d)
        if total > cap:
            partial = Ball(np.concatenate(mats), words, np.concatenate(disps), length,
                           prune_radius, 0.0)
            raise BallCapError(f"word ball exceeded cap of {cap} elements at length {length}",
                               partial)
        front_m = prod.reshape(-1, 2, 2)
        front_w = new_words
        front_last = li
    cert = frontier_min
    if prune_radius is not None:
        cert = min(cert, prune_radius)
    return Ball(np.concatenate(mats), words, np.concatenate(disps), max_len, prune_radius, cert)


# ---------------------------------------------------------------- assembly


def g0(a: float) -> hc.Isometry:
    return hc.Isometry.dilation(math.exp(a))


def flute_generators(spec: QuiltSpec):
    """Conjugated puncture parabolics, domain sides and per-flute data."""
    gens, sides, info = [], [], []
    for iv, fl in zip(spec.intervals, spec.flutes):
        ch = reflection_chain(fl)
        M = align_map(ch, iv)
        Minv = hc.invert(M)
        for j, P in enumerate(flute_parabolics(ch)):
            gens.append(Generator(f"P{iv.index}.{j}", conjugate(M, P)))
        for j, (Q, g_out, g_in) in enumerate(flute_side_pairings(ch), start=1):
            Qc = conjugate(M, Q)
            for geo, nb, tag in ((g_out, hc.invert(Qc), ""), (g_in, Qc, "'")):
                img = hc.apply_geodesic(M, geo)
                # the domain is the outside of each side disc
                sides.append(DomainSide(hc.HalfPlane(img, 1), nb, f"Q{iv.index}.{j}{tag}"))
        info.append({"interval": iv.index, "chain": ch, "align": M, "align_inv": Minv})
    return gens, sides, info


def annulus_sides(a: float) -> list[DomainSide]:
    g = g0(a)
    return [DomainSide(hc.HalfPlane(hc.Semicircle(0.0, 1.0), 1), hc.invert(g), "g0^-1"),
            DomainSide(hc.HalfPlane(hc.Semicircle(0.0, math.exp(a)), -1), g, "g0")]


def _theoremC_reflections(a: float):
    s1 = hc.Semicircle(0.0, 1.0)
    s2 = hc.Semicircle(0.0, math.exp(0.5 * a))
    s3 = hc.geodesic_from_endpoints(-math.exp(0.5 * a), -1.0)
    return (s1, s2, s3), tuple(hc.reflect_in(x) for x in (s1, s2, s3))


def theoremC_generators(a: float) -> list[Generator]:
    """Parabolics of the twice-punctured disc glued on the left half-plane.

    Reflections in psi(1), psi(e^{a/2}) and the semicircle over
    [-e^{a/2}, -1] generate a reflection group with two cusps (at -1 and
    -e^{a/2}). Its orientation-preserving half contains z -> e^{-a} z as
    the product C1 C2 of the two parabolics.
    """
    _, (r1, r2, r3) = _theoremC_reflections(a)
    return [Generator("C1", hc.compose(r1, r3)), Generator("C2", hc.compose(r3, r2))]


def theoremC_sides(a: float) -> list[DomainSide]:
    """The two left discs removed from the fundamental annulus.

    T = r2 r3 = C2^-1 maps the outside of s3 into the disc of r2(s3), which
    is the semicircle over [-e^a, -e^{a/2}].
    """
    (_, _, s3), (_, r2, _) = _theoremC_reflections(a)
    t = hc.compose(r2, hc.reflect_in(s3))
    img = hc.apply_geodesic(r2, s3)
    return [DomainSide(hc.HalfPlane(s3, 1), hc.invert(t), "C.s3"),
            DomainSide(hc.HalfPlane(img, 1), t, "C.s3'")]


def theoremC_extension(spec: QuiltSpec, group: GroupApprox | None = None,
                       prune_radius: float | None = DEFAULT_PRUNE,
                       cap: int = DEFAULT_CAP) -> GroupApprox:
    if not spec.theoremC:
        raise GroupConstructionError("theoremC_extension needs spec.theoremC")
    check_theoremC(spec.a)
    if group is None:
        group = assemble_group(spec, prune_radius=prune_radius, cap=cap, enumerate=False,
                               _allow_C=False)
    extra = theoremC_generators(spec.a)
    q1, q2 = extra[0].element, extra[1].element
    for g in extra:
        if hc.classify(g.element) != "parabolic":
            raise GroupConstructionError(f"{g.label} is not parabolic")
    tr = abs(hc.compose(q1, q2).trace)
    if abs(tr - 2.0 * math.cosh(0.5 * spec.a)) > 1e-8:
        raise GroupConstructionError(f"boundary trace {tr} != 2cosh(a/2)")
    gens = list(group.generators) + extra
    out = GroupApprox(gens, group.basepoint, spec.word_ball, spec.a)
    out.letters, out.letter_labels = _letters(gens)
    out.domain = None if group.domain is None else list(group.domain) + theoremC_sides(spec.a)
    out.stage_info = dict(group.stage_info, theoremC=True, boundary_trace=tr)
    out.ball = enumerate_ball(gens, spec.word_ball, group.basepoint, prune_radius, cap)
    return out


def assemble_group(spec: QuiltSpec, prune_radius: float | None = DEFAULT_PRUNE, cap: int = DEFAULT_CAP,
                   enumerate: bool = True, _allow_C: bool = True) -> GroupApprox:
    """g0 together with every conjugated flute parabolic, plus the ball."""
    if spec.theoremC and _allow_C:
        return theoremC_extension(spec, prune_radius=prune_radius, cap=cap)
    gens = [Generator("g0", g0(spec.a))]
    fgens, sides, info = flute_generators(spec)
    gens += fgens
    for g in gens:
        if g.element.orientation != 1:
            raise GroupConstructionError(f"{g.label} reverses orientation")
    grp = GroupApprox(gens, spec.p_tilde, spec.word_ball, spec.a)
    grp.letters, grp.letter_labels = _letters(gens)
    grp.domain = annulus_sides(spec.a) + sides
    grp.stage_info = {"flutes": info, "theoremC": False}
    if enumerate:
        grp.ball = enumerate_ball(gens, spec.word_ball, spec.p_tilde, prune_radius, cap)
    return grp


def min_displacement(group: GroupApprox) -> float:
    d = group.ball.displacement[1:]
    return float(d.min()) if len(d) else math.inf


def group_to_json(group: GroupApprox, include_ball: bool = False) -> dict:
    out = {"generators": [g.to_json() for g in group.generators],
           "word_ball": group.word_ball,
           "basepoint": [group.basepoint.x, group.basepoint.y]}
    if group.ball is not None:
        out["ball_size"] = len(group.ball)
        out["certified_radius"] = group.ball.certified_radius
        out["min_displacement"] = min_displacement(group)
        if include_ball:
            out["elements"] = [{"word": group.word_string(w), "matrix": m.tolist()}
                               for w, m in zip(group.ball.words, group.ball.mats)]
    return out


def fidelity_checks(spec: QuiltSpec, group: GroupApprox, tol_len: float = 1e-8,
                    tol_tr: float = 1e-9, min_disp: float = 1e-3) -> dict:
    """Loop lengths from traces, parabolic traces and the orbit separation of p."""
    len_err, tr_err = 0.0, 0.0
    for fl in spec.flutes:
        ch = reflection_chain(fl)
        for h, L in zip(flute_loop_elements(ch), ch.lengths):
            len_err = max(len_err, abs(hc.translation_length(h) - L))
    for g in group.generators:
        if g.label.startswith(("P", "C")):
            tr_err = max(tr_err, abs(abs(g.element.trace) - 2.0))
    md = min_displacement(group)
    return {"max_length_error": len_err, "max_parabolic_trace_error": tr_err,
            "min_displacement": md,
            "passed": bool(len_err < tol_len and tr_err < tol_tr and md > min_disp)}
