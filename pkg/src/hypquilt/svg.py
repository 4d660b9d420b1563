"""Static SVG figures. Coordinates are printed with fixed precision so output is byte-stable."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from . import hyp_core as hc

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class Canvas:
    """Affine window [x0, x1] x [y0, y1] mapped onto a width x height picture (y up)."""

    def __init__(self, x0, x1, y0, y1, width=800, height=420, margin=30):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.w, self.h, self.m = width, height, margin
        self.items = []

    def X(self, x):
        return self.m + (x - self.x0) / (self.x1 - self.x0) * (self.w - 2 * self.m)

    def Y(self, y):
        return self.h - self.m - (y - self.y0) / (self.y1 - self.y0) * (self.h - 2 * self.m)

    def line(self, x1, y1, x2, y2, color="#000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{_f(self.X(x1))}" y1="{_f(self.Y(y1))}" '
                          f'x2="{_f(self.X(x2))}" y2="{_f(self.Y(y2))}" stroke="{color}" '
                          f'stroke-width="{_f(width)}"{d}/>')

    def polyline(self, pts, color="#000", width=1.0):
        if len(pts) < 2:
            return
        s = " ".join(f"{_f(self.X(x))},{_f(self.Y(y))}" for x, y in pts)
        self.items.append(f'<polyline points="{s}" fill="none" stroke="{color}" '
                          f'stroke-width="{_f(width)}"/>')

    def dot(self, x, y, r=3.0, color="#000"):
        self.items.append(f'<circle cx="{_f(self.X(x))}" cy="{_f(self.Y(y))}" r="{_f(r)}" '
                          f'fill="{color}"/>')

    def text(self, x, y, s, size=11, anchor="start"):
        self.items.append(f'<text x="{_f(self.X(x))}" y="{_f(self.Y(y))}" font-size="{size}" '
                          f'text-anchor="{anchor}" font-family="sans-serif">{escape(s)}</text>')

    def geodesic(self, g: hc.Geodesic, color="#888", width=0.8):
        """Draw a geodesic clipped to the window (semicircle as an SVG arc)."""
        if isinstance(g, hc.Vertical):
            if self.x0 <= g.foot <= self.x1:
                self.line(g.foot, self.y0, g.foot, self.y1, color, width)
            return
        c, r = g.center, g.radius
        if c + r < self.x0 or c - r > self.x1:
            return
        sx = (self.w - 2 * self.m) / (self.x1 - self.x0)
        sy = (self.h - 2 * self.m) / (self.y1 - self.y0)
        self.items.append(
            f'<path d="M {_f(self.X(c - r))} {_f(self.Y(0))} A {_f(r * sx)} {_f(r * sy)} 0 0 1 '
            f'{_f(self.X(c + r))} {_f(self.Y(0))}" fill="none" stroke="{color}" '
            f'stroke-width="{_f(width)}"/>')

    def render(self, title: str = "") -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">')
        clip = (f'<defs><clipPath id="win"><rect x="{self.m}" y="0" width="{self.w - 2 * self.m}" '
                f'height="{self.h - self.m}"/></clipPath></defs>')
        body = "\n".join(self.items)
        t = f'<text x="{self.m}" y="18" font-size="13" font-family="sans-serif">{escape(title)}</text>'
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', clip, t,
                          f'<g clip-path="url(#win)">', body, "</g>", "</svg>"]) + "\n"


def axis_window(a: float, pad: float = 1.35):
    w = pad * math.exp(a)
    return -w, w, 0.0, w


def dirichlet_figure(approx, a: float, c_star=(), max_arcs: int = 400, title="") -> str:
    """Bisector arcs, surviving boundary intervals (thick) and C* ticks."""
    x0, x1, y0, y1 = axis_window(a)
    cv = Canvas(x0, x1, y0, y1)
    cv.line(x0, 0, x1, 0, "#000", 0.8)
    lo, hi = approx.shadows_lo, approx.shadows_hi
    arcs = []
    for u, v in zip(lo.tolist(), hi.tolist()):
        if math.isinf(u) or math.isinf(v):
            foot = v if math.isinf(u) else u
            arcs.append((math.inf, hc.Vertical(foot)))
            continue
        p, q = (u, v) if u < v else (v, u)
        arcs.append(((q - p) / 2, hc.Semicircle((p + q) / 2, (q - p) / 2)))
    arcs.sort(key=lambda t: (-t[0], _geo_key(t[1])))
    for _, g in arcs[:max_arcs]:
        cv.geodesic(g)
    for iv in approx.boundary_at_infinity:
        for s, e in _pieces(iv, x0, x1):
            if e - s < 1e-9 * (x1 - x0):
                cv.dot(s, 0, 2.5, PALETTE[1])
            else:
                cv.line(s, 0, e, 0, PALETTE[0], 4.0)
    for c in c_star:
        cv.line(c, 0, c, 0.04 * y1, PALETTE[2], 1.5)
    cv.dot(approx.center.x, approx.center.y, 3.0)
    cv.text(approx.center.x, approx.center.y, "  p", 11)
    return cv.render(title)


def _geo_key(g):
    return (g.foot, 0.0) if isinstance(g, hc.Vertical) else (g.center, g.radius)


def _pieces(iv, x0, x1):
    if iv.lo == math.inf:
        segs = [(-math.inf, iv.hi)]
    elif iv.wraps:
        segs = [(iv.lo, math.inf), (-math.inf, iv.hi)]
    else:
        segs = [(iv.lo, iv.hi)]
    out = []
    for s, e in segs:
        s, e = max(s, x0), min(e, x1)
        if s <= e:
            out.append((s, e))
    return out


def domain_figure(group, a: float, title="") -> str:
    """Sides of the explicit fundamental domain and the generator fixed points."""
    x0, x1, y0, y1 = axis_window(a)
    cv = Canvas(0.0, x1, y0, y1 / 1.6)
    cv.line(0.0, 0, x1, 0, "#000", 0.8)
    for i, side in enumerate(group.domain or []):
        cv.geodesic(side.halfplane.boundary, PALETTE[i % len(PALETTE)], 1.2)
    for g in group.generators:
        if hc.classify(g.element) == "parabolic":
            for x in hc.fixed_points(g.element):
                cv.dot(x, 0, 2.5, PALETTE[1])
    cv.dot(group.basepoint.x, group.basepoint.y, 3.0)
    return cv.render(title)


def profile_figure(series, t_max: float, y_max: float | None = None, title="") -> str:
    """Line chart of labelled (times, values) series."""
    top = y_max if y_max is not None else max([1.0] + [max(v) for _, _, v in series if v])
    cv = Canvas(0.0, t_max, 0.0, 1.05 * top, margin=40)
    cv.line(0, 0, t_max, 0)
    cv.line(0, 0, 0, 1.05 * top)
    for k, (label, ts, vs) in enumerate(series):
        col = PALETTE[k % len(PALETTE)]
        cv.polyline(list(zip(ts, vs)), col, 1.5)
        cv.text(0.02 * t_max, top * (1.0 - 0.06 * k), label, 10)
        cv.line(0.0, top * (1.0 - 0.06 * k) - 0.01 * top, 0.015 * t_max,
                top * (1.0 - 0.06 * k) - 0.01 * top, col, 2)
    cv.text(t_max, 0.02 * top, f"t = {_f(t_max)}", 10, "end")
    return cv.render(title)
