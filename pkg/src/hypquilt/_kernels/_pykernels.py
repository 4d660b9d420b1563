"""numpy implementations of the hot loops (reference and fallback)."""

import numpy as np


def _act(mats, x, y):
    a, b, c, d = mats[:, 0], mats[:, 1], mats[:, 2], mats[:, 3]
    z = complex(x, y)
    w = (a * z + b) / (c * z + d)
    return w.real, w.imag


def _dist(x1, y1, x2, y2):
    dx = x1 - x2
    s = np.hypot(dx, y1 - y2)
    sb = np.hypot(dx, y1 + y2)
    return 2.0 * np.log((sb + s) / (2.0 * np.sqrt(y1 * y2)))


def act_points(mats, x, y):
    """Images of one point under every matrix: (xs, ys)."""
    return _act(np.asarray(mats, dtype=float), x, y)


def displacements(mats, x, y):
    gx, gy = _act(np.asarray(mats, dtype=float), x, y)
    return _dist(x, y, gx, gy)


def orbit_distances(mats, zx, zy, wx, wy):
    """d(z, g w) for every row g."""
    gx, gy = _act(np.asarray(mats, dtype=float), wx, wy)
    return _dist(zx, zy, gx, gy)


def orbit_min_distance(mats, zx, zy, wx, wy):
    d = orbit_distances(mats, zx, zy, wx, wy)
    i = int(np.argmin(d))
    return float(d[i]), i


def min_dist_to_centered(mats, zx, zy, radii):
    """min over g, r of d(z, g.Semicircle(0, r)), computed as d(g^-1 z, Semicircle(0, r)).

    Returns (min, row index, radius index).
    """
    m = np.asarray(mats, dtype=float)
    inv = np.stack([m[:, 3], -m[:, 1], -m[:, 2], m[:, 0]], axis=1)
    x, y = _act(inv, zx, zy)
    r = np.asarray(radii, dtype=float)
    q = x[:, None] ** 2 + y[:, None] ** 2
    d = np.arcsinh(np.abs(q - r[None, :] ** 2) / (2.0 * r[None, :] * y[:, None]))
    k = int(np.argmin(d))
    i, j = divmod(k, len(r))
    return float(d[i, j]), i, j


def bisectors(mats, x, y):
    """Perpendicular bisectors of p and g p.

    Returns (is_vertical, c, r): a vertical line at c (r = 0) or a semicircle
    with center c and radius r.
    """
    gx, gy = _act(np.asarray(mats, dtype=float), x, y)
    dy = gy - y
    vert = np.abs(dy) <= 1e-15 * np.maximum(gy, y)
    safe = np.where(vert, 1.0, dy)
    c = (gy * x - y * gx) / safe
    const = (gy * (x * x + y * y) - y * (gx * gx + gy * gy)) / safe
    r = np.sqrt(np.maximum(c * c - const, 0.0))
    c = np.where(vert, 0.5 * (x + gx), c)
    r = np.where(vert, 0.0, r)
    return vert, c, r
