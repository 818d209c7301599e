"""Planar polyline helpers used in chart coordinates."""

import numpy as np


def lattice_translates(periods, reach=1):
    """Lattice vectors ``sum k_i p_i`` with ``|k_i| <= reach`` (the zero vector first)."""
    periods = np.asarray(periods, dtype=float).reshape(-1, 2)
    if len(periods) == 0:
        return np.zeros((1, 2))
    ks = np.arange(-reach, reach + 1)
    grids = np.meshgrid(*([ks] * len(periods)), indexing="ij")
    coeffs = np.stack([g.ravel() for g in grids], -1)
    order = np.argsort(np.abs(coeffs).sum(-1), kind="stable")
    return coeffs[order] @ periods


def winding_numbers(points, poly):
    """Winding number of each point about the closed polygon ``poly`` (m, 2).

    ``poly`` lists vertices without repeating the first one.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(len(points), dtype=int)
    a = poly
    b = np.roll(poly, -1, axis=0)
    ex, ey = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    chunk = max(1, 2_000_000 // max(len(poly), 1))
    for s in range(0, len(points), chunk):
        px = points[s:s + chunk, 0:1]
        py = points[s:s + chunk, 1:2]
        # signed crossings of the rightward ray (exact winding number)
        side = ex * (py - a[:, 1]) - ey * (px - a[:, 0])
        up = (a[:, 1] <= py) & (b[:, 1] > py) & (side > 0)
        down = (a[:, 1] > py) & (b[:, 1] <= py) & (side < 0)
        out[s:s + chunk] = up.sum(1) - down.sum(1)
    return out


def periodic_winding(points, poly, periods, reach=2):
    """Winding summed over lattice translates of the points (degree on the quotient)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    total = np.zeros(len(points), dtype=int)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    for k in lattice_translates(periods, reach):
        q = points + k
        near = np.all((q >= lo) & (q <= hi), axis=1)  # winding vanishes outside the bounding box
        if np.any(near):
            total[near] += winding_numbers(q[near], poly)
    return total


def point_polyline_distance(points, poly):
    """Distance from each point to the open polyline ``poly`` (m, 2)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    a = poly[:-1][None]
    d = (poly[1:] - poly[:-1])[None]
    rel = points[:, None, :] - a
    dd = np.maximum(np.sum(d * d, -1), 1e-300)
    t = np.clip(np.sum(rel * d, -1) / dd, 0.0, 1.0)
    return np.min(np.linalg.norm(rel - t[..., None] * d, axis=-1), axis=1)


def segment_crossings(P, Q, exclude_adjacent=None):
    """Intersections of segments ``P[i]->P[i+1]`` with ``Q[j]->Q[j+1]``.

    Parameters are half-open, ``u, v in [0, 1)``, so a crossing through a shared
    vertex is reported once.  ``exclude_adjacent`` is an optional callable
    ``(i, j) -> bool mask`` removing pairs (used for self-intersection tests).
    Returns arrays ``(i, j, u, v)``.
    """
    p0, d = P[:-1], P[1:] - P[:-1]
    q0, e = Q[:-1], Q[1:] - Q[:-1]
    # bounding-box prefilter
    pmin, pmax = np.minimum(P[:-1], P[1:]), np.maximum(P[:-1], P[1:])
    qmin, qmax = np.minimum(Q[:-1], Q[1:]), np.maximum(Q[:-1], Q[1:])
    tol = 1e-12 * (1.0 + np.abs(P).max() + np.abs(Q).max())
    ok = np.all((pmin[:, None] <= qmax[None] + tol) & (qmin[None] <= pmax[:, None] + tol), -1)
    if exclude_adjacent is not None:
        ok &= ~exclude_adjacent(*np.indices(ok.shape))
    ii, jj = np.nonzero(ok)
    if len(ii) == 0:
        return (np.zeros(0, int),) * 2 + (np.zeros(0),) * 2
    dp, eq, w = d[ii], e[jj], q0[jj] - p0[ii]
    den = dp[:, 0] * eq[:, 1] - dp[:, 1] * eq[:, 0]
    scale = np.linalg.norm(dp, axis=1) * np.linalg.norm(eq, axis=1)
    nonpar = np.abs(den) > 1e-14 * np.maximum(scale, 1e-300)
    den = np.where(nonpar, den, 1.0)
    u = (w[:, 0] * eq[:, 1] - w[:, 1] * eq[:, 0]) / den
    v = (w[:, 0] * dp[:, 1] - w[:, 1] * dp[:, 0]) / den
    eps = 1e-12
    hit = nonpar & (u >= -eps) & (u < 1 - eps) & (v >= -eps) & (v < 1 - eps)
    return ii[hit], jj[hit], np.clip(u[hit], 0, 1), np.clip(v[hit], 0, 1)


def shoelace(poly):
    """Signed Euclidean area of a closed polygon (vertices not repeated)."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
