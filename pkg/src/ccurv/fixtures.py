"""Closed-form curves and regions used by the tests, demos and the CLI."""

from __future__ import annotations

import math

import numpy as np

from . import geometry as geo
from .curve import DiscreteCurve, Region


def plane(half_width=20.0):
    """A flat square torus large enough to act as the Euclidean plane."""
    return geo.FlatTorus.square(half_width)


def circle(surface, center, radius, n=256, ccw=True, phase=0.0):
    """Chart circle ``center + radius (cos t, sin t)``."""
    t = phase + 2 * np.pi * np.arange(n) / n
    if not ccw:
        t = -t
    pts = np.asarray(center, float) + radius * np.stack([np.cos(t), np.sin(t)], -1)
    return DiscreteCurve(surface, pts)


def disk(surface, center, radius, n=256):
    return Region(circle(surface, center, radius, n), witness=center)


def sphere_latitude(rho, n=256, radius=1.0, ccw=True):
    """Latitude at polar angle ``rho`` of the round sphere, in its stereographic chart."""
    S = geo.round_sphere(radius).plane_chart()
    return circle(S, (0.0, 0.0), math.tan(rho / 2), n, ccw)


def sphere_cap(rho, n=256, radius=1.0):
    """Geodesic ball of radius ``radius * rho`` around the north pole."""
    cv = sphere_latitude(rho, n, radius)
    return Region(cv, witness=(0.0, 0.0))


def lens_figure_eight(c, alpha, m=512, surface=None):
    """Flat figure-eight made of two lenses of circular arcs of radius ``1/c``.

    Each lens has corner angle ``alpha`` at both tips.  The curve passes twice
    through the origin, smoothly each time, with branch tangents
    ``(cos(alpha/2), +-sin(alpha/2))``.  The right lens is traversed clockwise
    and the left one counter-clockwise, so the odd-winding region (both lenses)
    is in Configuration 1 with angle ``alpha`` at the node.

    Returns ``(curve, info)`` where ``info`` records the closed-form data.
    """
    surface = plane() if surface is None else surface
    R = 1.0 / c
    half = alpha / 2
    d = 2 * R * math.sin(half)
    ch = R * math.cos(half)
    s = np.arange(m) / m

    def arc(center, a0, a1):
        ang = a0 + (a1 - a0) * s
        return center + R * np.stack([np.cos(ang), np.sin(ang)], -1)

    up_c, lo_c = np.array([d / 2, -ch]), np.array([d / 2, ch])
    # right lens: upper arc origin -> (d,0), lower arc (d,0) -> origin
    a_up0 = math.atan2(ch, -d / 2)
    a_up1 = math.atan2(ch, d / 2)
    a_lo0 = math.atan2(-ch, d / 2)
    a_lo1 = math.atan2(-ch, -d / 2)
    right_up = arc(up_c, a_up0, a_up1)
    right_lo = arc(lo_c, a_lo0, a_lo1)
    # left lens is the mirror image x -> -x
    left_up = right_up * np.array([-1.0, 1.0])
    left_lo = right_lo * np.array([-1.0, 1.0])
    pts = np.vstack([right_up, right_lo, left_up, left_lo])
    curve = DiscreteCurve(surface, pts, corners=(m, 3 * m))
    info = dict(R=R, chord=d, loop_length=2 * alpha * R, length=4 * alpha * R,
                node_indices=(0, 2 * m), tips=(m, 3 * m), alpha=alpha, c=c)
    return curve, info


def tangent_circles(surface=None, r_out=1.0, r_in=0.5, n=256):
    """Two internally tangent circles traversed as one closed curve.

    Both are counter-clockwise and touch at ``(0, -r_out)`` (vertex 0 and
    vertex ``n``).  The winding number is 2 inside the inner disk.
    """
    surface = plane() if surface is None else surface
    t = -np.pi / 2 + 2 * np.pi * np.arange(n) / n
    outer = r_out * np.stack([np.cos(t), np.sin(t)], -1)
    inner = np.array([0.0, r_in - r_out]) + r_in * np.stack([np.cos(t), np.sin(t)], -1)
    return DiscreteCurve(surface, np.vstack([outer, inner]), corners=(0, n))


def peanut(a=2.0, b=3.0, neck=0.6, n=400, surface=None):
    """Smooth dumbbell ``(a cos t, sin t (neck/2 + b cos^2 t))`` with narrowest width ``neck`` at x = 0."""
    surface = plane() if surface is None else surface
    t = 2 * np.pi * np.arange(n) / n
    pts = np.stack([a * np.cos(t), np.sin(t) * (neck / 2 + b * np.cos(t) ** 2)], -1)
    return Region(DiscreteCurve(surface, pts), witness=(a * 0.8, 0.0))


def polygon(surface, corners, per_side=64):
    """Closed polygon with straight chart sides and marked corners."""
    corners = np.asarray(corners, float)
    k = len(corners)
    pts, idx = [], []
    for i in range(k):
        a, b = corners[i], corners[(i + 1) % k]
        idx.append(len(pts))
        for s in np.arange(per_side) / per_side:
            pts.append(a + s * (b - a))
    return DiscreteCurve(surface, np.array(pts), corners=tuple(idx))


def geodesic_polygon(surface, corners, per_side=64):
    """Closed polygon whose sides are geodesics of ``surface``."""
    corners = np.asarray(corners, float)
    k = len(corners)
    pts, idx = [], []
    for i in range(k):
        a, b = corners[i], corners[(i + 1) % k]
        idx.append(len(pts))
        seg = geo.geodesic_between(surface, a, b, per_side + 1)
        pts.extend(seg[:-1])
    return DiscreteCurve(surface, np.array(pts), corners=tuple(idx))


def cylinder_circle(cylinder_length=8.0, radius=math.pi, n=256):
    """Circle of intrinsic radius ``radius`` centred in the flat part of a capped cylinder.

    Returned in profile coordinates ``(s, theta)``; the flat part has metric
    ``ds^2 + dtheta^2`` and ``theta`` is 2 pi periodic.
    """
    surf = geo.capped_cylinder(cylinder_length)
    s0 = math.pi / 2 + cylinder_length / 2
    return circle(surf, (s0, 0.0), radius, n)


def sawtooth(p, q, teeth, amplitude, per_tooth=4, surface=None, phase=0.0):
    """Pinned zig-zag from ``p`` to ``q`` with ``teeth`` teeth of the given amplitude."""
    surface = plane() if surface is None else surface
    p, q = np.asarray(p, float), np.asarray(q, float)
    m = teeth * per_tooth
    s = np.linspace(0.0, 1.0, m + 1)
    d = q - p
    nrm = np.array([-d[1], d[0]]) / np.linalg.norm(d)
    tri = 2 * np.abs(((s * teeth + phase) % 1.0) - 0.5) - 0.5
    tri = tri - np.linspace(tri[0], tri[-1], m + 1)
    pts = p + s[:, None] * d + amplitude * 2 * tri[:, None] * nrm
    return DiscreteCurve(surface, pts, closed=False)


def lens_bump(info, m=None):
    """Test function on the lens figure-eight: 1 at the node, 0 at both tips.

    ``cos(pi d / 2m)`` with ``d`` the vertex-index distance to the nearest
    node pass; it avoids moving the corner tips of the fixture.
    """
    m = info["tips"][0] if m is None else m
    k = np.arange(4 * m)
    d = np.abs(((k + m) % (2 * m)) - m)
    return np.cos(0.5 * np.pi * d / m)


def _peanut_point(t, a, b, neck):
    return np.stack([a * np.cos(t), np.sin(t) * (neck / 2 + b * np.cos(t) ** 2)], -1)


def peanut_arcs(a=2.0, b=3.0, neck=0.6, n=201, surface=None):
    """The two boundary arcs of :func:`peanut` between the neck points, as pinned curves.

    Returns ``(p, q, right, left)``: both arcs run from ``p = (0, -neck/2)``
    to ``q = (0, neck/2)``.
    """
    surface = plane() if surface is None else surface
    right = _peanut_point(np.linspace(-np.pi / 2, np.pi / 2, n), a, b, neck)
    left = _peanut_point(np.linspace(3 * np.pi / 2, np.pi / 2, n), a, b, neck)
    right[0] = left[0] = (0.0, -neck / 2)
    right[-1] = left[-1] = (0.0, neck / 2)
    return (right[0], right[-1], DiscreteCurve(surface, right, closed=False),
            DiscreteCurve(surface, left, closed=False))


def peanut_family(a=2.0, b=3.0, neck=0.6, slices=32, samples=129, surface=None):
    """Region-filling path family of the peanut from the right arc to the left arc.

    The peanut is ``{|y| <= h(x)}``; slice ``tau`` maps a boundary arc point
    ``(x, y)`` to ``(lam x, y h(lam x) / h(x))`` with ``lam = |1 - 2 tau|``,
    passing through the neck chord at ``tau = 1/2``.
    """
    from .minmax import Sweepout
    from .shortening import constant_speed_points
    surface = plane() if surface is None else surface
    p, q, right, left = peanut_arcs(a, b, neck, 401, surface)

    def h(x):
        ct = np.clip(x / a, -1.0, 1.0)
        return np.sqrt(1 - ct**2) * (neck / 2 + b * ct**2)

    taus = np.linspace(0.0, 1.0, slices)
    out = []
    for tau in taus:
        lam = abs(1 - 2 * tau)
        base = right if tau <= 0.5 else left
        x, y = base.vertices[:, 0], base.vertices[:, 1]
        hx = h(x)
        ratio = np.where(hx > 1e-12, y / np.where(hx > 1e-12, hx, 1.0), 0.0)
        v = np.stack([lam * x, ratio * h(lam * x)], -1)
        v[0], v[-1] = p, q
        keep = np.ones(len(v), bool)
        keep[1:] = np.linalg.norm(np.diff(v, axis=0), axis=1) > 1e-12
        keep[-1] = True
        cv = DiscreteCurve(surface, v[keep] if keep.sum() >= 8 else v, closed=False)
        out.append(cv.replace(constant_speed_points(cv, np.linspace(0, 1, samples))))
    out[0], out[-1] = right, left
    return Sweepout(out, taus, {"init": "peanut foliation"})



def touching_disks(surface=None, a=0.5, b=0.5, n=256):
    """Figure-eight of two chart circles tangent externally at the origin.

    The right circle (centre ``(a, 0)``) is traversed counter-clockwise and
    the left one (centre ``(-b, 0)``) clockwise, both starting at the origin
    heading down, so the curve passes smoothly through the contact twice.
    """
    surface = plane() if surface is None else surface
    u = 2 * np.pi * np.arange(n) / n
    right = np.stack([a * (1 - np.cos(u)), -a * np.sin(u)], -1)
    left = np.stack([-b * (1 - np.cos(u)), -b * np.sin(u)], -1)
    return DiscreteCurve(surface, np.vstack([right, left]), corners=(0, n))


def touching_pencil_family(surface=None, a=0.5, b=0.5, slices=16, samples=129):
    """Loops at the contact of :func:`touching_disks` sweeping the exterior.

    Slice ``tau`` is the chart circle through the origin tangent to the
    y-axis with signed curvature ``k = (1 - tau)/a - tau/b``; ``k = 0`` (the
    line through the chart pole) is skipped by nudging to the neighbouring
    parameter.
    """
    from .minmax import Sweepout
    from .shortening import constant_speed_points
    surface = plane() if surface is None else surface
    taus = np.linspace(0.0, 1.0, slices)
    u = 2 * np.pi * np.linspace(0.0, 1.0, 4 * samples)
    out = []
    for tau in taus:
        k = (1 - tau) / a - tau / b
        if abs(k) < 1e-3:
            k = math.copysign(1e-3, k if k != 0 else 1.0)
        v = np.stack([(1 - np.cos(u)) / k, -np.sin(u) / abs(k)], -1)
        v[0] = v[-1] = 0.0
        cv = DiscreteCurve(surface, v, closed=False)
        out.append(cv.replace(constant_speed_points(cv, np.linspace(0, 1, samples))))
    return Sweepout(out, taus, {"init": "tangent pencil"})
