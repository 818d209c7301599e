"""Discrete curves and regions on charted surfaces, the A^c functional and its variations.

Conventions
-----------
* Vertices are stored in *lifted* chart coordinates: consecutive vertices are
  close in the chart even when the curve winds around a torus.  A closed curve
  returns to ``vertices[0] + shift`` where ``shift`` is a deck translation.
* The *left normal* of a traversal is the tangent rotated by +90 degrees in the
  metric.  ``left curvature`` is the geodesic curvature measured against it, so
  a counter-clockwise flat circle of radius R has left curvature ``1/R``.
* A :class:`Region` is the set of points whose winding number about the
  boundary is odd (or even, when its ``complement`` flag is set).  Curvature
  *with respect to a region* is positive when the boundary bends towards it.
* The variation normal ``nu`` of a closed curve is its right normal.  For a
  counter-clockwise simple boundary this is the outward normal of the region.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry as geo
from ._polygon import (lattice_translates, periodic_winding, point_polyline_distance,
                       segment_crossings)
from .errors import (AmbiguousSide, AngleDegenerate, DegenerateVertex, MultipleNodes,
                     NodeInSupport, WrongFamily)

__all__ = [
    "DiscreteCurve", "Region", "NodeData", "PerturbationFamily", "LiftVerdict", "Contact",
    "length", "segment_lengths", "energy", "area", "ac_functional", "geodesic_curvature",
    "turning_angles", "first_variation", "second_variation", "detect_node", "split_at_node",
    "embedded_lift_check", "lift_contact", "self_contacts", "is_embedded", "resample",
    "spectral_derivatives", "gauss_bonnet_defect", "region_curvature",
]

MIN_VERTICES = 8
GL_RADIAL = np.polynomial.legendre.leggauss(32)
GL_SEGMENT = np.polynomial.legendre.leggauss(3)


# --------------------------------------------------------------------------
# Curves
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Ordered vertex list on a chart; closed, or pinned at its first and last vertex.

    ``corners`` lists vertex indices where the curve is known to be only
    piecewise smooth; spectral formulas are avoided on such curves.
    """

    surface: object
    vertices: np.ndarray
    closed: bool = True
    shift: np.ndarray | None = None
    corners: tuple = ()

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must have shape (n, 2)")
        if len(v) < MIN_VERTICES:
            raise ValueError(f"a discrete curve needs at least {MIN_VERTICES} vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        sh = np.zeros(2) if self.shift is None else np.array(self.shift, dtype=float)
        if np.any(sh != 0):
            if not self.closed:
                raise ValueError("only closed curves carry a deck translation")
            P = np.asarray(self.surface.periods).reshape(-1, 2)
            coef = np.linalg.lstsq(P.T, sh, rcond=None)[0] if len(P) else np.zeros(0)
            if len(P) == 0 or np.abs(coef - np.rint(coef)).max() > 1e-9 \
                    or np.abs(np.rint(coef) @ P - sh).max() > 1e-9:
                raise ValueError("shift must be a deck translation of the chart")
        sh.setflags(write=False)
        object.__setattr__(self, "shift", sh)
        object.__setattr__(self, "corners", tuple(sorted(int(c) for c in self.corners)))

    @property
    def n(self):
        return len(self.vertices)

    @property
    def pinned(self):
        return not self.closed

    @property
    def endpoints(self):
        return (self.vertices[0], self.vertices[-1]) if self.pinned else None

    @property
    def smooth(self):
        return self.closed and not self.corners

    def polyline(self):
        """Vertices followed by the closing vertex (closed curves)."""
        if self.closed:
            return np.vstack([self.vertices, self.vertices[0] + self.shift])
        return self.vertices

    def replace(self, vertices, **kw):
        args = dict(surface=self.surface, closed=self.closed, shift=self.shift,
                    corners=self.corners)
        args.update(kw)
        return DiscreteCurve(vertices=vertices, **args)

    def reversed(self):
        if self.closed:
            v = np.vstack([self.vertices[:1], (self.vertices[1:] - self.shift)[::-1]])
            corners = tuple(sorted((-c) % self.n for c in self.corners))
            return self.replace(v, shift=-self.shift, corners=corners)
        return self.replace(self.vertices[::-1], corners=tuple(self.n - 1 - c for c in self.corners))

    def with_corner(self, *idx):
        return self.replace(self.vertices, corners=tuple(self.corners) + idx)


def _neighbours(curve):
    """Previous and next vertex of every vertex (lifted); ends repeat for pinned curves."""
    v = curve.vertices
    if curve.closed:
        prev = np.vstack([v[-1:] - curve.shift, v[:-1]])
        nxt = np.vstack([v[1:], v[:1] + curve.shift])
    else:
        prev = np.vstack([v[:1], v[:-1]])
        nxt = np.vstack([v[1:], v[-1:]])
    return prev, nxt


def spectral_derivatives(curve):
    """First and second derivatives in a uniform parameter ``t in [0, 1)`` (closed curves)."""
    v = curve.vertices
    n = len(v)
    k = np.arange(n)[:, None] / n
    P = np.fft.fft(v - k * curve.shift, axis=0)
    w = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)[:, None]
    w1 = w.copy()
    if n % 2 == 0:
        w1[n // 2] = 0.0
    d1 = np.real(np.fft.ifft(w1 * P, axis=0)) + curve.shift
    d2 = np.real(np.fft.ifft(w * w * P, axis=0))
    return d1, d2


def segment_lengths(curve, method="chord"):
    """Metric length of every segment (closing segment included for closed curves).

    ``chord`` uses the midpoint metric, ``geodesic`` exact geodesic distances.
    """
    P = curve.polyline()
    a, b = P[:-1], P[1:]
    surf = curve.surface
    if method == "geodesic" or isinstance(surf, geo.FlatTorus):
        return geo.distance_batch(surf, a, b)
    mid = 0.5 * (a + b)
    return surf.norm(mid, b - a)


def _speed(curve, d1=None):
    if d1 is None:
        d1, _ = spectral_derivatives(curve)
    return curve.surface.norm(curve.vertices, d1)


def length(curve, method="auto"):
    """Metric length of a discrete curve.

    ``auto`` integrates the Fourier interpolant (trapezoid rule on the spectral
    speed) for smooth closed curves and sums geodesic segment lengths otherwise.
    ``chord`` and ``geodesic`` force the segment sums.
    """
    if method == "auto":
        method = "spectral" if curve.smooth else "geodesic"
    if method == "spectral":
        if not curve.smooth:
            raise ValueError("spectral length needs a smooth closed curve")
        return float(np.mean(_speed(curve)))
    return float(np.sum(segment_lengths(curve, method)))


def energy(curve, method="geodesic"):
    """Discrete Dirichlet energy ``m * sum |segment|^2`` over ``m`` segments (parameter in [0, 1])."""
    seg = segment_lengths(curve, method)
    return float(len(seg) * np.sum(seg**2))


def resample(curve, n=None, iters=30):
    """Spectrally re-interpolate a smooth closed curve at uniform arclength."""
    if not curve.smooth:
        raise ValueError("spectral resampling needs a smooth closed curve")
    n_in = curve.n
    n = n_in if n is None else int(n)
    v = curve.vertices
    kk = np.arange(n_in)[:, None] / n_in
    C = np.fft.fft(v - kk * curve.shift, axis=0) / n_in
    freq = np.fft.fftfreq(n_in, 1.0 / n_in)
    speed = _speed(curve)
    S = np.fft.fft(speed) / n_in
    total = float(np.real(S[0]))
    nz = freq != 0
    if n_in % 2 == 0:
        nz &= np.abs(freq) != n_in // 2

    def arclen(t):
        e = np.exp(2j * np.pi * np.outer(t, freq[nz]))
        return total * t + np.real((e - 1.0) @ (S[nz] / (2j * np.pi * freq[nz])))

    def spd(t):
        e = np.exp(2j * np.pi * np.outer(t, freq))
        return np.real(e @ S)

    targets = total * np.arange(n) / n
    s_nodes = arclen(np.arange(n_in) / n_in)
    t = np.interp(targets, np.append(s_nodes, total), np.arange(n_in + 1) / n_in)
    for _ in range(iters):
        dt = (arclen(t) - targets) / spd(t)
        t = t - dt
        if np.max(np.abs(dt)) < 1e-15:
            break
    e = np.exp(2j * np.pi * np.outer(t, freq))
    out = np.real(e @ C) + t[:, None] * curve.shift
    return curve.replace(out)


# --------------------------------------------------------------------------
# Curvature
# --------------------------------------------------------------------------

def _left_curvature_formula(surface, x, d1, d2):
    G = surface.christoffel(x)
    acc = d2 + np.einsum("...kij,...i,...j->...k", G, d1, d1)
    g = surface.metric(x)
    dens = np.sqrt(g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2)
    cross = d1[..., 0] * acc[..., 1] - d1[..., 1] * acc[..., 0]
    sp = np.sqrt(np.einsum("...i,...ij,...j->...", d1, g, d1))
    return dens * cross / sp**3


def _metric_angle(surface, x, a, b):
    """Signed metric angle from tangent vector ``a`` to ``b`` at ``x``."""
    g = surface.metric(x)
    dens = np.sqrt(g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2)
    cross = dens * (a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0])
    dot = np.einsum("...i,...ij,...j->...", a, g, b)
    return np.arctan2(cross, dot)


def turning_angles(curve):
    """Signed metric turning angle between the geodesic segments meeting at each vertex.

    Pinned curves get ``nan`` at the two endpoints.
    """
    surf = curve.surface
    x = curve.vertices
    prev, nxt = _neighbours(curve)
    v_out = geo.log_batch(surf, x, nxt)
    v_in = -geo.log_batch(surf, x, prev)
    bad = (surf.norm(x, v_out) == 0) | (surf.norm(x, v_in) == 0)
    ang = _metric_angle(surf, x, v_in, v_out)
    if curve.pinned:
        bad[[0, -1]] = False
        ang[[0, -1]] = np.nan
    if np.any(bad):
        raise DegenerateVertex("repeated vertex: turning angle undefined")
    return ang


def geodesic_curvature(curve, region=None, method="auto"):
    """Per-vertex signed geodesic curvature.

    Without ``region`` the curvature is measured against the left normal; with a
    region it is positive where the curve bends towards the region.

    Methods: ``spectral`` (Fourier derivatives, smooth closed curves),
    ``stencil`` (non-uniform three-point derivatives) and ``turning`` (geodesic
    turning angle divided by the mean adjacent segment length).  ``auto`` picks
    ``spectral`` when possible and ``turning`` otherwise.
    """
    if method == "auto":
        method = "spectral" if curve.smooth else "turning"
    surf = curve.surface
    x = curve.vertices
    if method == "spectral":
        d1, d2 = spectral_derivatives(curve)
        kappa = _left_curvature_formula(surf, x, d1, d2)
    elif method == "stencil":
        prev, nxt = _neighbours(curve)
        hm = surf.norm(0.5 * (x + prev), x - prev)
        hp = surf.norm(0.5 * (x + nxt), nxt - x)
        if np.any(hm[1:-1] <= 0) or np.any(hp[1:-1] <= 0) or (curve.closed and np.any(hm * hp <= 0)):
            raise DegenerateVertex("repeated vertex: stencil undefined")
        hm = np.where(hm > 0, hm, 1.0)
        hp = np.where(hp > 0, hp, 1.0)
        den = (hm * hp * (hm + hp))[:, None]
        d1 = (hm[:, None] ** 2 * (nxt - x) + hp[:, None] ** 2 * (x - prev)) / den
        d2 = 2 * (hm[:, None] * (nxt - x) - hp[:, None] * (x - prev)) / den
        kappa = _left_curvature_formula(surf, x, d1, d2)
        if curve.pinned:
            kappa[[0, -1]] = np.nan
    elif method == "turning":
        ang = turning_angles(curve)
        seg = segment_lengths(curve, "geodesic")
        if curve.closed:
            mean = 0.5 * (seg + np.roll(seg, 1))
        else:
            mean = np.concatenate([[np.nan], 0.5 * (seg[1:] + seg[:-1]), [np.nan]])
        kappa = ang / mean
    else:
        raise ValueError(f"unknown curvature method {method!r}")
    if region is not None:
        kappa = kappa * region.side_signs(curve)
    return kappa


def region_curvature(region, method="auto"):
    """Curvature of every boundary curve with respect to the region."""
    return [geodesic_curvature(cv, region, method) for cv in region.boundary]


def _tangents(curve):
    """Unit-free tangent vectors at vertices (spectral for smooth curves)."""
    if curve.smooth:
        return spectral_derivatives(curve)[0]
    prev, nxt = _neighbours(curve)
    return nxt - prev


def _right_normals(curve):
    x = curve.vertices
    return -curve.surface.left_normal(x, _tangents(curve))


# --------------------------------------------------------------------------
# Self-intersections and nodes
# --------------------------------------------------------------------------

class Config(str, enum.Enum):
    CONFIG1 = "Config1"
    CONFIG2 = "Config2"


@dataclass(frozen=True)
class NodeData:
    """A single self-intersection of a closed curve.

    ``t0 < t1`` are vertex parameters (index plus fraction); ``translate`` is the
    deck translation with ``x(t1) = x(t0) + translate``.  ``alpha`` is the metric
    angle of the sectors belonging to the region at the node.
    """

    point: np.ndarray
    t0: float
    t1: float
    alpha: float
    config: Config
    kind: str = "transverse"
    tangents: tuple = ()
    translate: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        if not (0.0 < self.alpha <= math.pi + 1e-12):
            raise AngleDegenerate(f"node angle {self.alpha} outside (0, pi]")


@dataclass(frozen=True)
class Contact:
    point: np.ndarray
    i: int
    j: int
    u: float
    v: float
    translate: np.ndarray
    kind: str          # "transverse" or "tangent"


def _rays_interleave(a_in, a_out, b_in, b_out):
    """True if the pair of rays ``b`` separates the pair ``a`` (transverse crossing)."""
    ang = [math.atan2(r[1], r[0]) for r in (a_in, a_out, b_in, b_out)]
    lo = ang[0]
    span = (ang[1] - lo) % (2 * math.pi)

    def inside(t):
        return 0 < (t - lo) % (2 * math.pi) < span

    return inside(ang[2]) != inside(ang[3])


def _rays_at(P, i, u, closed):
    """Incoming and outgoing chord directions at parameter ``i + u`` of polyline ``P``."""
    m = len(P) - 1
    if u > 1e-9:
        d = P[i + 1] - P[i]
        return -d, d
    if i == 0:
        prev = P[m - 1] - (P[m] - P[0]) if closed else P[0]
    else:
        prev = P[i - 1]
    return prev - P[i], P[i + 1] - P[i]


def self_contacts(curve, contact_tol=None):
    """All self-intersections and tangential self-contacts, including lattice translates."""
    P = curve.polyline()
    m = len(P) - 1
    scale = float(np.sum(np.linalg.norm(np.diff(P, axis=0), axis=1)))
    tol = 1e-9 * max(scale, 1e-300) if contact_tol is None else contact_tol
    out = []

    def adjacent(i, j):
        bad = j <= i + 1
        if curve.closed:
            bad |= (i == 0) & (j == m - 1)
        return bad

    translates = [np.zeros(2)]
    if curve.closed and len(np.asarray(curve.surface.periods)):
        ks = lattice_translates(curve.surface.periods, 2)[1:]
        seen = []
        for k in ks:
            if not any(np.allclose(k, -s) for s in seen):
                seen.append(k)
        translates += seen
    lo, hi = P.min(0), P.max(0)
    for k in translates:
        same = not np.any(k)
        if not same and (np.any(lo + k > hi + tol) or np.any(hi + k < lo - tol)):
            continue
        ii, jj, uu, vv = segment_crossings(P, P + k, adjacent if same else None)
        for i, j, u, v in zip(ii, jj, uu, vv):
            X = P[i] + u * (P[i + 1] - P[i])
            a_in, a_out = _rays_at(P, i, u, curve.closed)
            b_in, b_out = _rays_at(P + k, j, v, curve.closed)
            kind = "transverse"
            if (u <= 1e-9 or v <= 1e-9) and not _rays_interleave(a_in, a_out, b_in, b_out):
                kind = "tangent"
            out.append(Contact(X, int(i), int(j), float(u), float(v), np.array(k), kind))
        # near-contacts between vertices that do not produce a crossing
        V = P[:-1]
        W = V + k
        D = np.linalg.norm(V[:, None] - W[None], axis=-1)
        I, J = np.nonzero(D < tol)
        for i, j in zip(I, J):
            if same:
                gap = abs(i - j) if not curve.closed else min(abs(i - j), m - abs(i - j))
                if gap <= 2 or i > j:
                    continue
            if any(c.i == i and c.j == j and np.allclose(c.translate, k) for c in out):
                continue
            out.append(Contact(V[i], int(i), int(j), 0.0, 0.0, np.array(k), "tangent"))
    # cluster contacts that are a few segments apart: a tangential touch of two
    # discretised arcs can register as a vertex contact plus nearby crossings
    def near(a, b, w=3):
        di = abs(a - b)
        return min(di, m - di) <= w if curve.closed else di <= w

    clusters = []
    for c in out:
        for cl in clusters:
            d = cl[0]
            if np.allclose(c.translate, d.translate) and near(c.i, d.i) and near(c.j, d.j):
                cl.append(c)
                break
        else:
            clusters.append([c])
    merged = []
    for cl in clusters:
        tang = [c for c in cl if c.kind == "tangent"]
        if tang:
            merged.append(tang[0])
        elif len(cl) > 1:
            c = cl[0]
            merged.append(Contact(c.point, c.i, c.j, c.u, c.v, c.translate, "tangent"))
        else:
            merged.append(cl[0])
    return merged


def is_embedded(curve, contact_tol=None):
    return len(self_contacts(curve, contact_tol)) == 0


def _lagrange_tangent(P, i, u, closed):
    """Derivative (per unit index) of the cubic through vertices i-1..i+2 at ``i + u``."""
    m = len(P) - 1

    def pt(j):
        if closed:
            q, r = divmod(j, m)
            return P[r] + q * (P[m] - P[0])
        return P[min(max(j, 0), m)]

    nodes = np.array([-1.0, 0.0, 1.0, 2.0])
    pts = np.array([pt(i + int(a)) for a in nodes])
    w = np.zeros(4)
    for a in range(4):
        others = [b for b in range(4) if b != a]
        den = np.prod([nodes[a] - nodes[b] for b in others])
        s = 0.0
        for b in others:
            rest = [e for e in others if e != b]
            s += np.prod([u - nodes[e] for e in rest])
        w[a] = s / den
    return w @ pts


def _branch_tangent(P, i, u):
    """Tangent of a closed polyline at ``i + u``.

    At a vertex the one-sided second-order differences are averaged, which
    stays accurate when the curvature jumps there.
    """
    if u > 1e-9:
        return _lagrange_tangent(P, i, u, True)
    m = len(P) - 1

    def pt(j):
        q, r = divmod(j, m)
        return P[r] + q * (P[m] - P[0])

    fwd = -3 * pt(i) + 4 * pt(i + 1) - pt(i + 2)
    bwd = 3 * pt(i) - 4 * pt(i - 1) + pt(i - 2)
    return 0.25 * (fwd + bwd)


def _vertex_turn(P, i):
    """Euclidean turning angle of the closed polyline ``P`` at vertex ``i``."""
    m = len(P) - 1
    a = P[i % m] - P[(i - 1) % m]
    b = P[(i + 1) % m] - P[i % m]
    return abs(math.atan2(a[0] * b[1] - a[1] * b[0], a @ b))


def _orthonormal_frame(surface, x):
    g = surface.metric(x)
    L = np.linalg.cholesky(g)          # g = L L^T ; y = L^T v is orthonormal
    return L.T, np.linalg.inv(L.T)


def _membership(region_like, pts):
    curves, complement = region_like
    total = np.zeros(len(pts), dtype=int)
    for cv in curves:
        total += periodic_winding(pts, cv.vertices, cv.surface.periods)
    return (total % 2 == 1) ^ complement


def detect_node(curve, region=None, contact_tol=None):
    """Locate the (single) node of a closed curve and classify it.

    Returns ``None`` for embedded curves.  The region defaults to the odd-winding
    set of ``curve``.  Tangential contacts are reported with ``alpha = pi`` and
    classified as Configuration 2.
    """
    if not curve.closed:
        raise ValueError("nodes are defined for closed curves")
    contacts = self_contacts(curve, contact_tol)
    if not contacts:
        return None
    if len(contacts) > 1:
        raise MultipleNodes(f"{len(contacts)} self-contacts found")
    c = contacts[0]
    surf = curve.surface
    P = curve.polyline()
    t0, t1 = c.i + c.u, c.j + c.v
    X = c.point
    k = c.translate
    T0 = _branch_tangent(P, c.i, c.u)
    T1 = _branch_tangent(P, c.j, c.v)
    A, Ainv = _orthonormal_frame(surf, X)
    u0, u1 = A @ T0, A @ T1
    sin01 = abs(u0[0] * u1[1] - u0[1] * u1[0]) / (np.linalg.norm(u0) * np.linalg.norm(u1))
    resolution = 1e-6
    if c.u <= 1e-9 and c.v <= 1e-9:
        # below the polygon's own turning angle the branches are unresolved
        turns = [_vertex_turn(P, i + d) for i in (c.i, c.j) for d in (-1, 1)]
        resolution = max(resolution, 0.5 * min(turns))
    if c.kind == "tangent" or sin01 < resolution:
        # parallel branches, whether or not they swap sides
        return NodeData(X, t0, t1, math.pi, Config.CONFIG2, "tangent", (T0, T1), -k)
    members = (curve,), False
    if region is not None:
        members = region.boundary, region.complement
    rays = [A @ r for r in (T0, T1, -T0, -T1)]
    rays = [r / np.linalg.norm(r) for r in rays]
    order = np.argsort([math.atan2(r[1], r[0]) for r in rays])
    rays = [rays[o] for o in order]
    seg = np.linalg.norm(np.diff(P, axis=0), axis=1)
    delta = 0.25 * float(np.min(seg[max(c.i - 2, 0): c.i + 3]))
    tests, angles = [], []
    for a in range(4):
        r1, r2 = rays[a], rays[(a + 1) % 4]
        ang = math.atan2(r1[0] * r2[1] - r1[1] * r2[0], r1 @ r2) % (2 * math.pi)
        bis = r1 + r2
        if np.linalg.norm(bis) < 1e-12:
            bis = np.array([-r1[1], r1[0]])
        bis = bis / np.linalg.norm(bis)
        scale = delta / max(np.sin(ang / 2), 1e-3)
        tests.append(X + scale * 0.5 * (Ainv @ bis))
        angles.append(ang)
    tests = np.array(tests)
    inside = _membership(members, tests)
    if inside.sum() != 2 or inside[0] == inside[1]:
        raise AmbiguousSide("region sectors at the node are not an opposite pair")
    sectors = np.nonzero(inside)[0]
    alpha = float(angles[sectors[0]])
    wind = np.zeros(2, dtype=int)
    for cv in members[0]:
        wind += periodic_winding(tests[sectors], cv.vertices, cv.surface.periods)
    config = Config.CONFIG1 if wind[0] != wind[1] else Config.CONFIG2
    return NodeData(X, t0, t1, alpha, config, "transverse", (T0, T1), -k)


def split_at_node(curve, node):
    """Split a closed curve at its node into the loops ``(t0 -> t1, t1 -> t0)``.

    Both loops get a corner at the node.  For a tangential contact the node
    vertex is taken as-is.
    """
    v = curve.vertices
    n = curve.n
    P = curve.polyline()

    def point(t):
        i = int(math.floor(t))
        u = t - i
        return P[i] + u * (P[i + 1] - P[i]) if u > 1e-12 else P[i]

    t0, t1 = node.t0, node.t1
    x0, x1 = point(t0), point(t1)
    i0, i1 = int(math.floor(t0)) + 1, int(math.floor(t1)) + 1
    if t0 - math.floor(t0) <= 1e-12:
        i0 = int(round(t0)) + 1
    if t1 - math.floor(t1) <= 1e-12:
        i1 = int(round(t1)) + 1
    loop_a = np.vstack([x0[None], v[i0:i1] if i1 <= n else v[i0:n]])
    shift_a = x1 - x0
    tail = np.vstack([v[i1:n], v[: i0 - 1] + curve.shift]) if i1 <= n else v[: i0 - 1] + curve.shift
    loop_b = np.vstack([x1[None], tail]) if len(tail) else x1[None]
    shift_b = (x0 + curve.shift) - x1
    # drop node duplicates produced when the node sits on a vertex
    if np.allclose(loop_a[1], loop_a[0]):
        loop_a = np.vstack([loop_a[:1], loop_a[2:]])
    if len(loop_b) > 1 and np.allclose(loop_b[1], loop_b[0]):
        loop_b = np.vstack([loop_b[:1], loop_b[2:]])
    if np.allclose(loop_a[-1], loop_a[0] + shift_a):
        loop_a = loop_a[:-1]
    if np.allclose(loop_b[-1], loop_b[0] + shift_b):
        loop_b = loop_b[:-1]
    ka = np.rint(_lattice_coeffs(curve.surface, shift_a)) @ _periods(curve.surface) if np.any(np.abs(shift_a) > 1e-9) else np.zeros(2)
    kb = np.rint(_lattice_coeffs(curve.surface, shift_b)) @ _periods(curve.surface) if np.any(np.abs(shift_b) > 1e-9) else np.zeros(2)
    return (curve.replace(loop_a, shift=ka, corners=(0,)),
            curve.replace(loop_b, shift=kb, corners=(0,)))


def _periods(surface):
    return np.asarray(surface.periods, dtype=float).reshape(-1, 2)


def _lattice_coeffs(surface, vec):
    P = _periods(surface)
    if len(P) == 0:
        return np.zeros(0)
    return np.linalg.lstsq(P.T, vec, rcond=None)[0]


# --------------------------------------------------------------------------
# Regions
# --------------------------------------------------------------------------

def _fan_integral(surface, curve, f, center=None):
    """Winding-weighted integral of ``f`` over the plane, from one closed boundary curve.

    Uses the cone from ``center`` over the curve, Gauss-Legendre in the radial
    direction and either the spectral trapezoid rule (smooth curves) or three
    Gauss points per straight segment.
    """
    if curve.smooth:
        x = curve.vertices
        dx = spectral_derivatives(curve)[0] / curve.n
    else:
        P = curve.polyline()
        a, d = P[:-1], P[1:] - P[:-1]
        tau = 0.5 * (GL_SEGMENT[0] + 1.0)
        wt = 0.5 * GL_SEGMENT[1]
        x = (a[:, None, :] + tau[None, :, None] * d[:, None, :]).reshape(-1, 2)
        dx = (wt[None, :, None] * d[:, None, :]).reshape(-1, 2)
    o = np.mean(curve.vertices, axis=0) if center is None else center
    r = x - o
    cross = r[:, 0] * dx[:, 1] - r[:, 1] * dx[:, 0]
    s = 0.5 * (GL_RADIAL[0] + 1.0)
    ws = 0.5 * GL_RADIAL[1]
    pts = o + s[:, None, None] * r[None]
    vals = f(pts)
    return float(np.einsum("s,sq,q->", ws * s, vals, cross))


def _signed_area(curve):
    surf = curve.surface
    if isinstance(surf, geo.FlatTorus):
        P = curve.polyline()
        if curve.smooth:
            d1 = spectral_derivatives(curve)[0]
            x = curve.vertices
            return float(np.mean(x[:, 0] * d1[:, 1] - x[:, 1] * d1[:, 0]) / 2)
        x, y = P[:-1, 0], P[:-1, 1]
        xn, yn = P[1:, 0], P[1:, 1]
        return 0.5 * float(np.sum(x * yn - xn * y))
    return _fan_integral(surf, curve, surf.area_density)


class Region:
    """Region bounded by closed curves: the odd-winding set, or its complement.

    Parameters
    ----------
    boundary : DiscreteCurve or sequence of DiscreteCurve
    witness : array_like, optional
        A point of the region; it fixes the ``complement`` flag.
    complement : bool, optional
        Explicit flag, used when no witness is given (default ``False``).
    """

    def __init__(self, boundary=(), witness=None, complement=None, *, surface=None, kind="curves"):
        if isinstance(boundary, DiscreteCurve):
            boundary = (boundary,)
        self.boundary = tuple(boundary)
        for cv in self.boundary:
            if not cv.closed:
                raise ValueError("region boundaries must be closed curves")
        self.surface = surface if surface is not None else (self.boundary[0].surface if self.boundary else None)
        self.kind = kind
        self.witness = None if witness is None else np.asarray(witness, dtype=float)
        if witness is not None:
            scale = max(length(cv, "chord") for cv in self.boundary)
            for cv in self.boundary:
                for k in lattice_translates(cv.surface.periods, 2):
                    if point_polyline_distance(self.witness + k, cv.polyline())[0] < 1e-9 * scale:
                        raise AmbiguousSide("witness lies on the boundary")
            complement = not bool(_membership((self.boundary, False), self.witness[None])[0])
        self.complement = bool(complement) if complement is not None else False
        self._area = None

    # constructors -----------------------------------------------------
    @classmethod
    def empty(cls, surface):
        return cls((), surface=surface, kind="empty")

    @classmethod
    def full(cls, surface):
        return cls((), surface=surface, kind="full")

    def with_boundary(self, boundary):
        return Region(boundary, complement=self.complement, surface=self.surface)

    # queries ----------------------------------------------------------
    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "empty":
            return np.zeros(len(pts), bool)
        if self.kind == "full":
            return np.ones(len(pts), bool)
        return _membership((self.boundary, self.complement), pts)

    def loops(self):
        """Simple loops of the boundary (curves split at their node, if any)."""
        out = []
        for cv in self.boundary:
            node = detect_node(cv, self)
            if node is None:
                out.append((cv, None))
            else:
                a, b = split_at_node(cv, node)
                out.append((a, node))
                out.append((b, node))
        return out

    def _loop_signs_and_areas(self, density=None):
        loops = [lp for lp, _ in self.loops()]
        S = []
        for lp in loops:
            if density is None:
                S.append(_signed_area(lp))
            else:
                S.append(_fan_integral(lp.surface, lp, density))
        depth = []
        for j, lp in enumerate(loops):
            d = 0
            for i, other in enumerate(loops):
                if i == j:
                    continue
                dist = point_polyline_distance(lp.vertices, other.polyline())
                rep = lp.vertices[np.argmax(dist)]
                if periodic_winding(rep[None], other.vertices, other.surface.periods)[0] != 0:
                    d += 1
            depth.append(d)
        return loops, np.array(S), np.array(depth)

    def area(self):
        if self._area is None:
            self._area = self._integrate(None)
        return self._area

    def integral_of_curvature(self):
        """Integral of Gaussian curvature over the region."""
        surf = self.surface
        return self._integrate(lambda x: surf.gauss_curvature(x) * surf.area_density(x),
                               total=2 * math.pi * _euler_char(surf))

    def _integrate(self, density, total=None):
        if self.kind == "empty":
            return 0.0
        if total is None:
            total = self.surface.total_area
        if self.kind == "full":
            return float(total)
        _, S, depth = self._loop_signs_and_areas(density)
        if density is None:
            odd = float(np.sum((-1.0) ** depth * np.abs(S)))
        else:
            _, SA, _ = self._loop_signs_and_areas(None)
            odd = float(np.sum((-1.0) ** depth * np.sign(SA) * S))
        return float(total - odd) if self.complement else odd

    def side_signs(self, curve):
        """+1 at vertices where the region lies to the left of ``curve``, else -1."""
        if curve not in self.boundary:
            # a curve sharing vertices with a boundary curve (e.g. a resampled copy)
            return self._side_signs_simple(curve)
        node = detect_node(curve, self)
        if node is None:
            return self._side_signs_simple(curve)
        signs = np.empty(curve.n)
        idx = np.arange(curve.n)
        in_a = (idx > node.t0) & (idx <= node.t1)
        a, b = split_at_node(curve, node)
        sa, sb = self._side_signs_simple(a)[0], self._side_signs_simple(b)[0]
        signs[in_a] = sa
        signs[~in_a] = sb
        return signs

    def _side_signs_simple(self, curve):
        x = curve.vertices
        nrm = curve.surface.left_normal(x, _tangents(curve))
        seg = np.linalg.norm(np.diff(curve.polyline(), axis=0), axis=1)
        j = curve.n // 2
        delta = 0.25 * float(np.min(seg[seg > 0])) if np.any(seg > 0) else 1e-9
        p = x[j] + delta * nrm[j] / np.linalg.norm(nrm[j])
        inside = self.contains(p[None])[0]
        return np.full(curve.n, 1.0 if inside else -1.0)

    def boundary_length(self):
        return float(sum(length(cv) for cv in self.boundary))


def _euler_char(surface):
    return 0 if len(_periods(surface)) == 2 else 2


def area(region):
    """Metric area of a region."""
    return region.area()


def ac_functional(region, c):
    """``A^c = length(boundary) - c * area``."""
    if c <= 0:
        raise ValueError("c must be positive")
    if region.kind == "empty":
        return 0.0
    return region.boundary_length() - c * region.area()


def gauss_bonnet_defect(region):
    """``int K dA + sum of turning angles - 2 pi chi`` for a region bounded by one simple curve."""
    if len(region.boundary) != 1:
        raise ValueError("one boundary curve expected")
    cv = region.boundary[0]
    turn = float(np.sum(turning_angles(cv) * region.side_signs(cv)))
    chi = _euler_char(region.surface) - 1 if region.complement else 1
    return region.integral_of_curvature() + turn - 2 * math.pi * chi


# --------------------------------------------------------------------------
# Variations
# --------------------------------------------------------------------------

def _interp_vertex_values(values, t, closed=True):
    n = len(values)
    i = int(math.floor(t))
    u = t - i
    a = values[i % n]
    b = values[(i + 1) % n] if closed else values[min(i + 1, n - 1)]
    return (1 - u) * a + u * b


@dataclass(frozen=True, eq=False)
class PerturbationFamily:
    """Normal variation ``gamma_s(t) = exp(s phi(t) nu(t))`` of a region boundary.

    ``nu`` is the right normal of the (single) boundary curve.
    """

    region: Region
    phi: np.ndarray
    node: NodeData | None = None

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if len(self.region.boundary) != 1 or phi.shape != (self.curve.n,):
            raise ValueError("one boundary curve and one phi value per vertex expected")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi must be finite")
        object.__setattr__(self, "phi", phi)

    @property
    def curve(self):
        return self.region.boundary[0]

    def normal(self):
        nu = _right_normals(self.curve)
        return nu

    def curve_at(self, s, steps=8, return_velocity=False):
        cv = self.curve
        v = s * self.phi[:, None] * self.normal()
        x, vel = geo.exp_batch(cv.surface, cv.vertices, v, steps=steps, return_velocity=True)
        out = cv.replace(x)
        return (out, vel) if return_velocity else out

    def region_at(self, s):
        return self.region.with_boundary(self.curve_at(s))

    def functional(self, s, c):
        if s == 0:
            return ac_functional(self.region, c)
        return ac_functional(self.region_at(s), c)

    def swept_area(self, s, signed=True, order=8):
        """Quadrature of the area swept by the normal sweep over ``[0, s]``.

        ``signed=False`` accumulates with multiplicity (absolute Jacobian).
        """
        cv = self.curve
        if not cv.smooth:
            raise ValueError("swept area quadrature needs a smooth closed curve")
        xs, ws = np.polynomial.legendre.leggauss(order)
        sig = 0.5 * s * (xs + 1)
        wts = 0.5 * s * ws
        total = 0.0
        for sg, w in zip(sig, wts):
            c_s, vel = self.curve_at(sg, return_velocity=True)
            dvel = vel / sg if sg != 0 else self.phi[:, None] * self.normal()
            dt = spectral_derivatives(c_s)[0]
            jac = dvel[:, 0] * dt[:, 1] - dvel[:, 1] * dt[:, 0]
            jac = jac * cv.surface.area_density(c_s.vertices)
            if not signed:
                jac = np.abs(jac)
            total += w * float(np.mean(jac))
        return total


def _arclength_weights(curve):
    """Per-vertex arclength weights (spectral for smooth curves)."""
    if curve.smooth:
        return _speed(curve) / curve.n
    seg = segment_lengths(curve, "geodesic")
    return 0.5 * (seg + np.roll(seg, 1))


def first_variation(family, c, s=0.0):
    """First derivative of ``length - c * mass`` along the family at parameter ``s``."""
    phi = family.phi
    if not np.any(phi):
        return 0.0
    node = family.node
    if node is not None:
        for t in (node.t0, node.t1):
            if abs(_interp_vertex_values(phi, t)) > 1e-12:
                raise NodeInSupport("test function does not vanish at the node")
    region = family.region if s == 0 else family.region_at(s)
    cv = region.boundary[0]
    kappa = geodesic_curvature(cv)
    sigma = region.side_signs(cv)
    return float(np.sum(phi * (kappa - sigma * c) * _arclength_weights(cv)))


def second_variation(curve, node, phi, c, method="auto"):
    """Second variation of ``length - c * mass`` at a curve of constant curvature ``c``.

    ``int (phi_s^2 - (K + c^2) phi^2) ds`` plus the node correction for
    Configuration 1 or 2.  ``spectral`` quadrature is used for smooth closed
    curves without a node, piecewise-linear finite elements otherwise.
    """
    phi = np.asarray(phi, dtype=float)
    surf = curve.surface
    if method == "auto":
        method = "spectral" if (curve.smooth and node is None) else "p1"
    if method == "spectral":
        n = curve.n
        speed = _speed(curve)
        ph = np.fft.fft(phi)
        w = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)
        if n % 2 == 0:
            w[n // 2] = 0
        dphi = np.real(np.fft.ifft(w * ph))
        K = surf.gauss_curvature(curve.vertices)
        integral = float(np.mean(dphi**2 / speed - (K + c * c) * phi**2 * speed))
    else:
        P = curve.polyline()
        seg = segment_lengths(curve, "geodesic")
        phin = np.append(phi, phi[0]) if curve.closed else phi
        a, b = phin[:-1], phin[1:]
        mid = 0.5 * (P[:-1] + P[1:])
        K = surf.gauss_curvature(mid)
        grad = np.sum((b - a) ** 2 / seg)
        mass = np.sum((K + c * c) * seg * (a * a + a * b + b * b) / 3.0)
        integral = float(grad - mass)
    if node is None:
        return integral
    p0 = _interp_vertex_values(phi, node.t0)
    p1 = _interp_vertex_values(phi, node.t1)
    alpha = node.alpha
    sa = math.sin(alpha)
    if node.config == Config.CONFIG1:
        if sa < 1e-8:
            raise AngleDegenerate("Configuration 1 requires alpha in (0, pi)")
        term = (p0 * p0 + p1 * p1) * math.cos(alpha) + 2 * p0 * p1
    else:
        if sa < 1e-8:
            # limit alpha -> pi exists only when (phi0 + phi1)^2 vanishes; it is then 0
            if abs(p0 + p1) > 1e-12:
                raise AngleDegenerate("alpha = pi limit requires phi(t0) + phi(t1) = 0")
            return integral
        term = (p0 * p0 + p1 * p1) * math.cos(alpha) - 2 * p0 * p1
    return integral - 2 * c / sa * term


# --------------------------------------------------------------------------
# Lifts on flat tori
# --------------------------------------------------------------------------

class LiftVerdict(str, enum.Enum):
    EMBEDDABLE = "Embeddable"
    NOT_EMBEDDABLE = "NotEmbeddable"


def embedded_lift_check(surface, c):
    """Does the circle of curvature ``c`` project to an embedded loop on a flat torus?

    It does iff its diameter ``2/c`` is shorter than every nonzero lattice
    vector, i.e. ``c * inj > 1``.  The comparison is exact on the binary values
    of the inputs.
    """
    if not isinstance(surface, geo.FlatTorus):
        raise WrongFamily("lift test is defined for flat tori")
    cf = Fraction(float(c))
    if cf <= 0:
        raise ValueError("c must be positive")
    a = [Fraction(float(t)) for t in surface.basis[0]]
    b = [Fraction(float(t)) for t in surface.basis[1]]

    def dot(p, q):
        return p[0] * q[0] + p[1] * q[1]

    if dot(a, a) > dot(b, b):
        a, b = b, a
    while True:  # exact Lagrange-Gauss reduction
        mu = dot(a, b) / dot(a, a)
        m = math.floor(mu + Fraction(1, 2))
        b = [b[0] - m * a[0], b[1] - m * a[1]]
        if dot(b, b) >= dot(a, a):
            break
        a, b = b, a
    shortest_sq = dot(a, a)
    ok = 4 < cf * cf * shortest_sq
    return LiftVerdict.EMBEDDABLE if ok else LiftVerdict.NOT_EMBEDDABLE


@dataclass(frozen=True)
class LiftContactReport:
    kind: str                 # "embedded", "touching" or "crossing"
    min_distance: float
    translate: np.ndarray


def lift_contact(curve, tol=1e-6):
    """Compare a closed lifted curve with its deck translates.

    Reports ``crossing`` for transverse intersections, ``touching`` when the
    curves come within ``tol`` without crossing, ``embedded`` otherwise.
    """
    P = curve.polyline()
    best, best_k = np.inf, np.zeros(2)
    kinds = set()
    for k in lattice_translates(curve.surface.periods, 2)[1:]:
        d = float(np.min(point_polyline_distance(P + k, P)))
        if d < best:
            best, best_k = d, k
        ii, jj, uu, vv = segment_crossings(P, P + k)
        for i, j, u, v in zip(ii, jj, uu, vv):
            a = _rays_at(P, i, u, True)
            b = _rays_at(P + k, j, v, True)
            if (u <= 1e-9 or v <= 1e-9) and not _rays_interleave(*a, *b):
                kinds.add("touching")
            else:
                kinds.add("crossing")
    if "crossing" in kinds:
        kind = "crossing"
    elif kinds or best < tol:
        kind = "touching"
    else:
        kind = "embedded"
    return LiftContactReport(kind, best, best_k)
