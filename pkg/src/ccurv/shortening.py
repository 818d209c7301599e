"""Curve evolution: the fixed-endpoint Birkhoff map, curve shortening flow,
corner rounding and a Newton solver for curves of prescribed curvature."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import geometry as geo
from ._polygon import shoelace
from .curve import (DiscreteCurve, NodeData, Region, geodesic_curvature, is_embedded, length,
                    resample, segment_lengths, spectral_derivatives)
from .errors import (CollapseDetected, EmbeddednessLost, GeodesicSubproblemFailure,
                     NoCollapse, NoConvergence, ScaleTooLarge, SegmentTooLong,
                     StabilityViolation)

__all__ = [
    "BirkhoffConfig", "FlowConfig", "FlowPath", "birkhoff_map", "constant_speed_points",
    "curve_distance", "geodesic_residual", "csf_step", "csf_path_to_point", "round_corner",
    "constant_curvature_arc", "solve_prescribed_curvature", "resample_polyline",
]


# --------------------------------------------------------------------------
# Piecewise-geodesic curves
# --------------------------------------------------------------------------

def _geodesic_fraction(surface, a, b, f):
    """Points at fractions ``f`` along the geodesics ``a[i] -> b[i]``."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    f = np.asarray(f, dtype=float)
    if isinstance(surface, geo.FlatTorus):
        return a + f[:, None] * (b - a)
    if geo._is_round_plane(surface):
        R = surface.profile.R
        A = surface._sphere_lift(a) / R
        B = surface._sphere_lift(b) / R
        om = np.arctan2(np.linalg.norm(np.cross(A, B), axis=-1), np.sum(A * B, -1))
        small = om < 1e-9
        so = np.where(small, 1.0, np.sin(om))
        wa = np.where(small, 1 - f, np.sin((1 - f) * om) / so)
        wb = np.where(small, f, np.sin(f * om) / so)
        Pt = wa[:, None] * A + wb[:, None] * B
        Pt = Pt / np.linalg.norm(Pt, axis=-1, keepdims=True)
        return surface._sphere_proj(R * Pt)
    v = geo.log_batch(surface, a, b)
    return geo.exp_batch(surface, a, f[:, None] * v, steps=8)


def constant_speed_points(curve, params):
    """Evaluate a pinned piecewise-geodesic curve at constant-speed parameters in [0, 1]."""
    seg = segment_lengths(curve, "geodesic")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    params = np.clip(np.asarray(params, dtype=float), 0.0, 1.0)
    if total == 0:
        return np.repeat(curve.vertices[:1], len(params), axis=0)
    s = params * total
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    frac = np.where(seg[idx] > 0, (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0), 0.0)
    V = curve.polyline()
    out = _geodesic_fraction(curve.surface, V[idx], V[idx + 1], frac)
    out[params <= 0] = V[0]
    out[params >= 1] = V[-1]
    return out


def curve_distance(a, b, samples=257):
    """Largest metric gap between two pinned curves on a common constant-speed grid."""
    t = np.linspace(0.0, 1.0, samples)
    pa, pb = constant_speed_points(a, t), constant_speed_points(b, t)
    return float(np.max(geo.distance_batch(a.surface, pa, pb)))


def geodesic_residual(curve):
    """Largest |turning angle| / mean adjacent segment length over interior vertices."""
    k = geodesic_curvature(curve, method="turning")
    return float(np.nanmax(np.abs(k))) if np.any(np.isfinite(k)) else 0.0


@dataclass(frozen=True)
class BirkhoffConfig:
    """Break count ``L``, segment cap ``r0`` and optional containing region."""

    L: int = 16
    r0: float = 0.5
    tol: float = 1e-10
    region: Region | None = None
    samples_per_chord: int = 8
    max_vertices: int = 0

    def __post_init__(self):
        if self.L < 5:
            raise ValueError("L must be at least 5 (output has L + 3 vertices)")
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")


def _chords_inside(cfg, surface, a, b):
    """Mask of geodesic chords ``a[i] -> b[i]`` that stay in the configured region."""
    if cfg.region is None:
        return np.ones(len(a), dtype=bool)
    k = cfg.samples_per_chord
    f = np.tile(np.arange(1, k) / k, len(a))
    A = np.repeat(a, k - 1, axis=0)
    B = np.repeat(b, k - 1, axis=0)
    pts = _geodesic_fraction(surface, A, B, f)
    return cfg.region.contains(pts).reshape(len(a), k - 1).all(axis=1)


def _check_r0(cfg, surface, a, b):
    d = geo.distance_batch(surface, a, b)
    if np.any(d > cfg.r0 * (1 + 1e-9)):
        raise SegmentTooLong(f"break points {float(d.max()):.4g} apart exceed r0 = {cfg.r0}")


def _arc_params(curve):
    seg = segment_lengths(curve, "geodesic")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    return cum / cum[-1] if cum[-1] > 0 else cum


def birkhoff_map(curve, cfg=BirkhoffConfig()):
    """One application of the fixed-endpoint Birkhoff shortening map.

    The curve is cut at ``2L + 2`` equally spaced constant-speed break points.
    Consecutive even break points are joined by minimising geodesics, whose
    midpoints ``m_0, ..., m_L`` are then joined in turn.  The result is the
    piecewise geodesic ``p, m_0, ..., m_L, q``.  With a region configured, a
    chord that would leave it is skipped and the arc it would replace is kept.
    """
    if curve.closed:
        raise ValueError("the Birkhoff map acts on pinned curves")
    surf = curve.surface
    L = cfg.L
    tau = np.arange(2 * L + 3) / (2 * L + 2)
    pts = constant_speed_points(curve, tau)
    even, odd = pts[0::2], pts[1::2]
    _check_r0(cfg, surf, even[:-1], even[1:])
    inside = _chords_inside(cfg, surf, even[:-1], even[1:])
    mids = _geodesic_fraction(surf, even[:-1], even[1:], np.full(L + 1, 0.5))
    m = np.where(inside[:, None], mids, odd)
    # sigma_e as a vertex list with the index of every m_j
    t_orig = _arc_params(curve)
    verts, m_idx = [even[0]], []
    for j in range(L + 1):
        if inside[j]:
            m_idx.append(len(verts))
            verts.append(m[j])
        else:
            for lo, hi, tag in ((tau[2 * j], tau[2 * j + 1], True), (tau[2 * j + 1], tau[2 * j + 2], False)):
                sel = (t_orig > lo + 1e-14) & (t_orig < hi - 1e-14)
                verts.extend(curve.vertices[sel])
                if tag:
                    m_idx.append(len(verts))
                    verts.append(m[j])
        verts.append(even[j + 1])
    V = np.array(verts)
    # second stage: join consecutive midpoints
    _check_r0(cfg, surf, m[:-1], m[1:])
    inside2 = _chords_inside(cfg, surf, m[:-1], m[1:])
    out = list(V[: m_idx[0] + 1])
    for j in range(L):
        if not inside2[j]:
            out.extend(V[m_idx[j] + 1: m_idx[j + 1]])
        out.append(V[m_idx[j + 1]])
    out.extend(V[m_idx[-1] + 1:])
    verts = _dedupe(np.array(out))
    cap = cfg.max_vertices or 8 * (L + 3)
    if len(verts) > cap:  # kept arcs accumulate break points; thin by inscribed chords
        verts = constant_speed_points(curve.replace(verts), np.linspace(0, 1, cap // 2))
    if len(verts) < 8:
        verts = constant_speed_points(curve.replace(verts), np.linspace(0, 1, 8))
    return curve.replace(verts, corners=())


def _dedupe(v):
    keep = np.ones(len(v), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(v, axis=0), axis=1) > 1e-14
    return v[keep]


# --------------------------------------------------------------------------
# Curve shortening flow
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowConfig:
    """Settings shared by the flow and the Newton solver."""

    cfl: float = 0.4
    residual: float = 1e-9
    max_iter: int = 200000
    damping_halvings: int = 30
    resample_every: int = 10
    area_floor: float = 1e-4
    vertices: int = 128


@dataclass
class FlowPath:
    """Curves along a flow with their times, lengths and enclosed areas."""

    curves: list
    times: list
    lengths: list
    areas: list
    flags: dict = field(default_factory=dict)

    def reversed(self):
        """Time-reversed and rescaled copy (parameter runs from the point curve to the input)."""
        T = self.times[-1] if self.times[-1] > 0 else 1.0
        return FlowPath(self.curves[::-1], [1 - t / T for t in self.times[::-1]],
                        self.lengths[::-1], self.areas[::-1], dict(self.flags))

    def trace_rows(self):
        return [(i, t, L, A) for i, (t, L, A) in enumerate(zip(self.times, self.lengths, self.areas))]


def resample_polyline(curve, n=None):
    """Uniform chord-length resampling of a closed polyline (piecewise linear in the chart)."""
    n = curve.n if n is None else n
    P = curve.polyline()
    seg = segment_lengths(curve, "chord")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0:
        return curve
    s = cum[-1] * np.arange(n) / n
    x = np.interp(s, cum, P[:, 0])
    y = np.interp(s, cum, P[:, 1])
    return curve.replace(np.stack([x, y], -1), corners=())


def _enclosed_area(curve):
    return Region(curve.replace(curve.vertices, corners=curve.corners or (0,))).area()


def _chart_area(curve):
    return abs(shoelace(curve.vertices))


def csf_step(curve, dt, area_floor=None):
    """One explicit step of curve shortening flow (normal speed = geodesic curvature).

    Raises :class:`StabilityViolation` when ``dt`` exceeds ``0.4 h_min^2`` and
    :class:`CollapseDetected` when the enclosed chart area drops below ``area_floor``.
    """
    seg = segment_lengths(curve, "chord")
    h = float(np.min(seg))
    if dt > 0.4 * h * h * (1 + 1e-12):
        raise StabilityViolation(f"dt = {dt:.3g} exceeds 0.4 h^2 = {0.4 * h * h:.3g}")
    kappa = geodesic_curvature(curve, method="stencil")
    from .curve import _neighbours
    prev, nxt = _neighbours(curve)
    nrm = curve.surface.left_normal(curve.vertices, nxt - prev)
    new = curve.replace(curve.vertices + dt * kappa[:, None] * nrm)
    if area_floor is not None and _chart_area(new) < area_floor:
        raise CollapseDetected("enclosed chart area below floor")
    return new


def csf_path_to_point(curve, cfg=FlowConfig(), max_slices=200):
    """Run curve shortening flow until the curve collapses to a point.

    The returned path ends with a point-collapsed curve.  The caller must make
    sure the region swept contains no closed geodesic (flagged, not checked).
    """
    P0 = curve.polyline()
    if np.max(np.abs(P0 - P0[0])) == 0:
        return FlowPath([curve], [0.0], [0.0], [0.0], {"trivial": True})
    cur = resample_polyline(curve, min(max(curve.n, 8), cfg.vertices))
    floor = cfg.area_floor * _chart_area(cur)
    curves, times = [cur], [0.0]
    t = 0.0
    save_every = 1

    def finish(flags):
        lens = [length(cv, "chord") for cv in curves[:-1]] + [0.0]
        areas = [_enclosed_area(cv) for cv in curves[:-1]] + [0.0]
        return FlowPath(curves, times, lens, areas, flags)

    for it in range(cfg.max_iter):
        h = float(np.min(segment_lengths(cur, "chord")))
        dt = cfg.cfl * h * h
        try:
            cur = csf_step(cur, dt, area_floor=floor)
        except CollapseDetected:
            centre = np.mean(cur.vertices, axis=0)
            curves.append(cur.replace(np.repeat(centre[None], cur.n, axis=0)))
            times.append(t)
            return finish({"collapsed": True, "interior_geodesics_checked": False})
        t += dt
        if (it + 1) % cfg.resample_every == 0:
            cur = resample_polyline(cur)
        if (it + 1) % save_every == 0:
            curves.append(cur)
            times.append(t)
            if len(curves) > max_slices:
                curves, times = curves[::2], times[::2]
                save_every *= 2
    raise NoCollapse("iteration budget exhausted before collapse")


# --------------------------------------------------------------------------
# Corner rounding
# --------------------------------------------------------------------------

def _constant_curvature_rhs(surface, kappa):
    def rhs(_, y):
        x, v = y[:2], y[2:]
        acc = surface.geodesic_rhs(x, v)
        n = surface.left_normal(x, v) * surface.norm(x, v) ** 2
        return np.concatenate([v, acc + kappa * n])
    return rhs


def constant_curvature_arc(surface, a, b, kappa, n=33):
    """Arc from ``a`` to ``b`` with constant left geodesic curvature ``kappa`` (short branch).

    Shooting on the initial direction and the length; the flat circular arc is
    the initial guess.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = geo.distance(surface, a, b)
    if abs(kappa) * d / 2 >= 1:
        raise GeodesicSubproblemFailure("no arc of this curvature joins the points")
    half = math.asin(abs(kappa) * d / 2) if kappa else 0.0
    ell0 = 2 * half / abs(kappa) if kappa else d
    v0 = geo.log_map(surface, a, b)
    g = surface.metric(a)
    A = np.linalg.cholesky(g).T
    w = A @ v0
    th0 = math.atan2(w[1], w[0]) - math.copysign(half, kappa)
    Ainv = np.linalg.inv(A)
    rhs = _constant_curvature_rhs(surface, kappa)

    def shoot(p, dense=False):
        th, ell = p
        v = Ainv @ np.array([math.cos(th), math.sin(th)]) * ell
        ts = np.linspace(0, 1, n) if dense else None
        sol = integrate.solve_ivp(rhs, (0, 1), np.concatenate([a, v]), rtol=1e-11, atol=1e-13,
                                  t_eval=ts, method="DOP853")
        return sol

    def resid(p):
        return shoot(p).y[:2, -1] - b

    sol = optimize.root(resid, [th0, ell0], method="hybr", options={"xtol": 1e-13})
    if not sol.success or np.linalg.norm(resid(sol.x)) > 1e-9:
        raise GeodesicSubproblemFailure("constant-curvature shooting failed")
    pts = shoot(sol.x, dense=True).y[:2].T
    pts[0], pts[-1] = a, b
    return pts


def round_corner(curve, node, r, mode="geodesic", c=None, r_max=None, n_arc=17):
    """Replace the part of ``curve`` inside the metric ball ``B_r`` at a corner.

    ``node`` is a :class:`NodeData` (its ``t0`` locates the corner) or a vertex
    index.  ``mode='geodesic'`` inserts the minimising chord, ``'curvature'``
    an arc of constant curvature ``c`` turning the same way as the corner.
    A tangential node (``alpha = pi``) is returned unchanged.
    """
    if isinstance(node, NodeData):
        if node.kind == "tangent" or abs(node.alpha - math.pi) < 1e-12:
            return curve
        idx = int(round(node.t0))
    else:
        idx = int(node)
    if r_max is not None and r > r_max:
        raise ScaleTooLarge(f"r = {r} exceeds the surgery scale {r_max}")
    surf = curve.surface
    n = curve.n
    P = curve.polyline()
    x0 = curve.vertices[idx]
    # walk both ways until leaving the ball
    if curve.closed:
        order_f = [(idx + k) % n for k in range(1, n)]
        order_b = [(idx - k) % n for k in range(1, n)]
    else:
        order_f = list(range(idx + 1, n))
        order_b = list(range(idx - 1, -1, -1))

    def lifted(j, forward):
        if not curve.closed:
            return curve.vertices[j]
        if forward:
            return curve.vertices[j] + (curve.shift if j < idx else 0)
        return curve.vertices[j] - (curve.shift if j > idx else 0)

    def exit_point(order, forward):
        prev = x0
        for cnt, j in enumerate(order):
            q = lifted(j, forward)
            dq = geo.distance(surf, x0, q)
            if dq >= r:
                dp = geo.distance(surf, x0, prev)
                f = optimize.brentq(lambda s: geo.distance(surf, x0, prev + s * (q - prev)) - r, 0.0, 1.0) \
                    if dq > dp else 1.0
                return prev + f * (q - prev), cnt
            prev = q
        raise ScaleTooLarge("ball contains the whole curve")

    b_pt, nf = exit_point(order_f, True)
    a_pt, nb = exit_point(order_b, False)
    if nf + nb + 2 >= n - 2:
        raise ScaleTooLarge("ball swallows most of the curve")
    if mode == "geodesic":
        insert = geo.geodesic_between(surf, a_pt, b_pt, n_arc)
    elif mode == "curvature":
        if c is None:
            raise ValueError("curvature mode needs c")
        u, w = x0 - a_pt, b_pt - x0
        turn = u[0] * w[1] - u[1] * w[0]
        insert = constant_curvature_arc(surf, a_pt, b_pt, math.copysign(c, turn), n_arc)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # assemble: from b forward around to a, then the inserted piece a -> b
    if curve.closed:
        rest = [lifted(j, True) for j in order_f[nf:]]
        rest = [p for p in rest]
        keep = np.array(rest[: len(rest) - nb])
        body = np.vstack([b_pt[None], keep, a_pt[None]])
        verts = np.vstack([body, insert[1:-1]])
        corners = (0, len(body) - 1)
        return DiscreteCurve(surf, verts, closed=True, shift=curve.shift, corners=corners)
    before = curve.vertices[: idx - nb]
    after = curve.vertices[idx + nf + 1:]
    verts = np.vstack([before, a_pt[None], insert[1:-1], b_pt[None], after])
    return DiscreteCurve(surf, verts, closed=False)


# --------------------------------------------------------------------------
# Prescribed curvature solver
# --------------------------------------------------------------------------

def _spectral_matrices(n):
    eye = np.eye(n)
    F = np.fft.fft(eye, axis=0)
    w = 2j * np.pi * np.fft.fftfreq(n, 1.0 / n)
    w1 = w.copy()
    if n % 2 == 0:
        w1[n // 2] = 0
    D1 = np.real(np.fft.ifft(w1[:, None] * F, axis=0))
    D2 = np.real(np.fft.ifft((w * w)[:, None] * F, axis=0))
    return D1, D2


def _oriented(region):
    """Boundary curve oriented with the region on its left."""
    cv = region.boundary[0]
    if region.side_signs(cv)[0] < 0:
        cv = cv.reversed()
    return cv


def solve_prescribed_curvature(surface, c, seed, cfg=FlowConfig(), trace=None):
    """Newton iteration for a region whose boundary has constant curvature ``c``.

    Updates are normal graphs ``psi`` over the current curve solving
    ``psi_ss + (K + kappa^2) psi = -(kappa - c)`` in the least-squares sense;
    the step is halved until the residual norm decreases.  Every accepted
    iterate is checked for embeddedness (lattice translates included).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if len(seed.boundary) != 1:
        raise ValueError("seed region must have a single boundary curve")
    curve = resample(_oriented(seed), cfg.vertices)
    if not is_embedded(curve):
        raise EmbeddednessLost("seed boundary is not embedded")
    n = curve.n
    _, D2 = _spectral_matrices(n)

    def residual(cv):
        return geodesic_curvature(cv, method="spectral") - c

    res = residual(curve)
    for it in range(cfg.max_iter):
        rmax = float(np.max(np.abs(res)))
        if trace is not None:
            trace.append((it, length(curve), Region(curve, complement=seed.complement).area(), rmax))
        if rmax < cfg.residual:
            break
        L = length(curve)
        K = surface.gauss_curvature(curve.vertices)
        kappa = res + c
        J = D2 / L**2 + np.diag(K + kappa**2)
        psi = np.linalg.lstsq(J, -res, rcond=1e-10)[0]
        d1, _ = spectral_derivatives(curve)
        nrm = surface.left_normal(curve.vertices, d1)
        step = 1.0
        old = float(np.linalg.norm(res))
        for _ in range(cfg.damping_halvings):
            trial = curve.replace(geo.exp_batch(surface, curve.vertices, step * psi[:, None] * nrm, steps=4))
            try:
                trial = resample(trial)
                tres = residual(trial)
            except Exception:  # noqa: BLE001 - any breakdown counts as a rejected step
                step *= 0.5
                continue
            if np.all(np.isfinite(tres)) and np.linalg.norm(tres) < old:
                break
            step *= 0.5
        else:
            raise NoConvergence(f"damping failed at iteration {it} (residual {rmax:.3g})")
        curve, res = trial, tres
        if not is_embedded(curve):
            raise EmbeddednessLost(f"self-intersection appeared at iteration {it + 1}")
    else:
        raise NoConvergence(f"no convergence in {cfg.max_iter} iterations")
    return seed.with_boundary(curve)
