"""Charted Riemannian surfaces: metric, curvature, geodesics and global statistics.

Every surface is represented by one or more *charts*.  A chart is a map from an
open subset of the plane (possibly periodic) to the surface together with the
pulled-back metric.  All methods are vectorised over leading axes: a point array
has shape ``(..., 2)``.

Three families are supported:

* :class:`FlatTorus` -- the plane modulo a lattice with the Euclidean metric;
* :class:`ConformalTorus` -- a lattice torus with metric ``exp(2u) |dx|^2`` where
  ``u`` is sampled on a grid and evaluated by a periodic bicubic spline;
* :class:`SurfaceOfRevolution` -- profile coordinates ``(s, theta)`` with metric
  ``ds^2 + f(s)^2 dtheta^2``.  Its :meth:`~SurfaceOfRevolution.plane_chart` is a
  global conformal chart on the plane (one pole at the origin, the other at
  infinity), which is where closed curves are usually handled.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ._polygon import lattice_translates
from ._spline import PeriodicBicubic
from .errors import (ConfigError, GeodesicSubproblemFailure, NonSmoothPoint,
                     OutOfChart, StepFailure)

__all__ = [
    "Chart", "ConformalChart", "FlatTorus", "ConformalTorus", "SurfaceOfRevolution",
    "RevolutionPlane", "SphereProfile", "CappedCylinderProfile", "SampledProfile",
    "SurfaceStats", "IntegratorConfig", "metric_at", "gauss_curvature_at", "exp_map",
    "exp_batch", "log_batch", "distance_batch", "log_map", "geodesic_between", "distance", "surface_stats",
    "load_surface", "round_sphere", "capped_cylinder", "surgery_scale",
]


# --------------------------------------------------------------------------
# Chart base classes
# --------------------------------------------------------------------------

class Chart:
    """A coordinate chart carrying a Riemannian metric.

    Subclasses implement :meth:`metric`, :meth:`christoffel` and
    :meth:`gauss_curvature`.  ``periods`` lists the deck translations of the
    chart (empty, one or two vectors).
    """

    periods = np.zeros((0, 2))
    total_area: float | None = None
    name = "chart"

    def metric(self, x):
        raise NotImplementedError

    def christoffel(self, x):
        """Christoffel symbols ``G[..., k, i, j]``."""
        raise NotImplementedError

    def gauss_curvature(self, x):
        raise NotImplementedError

    def area_density(self, x):
        g = self.metric(x)
        return np.sqrt(g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2)

    def contains(self, x):
        return np.all(np.isfinite(x), axis=-1)

    def wrap(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(self.contains(x)):
            raise OutOfChart("point outside chart domain")
        if len(self.periods) == 0:
            return x
        P = np.asarray(self.periods)
        if len(P) == 2:
            frac = np.linalg.solve(P.T, x[..., None])[..., 0] if x.ndim > 1 else np.linalg.solve(P.T, x)
            frac = frac - np.floor(frac)
            return frac @ P
        p = P[0]
        t = (x @ p) / (p @ p)
        return x - np.floor(t)[..., None] * p

    def norm(self, x, v):
        g = self.metric(x)
        return np.sqrt(np.einsum("...i,...ij,...j->...", v, g, v))

    def inner(self, x, v, w):
        return np.einsum("...i,...ij,...j->...", v, self.metric(x), w)

    def left_normal(self, x, tangent):
        """Unit normal ``n`` with ``(tangent, n)`` positively oriented."""
        g = self.metric(x)
        e = np.stack([-tangent[..., 1], tangent[..., 0]], axis=-1)
        gt = np.einsum("...ij,...j->...i", g, tangent)
        tt = np.einsum("...i,...i->...", tangent, gt)
        et = np.einsum("...i,...i->...", e, gt)
        n = e - (et / tt)[..., None] * tangent
        nn = np.sqrt(np.einsum("...i,...ij,...j->...", n, g, n))
        return n / nn[..., None]

    def geodesic_rhs(self, x, v):
        G = self.christoffel(x)
        return -np.einsum("...kij,...i,...j->...k", G, v, v)

    # geodesic helpers; subclasses override with closed forms when available
    def _log(self, a, b):
        return _shooting_log(self, a, b)

    def _geodesic_points(self, a, b, n):
        v = self._log(a, b)
        ts = np.linspace(0.0, 1.0, n)
        pts = exp_batch(self, np.broadcast_to(a, (n, 2)), ts[:, None] * v, steps=64)
        pts[0], pts[-1] = a, b
        return pts


class ConformalChart(Chart):
    """Chart with metric ``exp(2u) I``; subclasses provide ``log_factor``."""

    def log_factor(self, x):
        """Return ``(u, grad u, laplacian u)``."""
        raise NotImplementedError

    def metric(self, x):
        u, _, _ = self.log_factor(x)
        return np.exp(2 * u)[..., None, None] * np.eye(2)

    def area_density(self, x):
        return np.exp(2 * self.log_factor(x)[0])

    def christoffel(self, x):
        _, du, _ = self.log_factor(x)
        eye = np.eye(2)
        # G^k_ij = d^k_i u_j + d^k_j u_i - d_ij u_k
        return (np.einsum("ki,...j->...kij", eye, du)
                + np.einsum("kj,...i->...kij", eye, du)
                - np.einsum("ij,...k->...kij", eye, du))

    def gauss_curvature(self, x):
        u, _, lap = self.log_factor(x)
        return -np.exp(-2 * u) * lap


def _reduced_lattice_min(basis):
    """Length of the shortest nonzero lattice vector (Lagrange-Gauss reduction)."""
    a, b = np.array(basis[0], float), np.array(basis[1], float)
    if a @ a > b @ b:
        a, b = b, a
    while True:
        mu = round((a @ b) / (a @ a))
        b = b - mu * a
        if b @ b >= a @ a:
            return float(np.sqrt(a @ a))
        a, b = b, a


class FlatTorus(ConformalChart):
    """The plane modulo the lattice spanned by the rows of ``basis``."""

    name = "flat_torus"

    def __init__(self, basis):
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (2, 2) or abs(np.linalg.det(basis)) < 1e-14:
            raise ConfigError("flat torus needs two linearly independent lattice vectors")
        self.basis = basis
        self.periods = basis
        self.total_area = float(abs(np.linalg.det(basis)))

    @classmethod
    def square(cls, inj):
        """Square torus with injectivity radius ``inj`` (side ``2 inj``)."""
        return cls(2.0 * inj * np.eye(2))

    def log_factor(self, x):
        x = np.asarray(x, dtype=float)
        z = np.zeros(x.shape[:-1])
        return z, np.zeros_like(x), z

    def metric(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.eye(2), x.shape[:-1] + (2, 2)).copy()

    def area_density(self, x):
        return np.ones(np.asarray(x).shape[:-1])

    def christoffel(self, x):
        return np.zeros(np.asarray(x).shape[:-1] + (2, 2, 2))

    def gauss_curvature(self, x):
        return np.zeros(np.asarray(x).shape[:-1])

    @property
    def injectivity_radius(self):
        return 0.5 * _reduced_lattice_min(self.basis)

    def _log(self, a, b):
        return np.asarray(b, float) - np.asarray(a, float)

    def _geodesic_points(self, a, b, n):
        ts = np.linspace(0.0, 1.0, n)[:, None]
        return (1 - ts) * a + ts * b


class ConformalTorus(ConformalChart):
    """Lattice torus with metric ``exp(2u)|dx|^2``; ``u`` sampled on an N x M grid.

    ``samples[i, j]`` is ``u`` at fractional lattice coordinates ``(i/N, j/M)``.
    """

    name = "conformal_torus"

    def __init__(self, basis, samples):
        basis = np.asarray(basis, dtype=float)
        if basis.shape != (2, 2) or abs(np.linalg.det(basis)) < 1e-14:
            raise ConfigError("conformal torus needs two linearly independent lattice vectors")
        self.basis = basis
        self.periods = basis
        self.samples = np.asarray(samples, dtype=float)
        self.spline = PeriodicBicubic(self.samples)
        self._binv = np.linalg.inv(basis)

    @classmethod
    def from_modes(cls, basis, modes, grid=48):
        """Sample ``u = sum a cos(2 pi (kx xi + ky eta) + phase)`` on a grid.

        ``modes`` is an iterable of ``(a, kx, ky, phase)`` in fractional coordinates.
        """
        xi = np.arange(grid) / grid
        X, Y = np.meshgrid(xi, xi, indexing="ij")
        u = np.zeros_like(X)
        for a, kx, ky, ph in modes:
            u += a * np.cos(2 * np.pi * (kx * X + ky * Y) + ph)
        return cls(basis, u)

    def log_factor(self, x):
        x = np.asarray(x, dtype=float)
        xi = x @ self._binv
        u, g, h = self.spline.evaluate(xi)
        B = self._binv
        grad = np.einsum("jk,...k->...j", B, g)
        lap = np.einsum("jk,...kl,jl->...", B, h, B)
        return u, grad, lap

    @cached_property
    def total_area(self):
        n = 256
        xi = (np.arange(n) + 0.5) / n
        X, Y = np.meshgrid(xi, xi, indexing="ij")
        u, _, _ = self.spline.evaluate(np.stack([X, Y], -1))
        return float(np.mean(np.exp(2 * u)) * abs(np.linalg.det(self.basis)))


# --------------------------------------------------------------------------
# Surfaces of revolution
# --------------------------------------------------------------------------

class SphereProfile:
    """Profile ``f(s) = R sin(s/R)`` of the round sphere of radius R."""

    name = "sphere"
    junctions = ()

    def __init__(self, radius=1.0):
        self.R = float(radius)
        self.length = math.pi * self.R

    def f(self, s):
        return self.R * np.sin(s / self.R)

    def df(self, s):
        return np.cos(s / self.R)

    def d2f(self, s):
        return -np.sin(s / self.R) / self.R

    def w_of_s(self, s):
        return np.log(np.tan(s / (2 * self.R)))

    def s_of_r(self, r):
        return 2 * self.R * np.arctan(r)


class CappedCylinderProfile:
    """Two unit hemispheres glued to a unit-radius cylinder of length L (C^{1,1})."""

    name = "capped_cylinder"

    def __init__(self, cylinder_length):
        self.L = float(cylinder_length)
        self.length = math.pi + self.L
        self.junctions = (math.pi / 2, math.pi / 2 + self.L)

    def _piece(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s < self.junctions[0], 0, np.where(s <= self.junctions[1], 1, 2))

    def f(self, s):
        s = np.asarray(s, dtype=float)
        k = self._piece(s)
        return np.where(k == 0, np.sin(s), np.where(k == 1, 1.0, np.sin(s - self.L)))

    def df(self, s):
        s = np.asarray(s, dtype=float)
        k = self._piece(s)
        return np.where(k == 0, np.cos(s), np.where(k == 1, 0.0, np.cos(s - self.L)))

    def d2f(self, s):
        s = np.asarray(s, dtype=float)
        k = self._piece(s)
        return np.where(k == 0, -np.sin(s), np.where(k == 1, 0.0, -np.sin(s - self.L)))

    def w_of_s(self, s):
        s = np.asarray(s, dtype=float)
        k = self._piece(s)
        with np.errstate(divide="ignore"):
            return np.where(k == 0, np.log(np.tan(np.minimum(s, math.pi / 2) / 2)),
                            np.where(k == 1, s - math.pi / 2,
                                     self.L + np.log(np.tan(np.clip(s - self.L, math.pi / 2, math.pi) / 2))))

    def s_of_r(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            w = np.log(r)
        return np.where(w < 0, 2 * np.arctan(r),
                        np.where(w <= self.L, math.pi / 2 + w,
                                 self.L + 2 * np.arctan(np.exp(np.minimum(w - self.L, 700)))))


class SampledProfile:
    """Profile interpolated from samples ``(s_i, f_i)`` with ``f = 0`` at both ends.

    The conformal coordinate is tabulated numerically; near the poles ``f`` is
    assumed to behave like the distance to the pole.
    """

    name = "sampled"
    junctions = ()

    def __init__(self, s, f):
        s = np.asarray(s, float)
        f = np.asarray(f, float)
        if np.any(f[1:-1] <= 0):
            raise ConfigError("profile must be positive on the open extent")
        self.length = float(s[-1] - s[0])
        self.samples = (s.copy(), f.copy())
        self._s0 = s[0]
        self._cs = CubicSpline(s - s[0], f)
        grid = np.linspace(0, self.length, 4001)[1:-1]
        mid = self.length / 2
        fm = float(self._cs(mid))

        def integrand(t):
            return 1.0 / float(self._cs(t))

        ws = []
        for t in grid:
            val, _ = integrate.quad(integrand, mid, t, limit=200)
            ws.append(val)
        self._grid = grid
        self._w = np.array(ws) + math.log(fm)
        self._inv = CubicSpline(self._w, grid)

    def f(self, s):
        return self._cs(s)

    def df(self, s):
        return self._cs(s, 1)

    def d2f(self, s):
        return self._cs(s, 2)

    def w_of_s(self, s):
        return np.interp(s, self._grid, self._w)

    def s_of_r(self, r):
        w = np.log(np.asarray(r, float))
        w = np.clip(w, self._w[0], self._w[-1])
        return self._inv(w)


class SurfaceOfRevolution(Chart):
    """Profile chart ``(s, theta)`` with metric ``diag(1, f(s)^2)``."""

    name = "revolution"

    def __init__(self, profile, junction_band=1e-3):
        self.profile = profile
        self.junction_band = junction_band
        self.periods = np.array([[0.0, 2 * math.pi]])

    @cached_property
    def total_area(self):
        val, _ = integrate.quad(lambda s: float(self.profile.f(s)), 0, self.profile.length,
                                points=list(self.profile.junctions) or None, limit=200)
        return 2 * math.pi * val

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        s = x[..., 0]
        return np.isfinite(x).all(-1) & (s > 0) & (s < self.profile.length)

    def metric(self, x):
        x = np.asarray(x, dtype=float)
        f = self.profile.f(x[..., 0])
        g = np.zeros(x.shape[:-1] + (2, 2))
        g[..., 0, 0] = 1.0
        g[..., 1, 1] = f * f
        return g

    def area_density(self, x):
        return np.abs(self.profile.f(np.asarray(x)[..., 0]))

    def christoffel(self, x):
        x = np.asarray(x, dtype=float)
        s = x[..., 0]
        f, df = self.profile.f(s), self.profile.df(s)
        G = np.zeros(x.shape[:-1] + (2, 2, 2))
        G[..., 0, 1, 1] = -f * df
        G[..., 1, 0, 1] = df / f
        G[..., 1, 1, 0] = df / f
        return G

    def gauss_curvature(self, x):
        s = np.asarray(x, dtype=float)[..., 0]
        return -self.profile.d2f(s) / self.profile.f(s)

    def near_junction(self, x):
        s = np.asarray(x, dtype=float)[..., 0]
        out = np.zeros(s.shape, dtype=bool)
        for j in self.profile.junctions:
            out |= np.abs(s - j) < self.junction_band
        return out

    def plane_chart(self):
        return self._plane

    @cached_property
    def _plane(self):
        return RevolutionPlane(self)

    def to_plane(self, x):
        x = np.asarray(x, dtype=float)
        r = np.exp(self.profile.w_of_s(x[..., 0]))
        return np.stack([r * np.cos(x[..., 1]), r * np.sin(x[..., 1])], -1)

    def from_plane(self, y):
        y = np.asarray(y, dtype=float)
        r = np.hypot(y[..., 0], y[..., 1])
        return np.stack([self.profile.s_of_r(r), np.arctan2(y[..., 1], y[..., 0])], -1)


class RevolutionPlane(ConformalChart):
    """Global conformal chart of a surface of revolution.

    ``|y| = exp(w(s))`` with ``dw/ds = 1/f``; the pole ``s = 0`` sits at the origin.
    """

    name = "revolution_plane"

    def __init__(self, surface):
        self.surface = surface
        self.profile = surface.profile
        self.total_area = surface.total_area

    def log_factor(self, y):
        y = np.asarray(y, dtype=float)
        p = self.profile
        if isinstance(p, SphereProfile):
            r2 = np.sum(y * y, -1)
            u = np.log(2 * p.R / (1 + r2))
            grad = -2 * y / (1 + r2)[..., None]
            lap = -4 / (1 + r2) ** 2
            return u, grad, lap
        r = np.hypot(y[..., 0], y[..., 1])
        # near the pole evaluate at a floored radius; the error is O(r^2)
        rs = np.maximum(r, 1e-7)
        s = p.s_of_r(rs)
        f, df, d2f = p.f(s), p.df(s), p.d2f(s)
        u = np.log(f / rs)
        ur_over_r = (df - 1.0) / rs**2
        grad = ur_over_r[..., None] * y
        lap = d2f * f / rs**2
        # pole limit: f ~ s, f' ~ 1 - K s^2/2  =>  grad -> 0, lap -> -K f^2/r^2
        return u, np.where((r > 1e-7)[..., None], grad, 0.0), lap

    def near_junction(self, y):
        return self.surface.near_junction(self.surface.from_plane(y))

    def _sphere_lift(self, y):
        R = self.profile.R
        r2 = np.sum(y * y, -1)[..., None]
        return R * np.concatenate([2 * y, 1 - r2], -1) / (1 + r2)

    def _sphere_proj(self, P):
        R = self.profile.R
        return P[..., :2] / (R + P[..., 2:3])

    def _log(self, a, b):
        if not isinstance(self.profile, SphereProfile):
            return _shooting_log(self, a, b)
        R = self.profile.R
        A, B = self._sphere_lift(np.asarray(a, float)), self._sphere_lift(np.asarray(b, float))
        ua, ub = A / R, B / R
        cosang = np.clip(ua @ ub, -1.0, 1.0)
        ang = math.acos(cosang)
        perp = ub - cosang * ua
        npp = np.linalg.norm(perp)
        if npp < 1e-300:
            return np.zeros(2)
        V = R * ang * perp / npp       # 3-D initial velocity of the great circle
        # differential of stereographic projection y = P_xy / (R + P_z)
        den = R + A[2]
        return (V[:2] * den - A[:2] * V[2]) / den**2

    def _geodesic_points(self, a, b, n):
        if not isinstance(self.profile, SphereProfile):
            return Chart._geodesic_points(self, a, b, n)
        R = self.profile.R
        A, B = self._sphere_lift(np.asarray(a, float)) / R, self._sphere_lift(np.asarray(b, float)) / R
        om = math.acos(np.clip(A @ B, -1, 1))
        ts = np.linspace(0, 1, n)[:, None]
        if om < 1e-12:
            P = (1 - ts) * A + ts * B
        else:
            P = (np.sin((1 - ts) * om) * A + np.sin(ts * om) * B) / math.sin(om)
        pts = self._sphere_proj(R * P)
        pts[0], pts[-1] = a, b
        return pts


def round_sphere(radius=1.0):
    return SurfaceOfRevolution(SphereProfile(radius))


def capped_cylinder(cylinder_length):
    if cylinder_length <= math.pi:
        raise ConfigError("cylinder length must exceed pi")
    return SurfaceOfRevolution(CappedCylinderProfile(cylinder_length))


# --------------------------------------------------------------------------
# Point-wise primitives
# --------------------------------------------------------------------------

def metric_at(surface, p):
    """Metric components ``g_ij`` at chart point ``p``."""
    p = np.asarray(p, dtype=float)
    if not np.all(surface.contains(p)):
        raise OutOfChart(f"{p} is not in the chart domain")
    return surface.metric(surface.wrap(p))


def gauss_curvature_at(surface, p, strict=False):
    """Gaussian curvature at ``p``.

    Near a C^{1,1} junction of a profile the one-sided value is returned; with
    ``strict=True`` :class:`NonSmoothPoint` is raised instead.
    """
    p = np.asarray(p, dtype=float)
    if not np.all(surface.contains(p)):
        raise OutOfChart(f"{p} is not in the chart domain")
    if strict and hasattr(surface, "near_junction") and np.any(surface.near_junction(p)):
        raise NonSmoothPoint("curvature is one-sided at a profile junction")
    return surface.gauss_curvature(p)


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    min_step: float = 1e-14


def exp_map(surface, base, v, config=IntegratorConfig()):
    """Exponential map: follow the geodesic from ``base`` with velocity ``v`` for unit time."""
    base = np.asarray(base, float)
    v = np.asarray(v, float)
    if not np.all(np.isfinite(v)):
        raise StepFailure("non-finite initial velocity")
    if isinstance(surface, FlatTorus):
        return surface.wrap(base + v)

    def rhs(_, y):
        x, w = y[:2], y[2:]
        return np.concatenate([w, surface.geodesic_rhs(x, w)])

    sol = integrate.solve_ivp(rhs, (0.0, 1.0), np.concatenate([base, v]), method="DOP853",
                              rtol=config.rtol, atol=config.atol, max_step=config.max_step)
    if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
        raise StepFailure(sol.message)
    out = sol.y[:2, -1]
    return surface.wrap(out) if len(surface.periods) else out


def exp_batch(surface, x, v, steps=16, return_velocity=False):
    """Vectorised fixed-step RK4 exponential map (no wrapping).

    With ``return_velocity=True`` the final geodesic velocity is returned too.
    """
    x = np.array(x, dtype=float)
    v = np.array(v, dtype=float)
    if isinstance(surface, FlatTorus):
        return (x + v, v) if return_velocity else x + v
    h = 1.0 / steps

    def f(x, v):
        return v, surface.geodesic_rhs(x, v)

    for _ in range(steps):
        k1x, k1v = f(x, v)
        k2x, k2v = f(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = f(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = f(x + h * k3x, v + h * k3v)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return (x, v) if return_velocity else x


def _is_round_plane(surface):
    return isinstance(surface, RevolutionPlane) and isinstance(surface.profile, SphereProfile)


def log_batch(surface, x, y, iters=6, steps=8):
    """Vectorised log map for nearby point pairs ``x[i] -> y[i]``.

    Closed forms for flat tori and the stereographic sphere chart; otherwise a
    second-order guess corrected by fixed-point iteration on :func:`exp_batch`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = y - x
    if isinstance(surface, FlatTorus):
        return d
    if _is_round_plane(surface):
        R = surface.profile.R
        A = surface._sphere_lift(x) / R
        B = surface._sphere_lift(y) / R
        cosang = np.sum(A * B, -1)
        sinang = np.linalg.norm(np.cross(A, B), axis=-1)
        ang = np.arctan2(sinang, cosang)
        perp = B - cosang[..., None] * A
        npp = np.linalg.norm(perp, axis=-1)
        scale = np.where(npp > 1e-300, R * ang / np.where(npp > 1e-300, npp, 1.0), 0.0)
        V = scale[..., None] * perp
        den = (R + R * A[..., 2])[..., None]
        return (V[..., :2] * den - R * A[..., :2] * V[..., 2:3]) / den**2
    G = surface.christoffel(x)
    v = d + 0.5 * np.einsum("...kij,...i,...j->...k", G, d, d)
    for _ in range(iters):
        v = v + (y - exp_batch(surface, x, v, steps=steps))
    return v


def distance_batch(surface, x, y):
    """Geodesic distances between nearby point pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(surface, FlatTorus):
        return np.linalg.norm(y - x, axis=-1)
    if _is_round_plane(surface):
        R = surface.profile.R
        A, B = surface._sphere_lift(x) / R, surface._sphere_lift(y) / R
        return R * np.arctan2(np.linalg.norm(np.cross(A, B), axis=-1), np.sum(A * B, -1))
    return surface.norm(x, log_batch(surface, x, y))


def _shooting_log(surface, a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if np.allclose(a, b, atol=1e-15):
        return np.zeros(2)
    sol = optimize.root(lambda v: exp_batch(surface, a, v, steps=48) - b, b - a,
                        method="hybr", options={"xtol": 1e-13})
    if not sol.success or np.linalg.norm(exp_batch(surface, a, sol.x, 48) - b) > 1e-9:
        raise GeodesicSubproblemFailure(f"shooting failed between {a} and {b}: {sol.message}")
    return sol.x


def log_map(surface, a, b):
    """Initial velocity of the short geodesic from ``a`` to ``b`` (lifted coordinates)."""
    return surface._log(np.asarray(a, float), np.asarray(b, float))


def geodesic_between(surface, a, b, n=16):
    """``n`` points along the short geodesic from ``a`` to ``b`` (lifted coordinates)."""
    return surface._geodesic_points(np.asarray(a, float), np.asarray(b, float), n)


def distance(surface, a, b):
    """Length of the short geodesic between nearby points ``a`` and ``b``.

    On periodic charts the lattice translate of ``b`` closest to ``a`` is used.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if len(surface.periods):
        cand = b + lattice_translates(surface.periods, 1)
        b = cand[np.argmin(np.linalg.norm(cand - a, axis=1))]
    if isinstance(surface, FlatTorus):
        return float(np.linalg.norm(b - a))
    if isinstance(surface, RevolutionPlane) and isinstance(surface.profile, SphereProfile):
        R = surface.profile.R
        A, B = surface._sphere_lift(a) / R, surface._sphere_lift(b) / R
        # atan2 form is accurate for tiny and near-antipodal separations alike
        return float(R * math.atan2(np.linalg.norm(np.cross(A, B)), A @ B))
    v = log_map(surface, a, b)
    return float(surface.norm(a, v))


# --------------------------------------------------------------------------
# Global statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceStats:
    minK: float
    maxK: float
    inj: float
    area: float
    minK_certified: bool = False
    maxK_certified: bool = False
    inj_certified: bool = False
    area_certified: bool = False

    def __post_init__(self):
        if not (self.minK <= self.maxK and self.inj > 0 and self.area > 0):
            raise ValueError(f"inconsistent surface statistics {self}")


def _curvature_extrema(K, lo, hi, mask=None, n=64, refine=4):
    """Two-level grid search for curvature extrema with a Lipschitz safety margin.

    ``K`` maps an ``(..., 2)`` array to curvature; ``lo``/``hi`` bound the box.
    Returns ``(kmin, kmax)`` widened by ``0.5 * h * max|grad K|``.
    """
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    P = np.stack([X, Y], -1)
    Kv = K(P)
    valid = np.isfinite(Kv) if mask is None else (np.isfinite(Kv) & ~mask(P))
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    gx, gy = np.gradient(np.where(valid, Kv, np.nanmean(Kv[valid])), hx, hy)
    lip = float(np.max(np.hypot(gx, gy)[valid]))
    kmin, kmax = np.min(Kv[valid]), np.max(Kv[valid])
    # refine around the extremal cells
    for idx in (np.argmin(np.where(valid, Kv, np.inf)), np.argmax(np.where(valid, Kv, -np.inf))):
        i, j = np.unravel_index(idx, Kv.shape)
        fx = np.linspace(xs[max(i - 1, 0)], xs[min(i + 1, n - 1)], 8 * refine)
        fy = np.linspace(ys[max(j - 1, 0)], ys[min(j + 1, n - 1)], 8 * refine)
        FX, FY = np.meshgrid(fx, fy, indexing="ij")
        FP = np.stack([FX, FY], -1)
        FK = K(FP)
        ok = np.isfinite(FK) if mask is None else (np.isfinite(FK) & ~mask(FP))
        if ok.any():
            kmin = min(kmin, FK[ok].min())
            kmax = max(kmax, FK[ok].max())
    margin = 0.5 * lip * max(hx, hy) / (8 * refine / 2)
    return float(kmin - margin), float(kmax + margin)


def _grid_loop_length(surface, n=40, seeds=6, rng=None):
    """Shortest non-contractible loop of a lattice torus on a 3x3 tiled grid graph."""
    B = surface.basis
    m = 3 * n
    idx = np.arange(m * m).reshape(m, m)
    xi = (np.arange(m) - n) / n
    XI, ETA = np.meshgrid(xi, xi, indexing="ij")
    pts = np.stack([XI, ETA], -1) @ B
    rows, cols, vals = [], [], []
    offsets = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]
    for di, dj in offsets:
        i0 = slice(max(0, -di), m - max(0, di))
        j0 = slice(max(0, -dj), m - max(0, dj))
        i1 = slice(max(0, di), m - max(0, -di) if di < 0 else m)
        j1 = slice(max(0, dj), m + dj if dj < 0 else m)
        a, b = pts[i0, j0], pts[i1, j1]
        mid = 0.5 * (a + b)
        d = b - a
        w = np.sqrt(np.einsum("...i,...ij,...j->...", d, surface.metric(mid), d))
        rows.append(idx[i0, j0].ravel())
        cols.append(idx[i1, j1].ravel())
        vals.append(w.ravel())
    rows, cols, vals = map(np.concatenate, (rows, cols, vals))
    G = coo_matrix((vals, (rows, cols)), shape=(m * m, m * m)).tocsr()
    rng = np.random.default_rng(0) if rng is None else rng
    best = np.inf
    for _ in range(seeds):
        i, j = rng.integers(0, n, 2)
        src = idx[n + i, n + j]
        dist = dijkstra(G, directed=False, indices=src)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                best = min(best, dist[idx[n + i + di * n, n + j + dj * n]])
    return float(best)


def surface_stats(surface, grid=64):
    """Curvature bounds, injectivity radius and area of a built-in surface."""
    if isinstance(surface, RevolutionPlane):
        surface = surface.surface
    if isinstance(surface, FlatTorus):
        return SurfaceStats(0.0, 0.0, surface.injectivity_radius, surface.total_area,
                            True, True, True, True)
    if isinstance(surface, SurfaceOfRevolution):
        p = surface.profile
        if isinstance(p, SphereProfile):
            k = 1.0 / p.R**2
            return SurfaceStats(k, k, math.pi * p.R, 4 * math.pi * p.R**2, True, True, True, True)
        if isinstance(p, CappedCylinderProfile):
            return SurfaceStats(0.0, 1.0, math.pi, surface.total_area, True, True, True, True)
        band = surface.junction_band
        s = np.linspace(band, p.length - band, 20 * grid)
        K = -p.d2f(s) / p.f(s)
        kmin, kmax = float(K.min()), float(K.max())
        inj = math.pi / math.sqrt(kmax) if kmax > 0 else np.inf
        # the shortest parallel is a closed curve; half its length bounds inj from above
        inj = min(inj, math.pi * float(p.f(s).max()))
        return SurfaceStats(kmin, kmax, inj, surface.total_area)
    if isinstance(surface, ConformalTorus):
        binv = surface._binv

        def K(xi):
            return surface.gauss_curvature(xi @ surface.basis)

        kmin, kmax = _curvature_extrema(K, (0, 0), (1, 1), n=grid)
        inj = 0.5 * _grid_loop_length(surface)
        if kmax > 0:
            inj = min(inj, math.pi / math.sqrt(kmax))
        del binv
        return SurfaceStats(kmin, kmax, inj, surface.total_area)
    raise TypeError(f"unsupported surface {type(surface).__name__}")


def surgery_scale(surface, c, eta=None):
    """Uniform surgery / uniqueness scale ``r_c`` (safety factor 2).

    Minimum of the injectivity radius, the radius below which geodesic balls are
    strictly c-convex under the curvature upper bound, and the radius whose
    ball area stays below ``eta``.
    """
    from .criteria import r0  # local import: criteria depends on nothing here

    st = surface_stats(surface)
    conv = r0(c, st.maxK) if st.maxK > -c * c else np.inf
    rad = [st.inj, conv]
    if eta is not None:
        rad.append(math.sqrt(eta / (2 * math.pi)))
    return 0.5 * min(rad)


# --------------------------------------------------------------------------
# Configuration files
# --------------------------------------------------------------------------

def _floats(text):
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def load_surface(path):
    """Load a surface from a ``key = value`` text file.

    Schema (one key per line, ``#`` comments)::

        family = flat_torus | conformal_torus | revolution
        lattice = a1, a2; b1, b2            # tori
        grid = 48                           # conformal_torus sample grid
        modes = amp:kx:ky:phase, ...        # conformal_torus closed-form field
        field_file = u.csv                  # or: N x M samples of u
        profile = sphere | capped_cylinder | samples
        radius = 1.0                        # sphere
        cylinder_length = 4.0               # capped_cylinder
        profile_file = f.csv                # samples: rows "s, f"
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"surface file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string("[surface]\n" + path.read_text())
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    cfg = cp["surface"]
    family = cfg.get("family", "").strip()
    try:
        if family in ("flat_torus", "conformal_torus"):
            vals = _floats(cfg["lattice"])
            if len(vals) != 4:
                raise ConfigError("lattice needs four numbers")
            basis = np.array(vals).reshape(2, 2)
            if family == "flat_torus":
                return FlatTorus(basis)
            if "field_file" in cfg:
                samples = np.loadtxt(path.parent / cfg["field_file"], delimiter=",")
                return ConformalTorus(basis, samples)
            modes = []
            for tok in cfg.get("modes", "").split(","):
                if tok.strip():
                    a, kx, ky, ph = (float(t) for t in tok.split(":"))
                    modes.append((a, kx, ky, ph))
            return ConformalTorus.from_modes(basis, modes, grid=cfg.getint("grid", 48))
        if family == "revolution":
            prof = cfg.get("profile", "sphere").strip()
            if prof == "sphere":
                return round_sphere(cfg.getfloat("radius", 1.0))
            if prof == "capped_cylinder":
                return capped_cylinder(cfg.getfloat("cylinder_length"))
            if prof == "samples":
                data = np.loadtxt(path.parent / cfg["profile_file"], delimiter=",")
                return SurfaceOfRevolution(SampledProfile(data[:, 0], data[:, 1]))
            raise ConfigError(f"unknown profile {prof!r}")
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad surface file {path}: {exc}") from exc
    raise ConfigError(f"unknown family {family!r}")
