"""Closed-form thresholds, the comparison criteria and the traced condition regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, RootBracketFailure

__all__ = [
    "ct", "r0", "Criterion", "CriteriaReport", "evaluate_criteria", "positive_conditions",
    "RegionBoundaryTrace", "figure1_region", "figure1_upper", "figure1_lower_m",
    "figure1_corner", "Figure2Curves", "figure2_curves", "GaussBonnetBounds",
    "gauss_bonnet_bounds", "EtaEstimate", "isoperimetric_profile", "isoperimetric_eta",
]

_BISECT_TOL = 1e-12


def ct(k, r):
    """Curvature of the geodesic circle of radius ``r`` in the model plane of curvature ``k``.

    Parameters
    ----------
    k : float
        Constant Gaussian curvature of the model plane.
    r : float
        Radius, ``r > 0`` and ``r sqrt(k) < pi`` when ``k > 0``.

    Returns
    -------
    float
        ``sqrt(k) cot(r sqrt(k))``, ``1/r`` or ``sqrt(-k) coth(r sqrt(-k))``.

    Examples
    --------
    >>> ct(0.0, 2.0)
    0.5
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if k > 0:
        s = math.sqrt(k)
        if r * s >= math.pi:
            raise DomainError("r sqrt(k) must be below pi")
        x = r * s
        if x < 1e-4:  # series keeps the k -> 0 limit continuous
            return (1.0 / r) * (1 - x * x / 3 - x**4 / 45)
        return s / math.tan(x)
    if k == 0:
        return 1.0 / r
    s = math.sqrt(-k)
    x = r * s
    if x < 1e-4:
        return (1.0 / r) * (1 + x * x / 3 - x**4 / 45)
    return s / math.tanh(x)


def r0(c, k):
    """Radius of the circle of curvature ``c`` in the model plane of curvature ``k``.

    The inverse of :func:`ct` in ``r``; requires ``c > 0`` and ``k > -c^2``.
    """
    if not c > 0:
        raise DomainError("c must be positive")
    if k <= -c * c:
        raise DomainError("k must exceed -c^2")
    if k > 0:
        s = math.sqrt(k)
        return math.atan2(s, c) / s  # arccot(c / s) / s
    if k == 0:
        return 1.0 / c
    s = math.sqrt(-k)
    return math.atanh(s / c) / s  # arccoth(c / s) / s


# --------------------------------------------------------------------------
# Criteria report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Criterion:
    """A single criterion: ``holds`` is equivalent to ``margin > 0`` (or ``>= 0`` when ``closed``)."""

    name: str
    margin: float
    closed: bool = False

    @property
    def holds(self):
        return self.margin >= 0 if self.closed else self.margin > 0


@dataclass
class CriteriaReport:
    """Inputs and per-criterion margins.  Criteria that do not apply are absent."""

    min_k: float
    max_k: float
    inj: float
    c: float
    area: float | None
    criteria: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.criteria[name]

    @property
    def theorem_general(self):
        return self.criteria["general"].holds

    def rows(self):
        return [(k, v.margin, v.holds) for k, v in self.criteria.items()]


def positive_conditions(m, c):
    """Margins of the two positive-curvature conditions, with ``max K = 1``.

    Returns ``(margin1, margin2)``: the first holds when ``margin1 > 0``
    (``c > sqrt(m) cot(pi sqrt(m))``), the second when ``margin2 >= 0``.
    """
    s = math.sqrt(m)
    upper = s / math.tan(math.pi * s) if s < 1 else -math.inf
    q = c * (1 - 2 * c) / m
    lhs = max(2 * math.pi * q, math.pi * q + math.atan2(s, c) / s)
    return c - upper, 2 * math.pi - lhs


def evaluate_criteria(stats, c, area=None):
    """Evaluate every threshold for a surface summary and a curvature ``c``.

    ``stats`` needs ``minK``, ``maxK`` and ``inj``.  Positive-curvature
    criteria are evaluated after scaling the metric so that ``max K = 1``.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    mk, Mk, inj = float(stats.minK), float(stats.maxK), float(stats.inj)
    out = {}
    try:
        threshold = ct(mk, inj)
    except DomainError:
        threshold = 0.0  # r sqrt(k) >= pi: the model circle has no positive curvature
    out["general"] = Criterion("general", c - threshold)
    out["config1"] = Criterion("config1", c * c + mk, closed=True)
    out["config2"] = Criterion("config2", c * c - (math.pi**2 / (4 * inj * inj) - mk), closed=True)
    if mk > -c * c:
        # Configuration 2 needs 2 inj <= 2 R0(c, min K); a positive margin excludes it
        out["geodesic_loop"] = Criterion("geodesic_loop", inj - r0(c, mk))
    if mk > 0 and Mk > 0:
        m = mk / Mk
        cn = c / math.sqrt(Mk)
        m1, m2 = positive_conditions(m, cn)
        out["positive_1"] = Criterion("positive_1", m1)
        out["positive_2"] = Criterion("positive_2", m2, closed=True)
        out["positive"] = Criterion("positive", max(m1, m2), closed=True)
        gb = gauss_bonnet_bounds(m, cn)
        if area is not None:
            out["gb_area"] = Criterion("gb_area", gb.area_upper - area * Mk, closed=True)
        out["gb_width"] = Criterion("gb_width", gb.width_lower)
    return CriteriaReport(mk, Mk, inj, c, area, out)


# --------------------------------------------------------------------------
# Figure 1: positive-curvature condition region (max K = 1)
# --------------------------------------------------------------------------

def _bisect(f, a, b):
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if fa * fb > 0:
        raise RootBracketFailure(f"no sign change on [{a}, {b}]")
    return optimize.bisect(f, a, b, xtol=_BISECT_TOL, rtol=4 * np.finfo(float).eps, maxiter=500)


def figure1_upper(m):
    """Upper branch ``c = sqrt(m) cot(pi sqrt(m))``."""
    m = np.asarray(m, dtype=float)
    s = np.sqrt(m)
    return s / np.tan(np.pi * s)


def _cond2_lhs(m, c):
    s = math.sqrt(m)
    q = c * (1 - 2 * c) / m
    return max(2 * math.pi * q, math.pi * q + math.atan2(s, c) / s)


def figure1_lower_m(c):
    """Lower branch: the ``m`` where the second condition becomes active, for ``c`` in (0, 1/2)."""
    if not 0 < c < 0.5:
        raise DomainError("the lower branch is traced for 0 < c < 1/2")
    f = lambda m: 2 * math.pi - _cond2_lhs(m, c)  # increasing in m
    return _bisect(f, 1e-6, 1.0)


def figure1_corner():
    """Simultaneous root of ``m = c(1 - 2c)`` and the upper branch."""
    g = lambda c: c - float(figure1_upper(c * (1 - 2 * c)))
    c = _bisect(g, 0.05, 0.25)
    return c * (1 - 2 * c), c


@dataclass
class RegionBoundaryTrace:
    """Sampled ``(m, c)`` points on both boundary branches and their corner."""

    upper: np.ndarray
    lower: np.ndarray
    corner: tuple
    intercept: float

    def rows(self):
        """CSV rows ``(min K, c_upper, c_lower)``; blanks where a branch is not sampled."""
        out = [(m, c, None) for m, c in self.upper]
        out += [(m, None, c) for m, c in self.lower]
        return sorted(out, key=lambda r: r[0])


def figure1_region(grid=200):
    """Trace the boundary of the positive-curvature condition region.

    The upper branch is sampled for ``m`` up to the corner, the lower branch
    for ``c`` from 0 up to the corner.  Both together bound the region where
    neither condition holds.
    """
    mc, cc = figure1_corner()
    ms = np.linspace(mc / grid, mc, grid)
    upper = np.stack([ms, figure1_upper(ms)], -1)
    cs = np.linspace(cc / grid, cc, grid)
    lower = np.array([[figure1_lower_m(c), c] for c in cs])
    lower = np.vstack([[1.0 / 16, 0.0], lower])
    intercept = _bisect(lambda m: 2 * math.pi - math.pi / (2 * math.sqrt(m)), 1e-3, 1.0)
    return RegionBoundaryTrace(upper, lower, (mc, cc), intercept)


# --------------------------------------------------------------------------
# Figure 2: thresholds for curvature -1
# --------------------------------------------------------------------------

@dataclass
class Figure2Curves:
    inj: np.ndarray
    blue: np.ndarray
    red: np.ndarray

    def rows(self):
        return list(zip(self.inj, self.blue, self.red))


def figure2_curves(inj=None, grid=200):
    """``c = coth(inj)`` (blue) and ``c = (pi/2) inj^-1 (1 + inj^2 / (2 pi))`` (red)."""
    x = np.linspace(0.2, 10.0, grid) if inj is None else np.asarray(inj, dtype=float)
    if np.any(x <= 0):
        raise ValueError("injectivity radii must be positive")
    blue = 1.0 / np.tanh(x)
    red = (np.pi / 2) / x * (1 + x * x / (2 * np.pi))
    return Figure2Curves(x, blue, red)


# --------------------------------------------------------------------------
# Gauss-Bonnet bounds and the isoperimetric constant
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussBonnetBounds:
    area_upper: float
    width_lower: float
    area_upper_sharp: float | None = None
    violated: bool | None = None


def gauss_bonnet_bounds(min_k, c, area=None, boundary_length=None, alpha=None):
    """Area upper bound and width lower bound at a Configuration-2 node (``max K = 1``).

    With ``boundary_length`` and ``alpha`` the sharper bound
    ``(2 alpha - c length) / min K`` is also returned; ``violated`` compares
    a measured ``area`` against the bounds.
    """
    if not min_k > 0:
        raise ValueError("min K must be positive")
    area_upper = 2 * math.pi * (1 - 2 * c) / min_k
    width_lower = 4 * math.pi - 2 * math.pi * c * (1 - 2 * c) / min_k
    sharp = None
    if boundary_length is not None and alpha is not None:
        sharp = (2 * alpha - c * boundary_length) / min_k
    violated = None
    if area is not None:
        bound = area_upper if sharp is None else min(area_upper, sharp)
        violated = bool(area > bound)
    return GaussBonnetBounds(area_upper, width_lower, sharp, violated)


@dataclass(frozen=True)
class EtaEstimate:
    eta: float
    c1: float
    estimate: bool = True


def isoperimetric_profile(surface, a):
    """Lower bound for ``length / sqrt(area)`` over regions of area ``a``.

    Flat tori use disks and bands, round spheres use caps.  Other surfaces
    use the disk constant scaled by the curvature bound and a safety factor 0.5.
    """
    from . import geometry as geo
    a = np.asarray(a, dtype=float)
    if isinstance(surface, geo.FlatTorus):
        ell = 2 * surface.injectivity_radius
        return np.minimum(2 * np.sqrt(np.pi), 2 * ell / np.sqrt(a))
    if geo._is_round_plane(surface) or (isinstance(surface, geo.SurfaceOfRevolution)
                                         and isinstance(surface.profile, geo.SphereProfile)):
        R = surface.profile.R
        return np.sqrt(np.maximum(4 * np.pi - a / R**2, 0.0))
    st = geo.surface_stats(surface)
    kk = max(st.maxK, 0.0)
    return 0.5 * np.sqrt(np.maximum(4 * np.pi - kk * a, 0.0))


def isoperimetric_eta(surface, c):
    """``eta = min(c1^2 / c^2, area / 2)`` with ``c1`` from :func:`isoperimetric_profile`."""
    if not c > 0:
        raise ValueError("c must be positive")
    total = float(surface.total_area)
    a = np.linspace(total * 1e-6, total / 2, 2001)
    c1 = float(np.min(isoperimetric_profile(surface, a)))
    return EtaEstimate(min(c1 * c1 / (c * c), total / 2), c1)
