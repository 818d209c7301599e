"""Sweepouts, pulled-tight width estimates and cut-and-paste competitors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import geometry as geo
from ._polygon import shoelace
from .curve import (Config, DiscreteCurve, NodeData, PerturbationFamily, Region, _tangents,
                    _signed_area, ac_functional, detect_node, geodesic_curvature, length,
                    second_variation, split_at_node)
from .errors import (ConfigError, IterationBudget, MonotonicityViolation, NoNegativeDirection,
                     OrderingAmbiguous, ScaleTooLarge)
from .shortening import (BirkhoffConfig, _geodesic_fraction, birkhoff_map, constant_curvature_arc,
                         constant_speed_points, csf_path_to_point, curve_distance,
                         geodesic_residual)

__all__ = [
    "Sweepout", "WidthEstimate", "SurgeryResult", "PositiveBound", "sweepout_max",
    "pull_tight_width", "cut_and_paste", "competitor_sweepout_config1",
    "competitor_bound_positive", "initial_family",
]


@dataclass
class Sweepout:
    """Ordered slices (regions or pinned curves) with parameters in [0, 1]."""

    slices: list
    params: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if len(self.slices) != len(self.params) or len(self.slices) == 0:
            raise ValueError("one parameter per slice expected")
        if np.any(np.diff(self.params) < 0) or self.params[0] < 0 or self.params[-1] > 1:
            raise ValueError("parameters must be nondecreasing in [0, 1]")

    @property
    def kind(self):
        return "region" if isinstance(self.slices[0], Region) else "path"

    def values(self, c=None):
        """A^c per slice (region sweepouts) or length per slice (path sweepouts)."""
        if self.kind == "path":
            return np.array([length(s) for s in self.slices])
        return np.array([_ac(s, c) for s in self.slices])

    def area_jumps(self):
        """Area differences between adjacent region slices."""
        if self.kind != "region":
            raise ValueError("area continuity applies to region sweepouts")
        a = np.array([s.area() for s in self.slices])
        return np.abs(np.diff(a))

    def check_endpoints(self):
        if self.kind == "path":
            ends = np.array([[s.vertices[0], s.vertices[-1]] for s in self.slices])
            return bool(np.allclose(ends, ends[0], atol=1e-12))
        return self.slices[0].kind == "empty" and self.slices[-1].kind == "full"


@dataclass
class WidthEstimate:
    """Maximum of a sweepout with its location and the achieving slice's residual."""

    value: float
    index: int
    residual: float
    w0: float | None = None
    degenerate: bool = False
    upper: bool = True
    rounds: int = 0
    family: Sweepout | None = None

    @property
    def mountain_pass(self):
        return not self.degenerate


def _ac(region, c):
    if region.kind == "empty":
        return 0.0
    if region.kind == "full":
        return -c * region.surface.total_area
    if c == 0:
        return region.boundary_length()
    return ac_functional(region, c)


def _region_residual(region, c):
    if region.kind != "curves":
        return 0.0
    cv = region.boundary[0]
    k = geodesic_curvature(cv, region)
    return float(np.max(np.abs(k - c)))


def sweepout_max(sw, c=0.0):
    """Largest A^c (region slices) or length (path slices) over a sweepout."""
    vals = sw.values(c)
    i = int(np.argmax(vals))
    res = geodesic_residual(sw.slices[i]) if sw.kind == "path" else _region_residual(sw.slices[i], c)
    return WidthEstimate(float(max(vals[i], 0.0) if sw.kind == "path" else vals[i]), i, res)


# --------------------------------------------------------------------------
# Pulled-tight path families
# --------------------------------------------------------------------------

def initial_family(gamma1, gamma2, slices=64, samples=129, mode="auto"):
    """Pinned path family from ``gamma1`` to ``gamma2`` (chart interpolation).

    ``mode='chord'`` contracts each endpoint curve linearly onto the chord
    ``p -> q`` (first half from ``gamma1``, second half out to ``gamma2``);
    ``'linear'`` interpolates the two curves directly.  ``'auto'`` uses the
    chord unless ``p = q``.
    """
    p, q = gamma1.vertices[0], gamma1.vertices[-1]
    if not (np.allclose(gamma2.vertices[0], p) and np.allclose(gamma2.vertices[-1], q)):
        raise ValueError("endpoint curves must share their endpoints")
    if mode == "auto":
        mode = "linear" if np.allclose(p, q) else "chord"
    t = np.linspace(0.0, 1.0, samples)
    g1 = constant_speed_points(gamma1, t)
    g2 = constant_speed_points(gamma2, t)
    chord = p + t[:, None] * (q - p)
    taus = np.linspace(0.0, 1.0, slices)
    out = []
    for tau in taus:
        if mode == "linear":
            v = (1 - tau) * g1 + tau * g2
        elif tau <= 0.5:
            v = (1 - 2 * tau) * g1 + 2 * tau * chord
        else:
            v = (2 * tau - 1) * g2 + (2 - 2 * tau) * chord
        v[0], v[-1] = p, q
        out.append(gamma1.replace(v, corners=()))
    out[0], out[-1] = gamma1, gamma2
    return Sweepout(out, taus, {"init": mode})


def pull_tight_width(p, q, region, endpoints, cfg=BirkhoffConfig(), slices=64, tol=1e-7,
                     max_rounds=5000, check_convex=True, family=None, refine=True,
                     max_slices=None, patience=30, trace=None):
    """Width of a region between two pinned boundary arcs via Birkhoff pull-tight.

    Every interior slice of an initial family is iterated with the Birkhoff
    map until the largest slice length decreases by less than ``tol`` per
    round.  ``value`` is the maximal interior length, ``w0`` the maximum with
    the endpoint lengths; ``degenerate`` is set when ``w0`` is attained by an
    endpoint curve.

    Slices are iterated independently, so neighbours can drift apart near
    an unstable geodesic.  With ``refine`` the family is kept a sweepout:
    a geodesic-midpoint slice is inserted wherever two neighbours separate
    by more than the largest initial gap (up to ``max_slices``, default four
    times the initial count) and slices are dropped where they bunch up.
    Near such a saddle the max only fluctuates, so the loop also stops once
    the smallest max seen has not improved by ``tol`` for ``patience``
    rounds.
    """
    g1, g2 = endpoints
    p, q = np.asarray(p, float), np.asarray(q, float)
    for g in (g1, g2):
        if not (np.allclose(g.vertices[0], p) and np.allclose(g.vertices[-1], q)):
            raise ValueError("endpoint curves must run from p to q")
    if check_convex:
        for cv in region.boundary:
            k = geodesic_curvature(cv, region)
            if float(np.nanmin(k)) < -1e-6:
                raise ConfigError("region boundary is not convex toward the region")
    if cfg.region is None:
        cfg = BirkhoffConfig(cfg.L, cfg.r0, cfg.tol, region, cfg.samples_per_chord, cfg.max_vertices)
    fam = family if family is not None else initial_family(g1, g2, slices)
    cur = list(fam.slices)
    params = list(fam.params)
    cap = 4 * len(cur) if max_slices is None else max_slices
    inner = cur[1:-1]
    refine = refine and len(inner) >= 2
    gap = max(curve_distance(a, b) for a, b in zip(inner[:-1], inner[1:])) if refine else np.inf
    lens = np.array([length(s) for s in cur])
    prev = best = float(np.max(lens[1:-1]))
    stall = 0
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        for i in range(1, len(cur) - 1):
            cur[i] = birkhoff_map(cur[i], cfg)
        inserted = _refine_family(cur, params, gap, cap) if refine else 0
        lens = np.array([length(s) for s in cur])
        m = float(np.max(lens[1:-1]))
        if trace is not None:
            trace.append((rounds, m, len(cur), inserted))
        if not inserted and prev - m < tol:
            break
        # near an unstable geodesic slices keep leaving the saddle and being
        # reinserted; the max then only fluctuates
        if m < best - tol:
            best, stall = m, 0
        else:
            stall += 1
            if stall >= patience:
                break
        prev = m
    else:
        raise IterationBudget(f"pull-tight did not settle in {max_rounds} rounds")
    i = 1 + int(np.argmax(lens[1:-1]))
    value = float(lens[i])
    l1, l2 = float(lens[0]), float(lens[-1])
    w0 = max(l1, value, l2)
    degenerate = value <= max(l1, l2) * (1 + 1e-9)
    return WidthEstimate(value, i, geodesic_residual(cur[i]), w0=w0, degenerate=degenerate,
                         rounds=rounds, family=Sweepout(cur, params, dict(fam.meta)))


def _refine_family(cur, params, gap, cap, samples=129):
    """Keep neighbouring interior slices between ``gap / 4`` and ``gap`` apart.

    A geodesic-midpoint slice is inserted between neighbours farther apart
    than ``gap``; an interior slice is dropped when its neighbours are
    closer than ``gap / 4``.  Returns the number of insertions.
    """
    inserted = 0
    i = 1
    while i < len(cur) - 2:  # endpoint curves are fixed, their neighbours may pull away
        a, b = cur[i], cur[i + 1]
        if len(cur) < cap and curve_distance(a, b) > gap:
            t = np.linspace(0.0, 1.0, samples)
            pa, pb = constant_speed_points(a, t), constant_speed_points(b, t)
            mid = _geodesic_fraction(a.surface, pa, pb, np.full(samples, 0.5))
            mid[0], mid[-1] = a.vertices[0], a.vertices[-1]
            cur.insert(i + 1, a.replace(mid))
            params.insert(i + 1, 0.5 * (params[i] + params[i + 1]))
            inserted += 1
        else:
            i += 1
    i = 1
    while i < len(cur) - 1 and len(cur) > 3:
        if curve_distance(cur[i - 1], cur[i + 1]) < 0.25 * gap:
            del cur[i]
            del params[i]
        else:
            i += 1
    return inserted


# --------------------------------------------------------------------------
# Cut-and-paste surgery
# --------------------------------------------------------------------------

@dataclass
class SurgeryResult:
    """Modified region at scale ``r`` and step ``s`` with its A^c values."""

    region: Region
    sign: str
    s: float
    r: float
    ac: float
    ac_base: float
    points: np.ndarray | None = None

    @property
    def decrease(self):
        return self.ac_base - self.ac

    @property
    def certified(self):
        return self.r == 0 or self.decrease > 0


def _ball_exit(curve, t, x, r, forward):
    """First parameter along ``curve`` from ``t`` at metric distance ``r`` from ``x``."""
    n = curve.n
    V = curve.vertices
    surf = curve.surface

    def point(u):
        i = int(math.floor(u)) % n
        f = u - math.floor(u)
        return (1 - f) * V[i] + f * V[(i + 1) % n]

    def dist(u):
        return geo.distance(surf, x, point(u))

    step = 1.0 if forward else -1.0
    u = math.floor(t) + 1 if forward else math.ceil(t) - 1
    if abs(u - t) < 1e-12:
        u += step
    prev = t
    for _ in range(n):
        if dist(u) >= r:
            root = optimize.brentq(lambda w: dist(w) - r, min(prev, u), max(prev, u), xtol=1e-14)
            return root
        prev, u = u, u + step
    raise ScaleTooLarge("the ball contains the whole curve")


def _piece(curve, u, v):
    """Points of ``curve`` from parameter ``u`` forward to ``v`` (endpoints interpolated)."""
    n = curve.n
    V = curve.vertices
    if v <= u:
        v += n

    def point(w):
        i = int(math.floor(w))
        f = w - i
        return (1 - f) * V[i % n] + f * V[(i + 1) % n]

    idx = np.arange(math.floor(u) + 1, math.ceil(v))
    idx = idx[(idx > u + 1e-12) & (idx < v - 1e-12)]
    return np.vstack([point(u)[None], V[idx % n], point(v)[None]])


def _sector_labels(region, x, dirs, scale):
    """Angular order of the four branch directions and region membership of each sector."""
    surf = region.surface
    g = surf.metric(x)
    A = np.linalg.cholesky(g).T
    w = dirs @ A.T
    ang = np.arctan2(w[:, 1], w[:, 0])
    order = np.argsort(ang)
    inside = []
    for k in range(4):
        i, j = order[k], order[(k + 1) % 4]
        a0, a1 = ang[i], ang[j] + (2 * math.pi if k == 3 else 0.0)
        mid = 0.5 * (a0 + a1)
        v = np.linalg.solve(A, np.array([math.cos(mid), math.sin(mid)]))
        inside.append(bool(region.contains((x + scale * v)[None])[0]))
    return order, inside


def _witness(region, x, r):
    """A point of ``region`` well outside the ball at ``x``."""
    for cv in region.boundary:
        nrm = cv.surface.left_normal(cv.vertices, _tangents(cv))
        nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
        seg = np.linalg.norm(np.diff(cv.polyline(), axis=0), axis=1)
        h = 0.25 * float(np.min(seg[seg > 0]))
        d = geo.distance_batch(cv.surface, np.repeat(x[None], cv.n, 0), cv.vertices)
        for i in np.argsort(-d)[:4]:
            pts = cv.vertices[i] + np.array([h, -h])[:, None] * nrm[i]
            ok = region.contains(pts)
            if np.any(ok):
                return pts[int(np.argmax(ok))]
    raise OrderingAmbiguous("no witness point found outside the surgery ball")


def cut_and_paste(region, node, s, r, sign, phi=None, c=1.0, n_insert=17):
    """Cut-and-paste surgery at the node of ``region`` perturbed to step ``s``.

    ``region`` is perturbed along its normal by ``s * phi`` (``phi = 1`` by
    default); the node of the perturbed curve is the surgery centre.  Inside
    the metric ball of radius ``r`` the boundary is replaced either by the
    minimising geodesics across the two complementary sectors (``'plus'``,
    joining the two region sectors) or by arcs of constant curvature ``c``
    across the two region sectors (``'minus'``, separating them).
    """
    if sign not in ("plus", "minus"):
        raise ValueError("sign must be 'plus' or 'minus'")
    if r < 0:
        raise ValueError("r must be nonnegative")
    cv0 = region.boundary[0]
    if len(region.boundary) != 1 or np.any(cv0.shift):
        raise ValueError("a single null-homotopic boundary curve is required")
    phi = np.ones(cv0.n) if phi is None else np.asarray(phi, float)
    fam = PerturbationFamily(region, phi)
    reg_s = region if s == 0 else fam.region_at(s)
    ac_base = ac_functional(reg_s, c)
    if r == 0:
        return SurgeryResult(reg_s, sign, s, r, ac_base, ac_base)
    cv = reg_s.boundary[0]
    nd = node if s == 0 else detect_node(cv, reg_s)
    if nd is None or nd.kind == "tangent":
        raise OrderingAmbiguous("no transverse node to operate on")
    x = np.asarray(nd.point, float)
    t0, t1 = sorted((nd.t0, nd.t1))
    a0 = _ball_exit(cv, t0, x, r, False)
    b0 = _ball_exit(cv, t0, x, r, True)
    a1 = _ball_exit(cv, t1, x, r, False)
    b1 = _ball_exit(cv, t1, x, r, True)
    n = cv.n
    if not (t0 < b0 < a1 < t1 and (b1 < a0 + n if b1 > t1 else True)):
        raise OrderingAmbiguous("ball exits do not separate the branches")
    P1 = _piece(cv, b0, a1)
    P2 = _piece(cv, b1, a0)
    ends = {"a0": P2[-1], "b0": P1[0], "a1": P1[-1], "b1": P2[0]}
    names = ["a0", "b0", "a1", "b1"]
    dirs = np.array([ends[k] - x for k in names])
    order, inside = _sector_labels(reg_s, x, dirs, 0.5 * r)
    if sum(inside) != 2 or inside[0] == inside[1]:
        raise OrderingAmbiguous("sectors do not alternate between the region and its complement")
    want = inside if sign == "minus" else [not v for v in inside]
    pairs = [frozenset((names[order[k]], names[order[(k + 1) % 4]])) for k in range(4) if want[k]]
    surf = cv.surface

    def join(a, b):
        pa, pb = ends[a], ends[b]
        if sign == "plus":
            return geo.geodesic_between(surf, pa, pb, n_insert)
        # region side is away from x
        mid = 0.5 * (pa + pb)
        d, e = pb - pa, x - mid
        left = d[0] * e[1] - d[1] * e[0] < 0
        return constant_curvature_arc(surf, pa, pb, c if left else -c, n_insert)

    oriented = {frozenset(("a1", "b0")), frozenset(("a0", "b1"))}
    if set(pairs) == oriented:
        loops = [np.vstack([P1, join("a1", "b0")[1:-1]]), np.vstack([P2, join("a0", "b1")[1:-1]])]
    elif set(pairs) == {frozenset(("a0", "a1")), frozenset(("b0", "b1"))}:
        loops = [np.vstack([P1, join("a1", "a0")[1:-1], P2[::-1], join("b1", "b0")[1:-1]])]
    else:
        raise OrderingAmbiguous("sector pairing is not a resolution of the crossing")
    curves = []
    for lp in loops:
        keep = np.ones(len(lp), bool)
        keep[1:] = np.linalg.norm(np.diff(lp, axis=0), axis=1) > 1e-14
        lp = lp[keep]
        if np.linalg.norm(lp[-1] - lp[0]) < 1e-14:
            lp = lp[:-1]
        curves.append(DiscreteCurve(surf, lp, corners=(0,)))
    out = Region(curves, witness=_witness(reg_s, x, r))
    pts = np.array([ends[k] for k in names])
    return SurgeryResult(out, sign, s, r, ac_functional(out, c), ac_base, pts)


# --------------------------------------------------------------------------
# Competitor sweepouts
# --------------------------------------------------------------------------

def _loop_measures(cv):
    """Length and enclosed area of a simple loop, chord-consistent on flat charts."""
    if isinstance(cv.surface, geo.FlatTorus):
        return length(cv, "chord"), abs(shoelace(cv.vertices))
    return length(cv, "geodesic"), abs(_signed_area(cv))


def _loop_ac(curves, c):
    total = 0.0
    for cv in curves:
        ell, a = _loop_measures(cv)
        total += ell - c * a
    return total


def _contract_to_empty(region, c, vertices=64, steps_per_slice=25, max_steps=100000, tol=1e-9):
    """Heuristic path from a union of disjoint simple loops down to the empty set.

    Each loop is resampled and moves inward at speed ``max(kappa, c)``; A^c
    must not increase from one step to the next.  Returns the slices from the
    empty set up to ``region`` and their A^c values.
    """
    from .curve import _neighbours
    from .shortening import resample_polyline
    curves = []
    for cv in region.boundary:
        cv = resample_polyline(cv, min(cv.n, vertices))
        if _signed_area(cv) < 0:
            cv = cv.reversed()
        curves.append(cv)
    slices = [region, Region(tuple(curves), complement=False)]
    values = [ac_functional(region, c), _loop_ac(curves, c)]
    A0 = [_loop_measures(cv)[1] for cv in curves]
    alive = [True] * len(curves)
    last = values[-1]
    for step in range(max_steps):
        new = []
        for i, cv in enumerate(curves):
            if not alive[i]:
                new.append(cv)
                continue
            seg = np.linalg.norm(np.diff(cv.polyline(), axis=0), axis=1)
            kap = geodesic_curvature(cv, method="stencil")
            speed = np.maximum(kap, c)
            h = float(seg.min())
            dt = 0.4 * h * h / max(1.0, float(np.max(speed)) * h)
            prev, nxt = _neighbours(cv)
            nrm = cv.surface.left_normal(cv.vertices, nxt - prev)
            moved = cv.replace(cv.vertices + dt * speed[:, None] * nrm)
            if (step + 1) % 10 == 0:
                moved = resample_polyline(moved)
            if _signed_area(moved) <= 0 or _loop_measures(moved)[1] < 1e-4 * A0[i]:
                alive[i] = False
            new.append(moved)
        curves = new
        live = [cv for cv, a in zip(curves, alive) if a]
        val = _loop_ac(live, c) if live else 0.0
        if val > last + tol * max(1.0, abs(last)):
            raise MonotonicityViolation(f"A^c increased during contraction at step {step}")
        last = val
        if not live:
            slices.append(Region.empty(region.surface))
            values.append(0.0)
            break
        if (step + 1) % steps_per_slice == 0:
            slices.append(Region(tuple(live), complement=False))
            values.append(val)
    else:
        raise MonotonicityViolation("contraction did not reach the empty set")
    return slices[::-1], values[::-1]


def competitor_sweepout_config1(region, node, phi, c, eps=None, r_c=None, grid=6, contract=True):
    """Competitor sweepout below A^c(region) at a Configuration-1 node.

    Slices follow the cut-and-paste path: minus-surgeries at scale ``r_c``
    while ``s`` runs 0 -> eps, minus-surgeries at ``s = eps`` while ``r``
    shrinks to 0, plus-surgeries while ``r`` grows back to ``r_c``, then
    plus-surgeries at ``r_c`` while ``s`` returns to 0.  With ``contract`` a
    heuristic contraction from the empty set is prepended.  The closing path
    to the whole surface is not constructed (``meta['complete']`` is False).
    """
    if node is None or node.config != Config.CONFIG1:
        raise ValueError("a Configuration-1 node is required")
    cv = region.boundary[0]
    phi = np.asarray(phi, float)
    q = second_variation(cv, node, phi, c)
    if not q < 0:
        raise NoNegativeDirection(f"second variation {q:.4g} is not negative")
    seg = np.linalg.norm(np.diff(cv.polyline(), axis=0), axis=1)
    L = float(np.sum(seg))
    r_c = 0.05 * L if r_c is None else r_c
    eps = 0.02 * L / math.sqrt(abs(q) + 1.0) if eps is None else eps
    s_grid = np.linspace(0.0, eps, grid)
    r_grid = np.linspace(r_c, 0.0, grid)
    steps = []
    steps += [("minus", s, r_c) for s in s_grid]
    steps += [("minus", eps, r) for r in r_grid[1:]]
    steps += [("plus", eps, r) for r in r_grid[::-1][1:]]
    steps += [("plus", s, r_c) for s in s_grid[::-1][1:]]
    slices, values, labels = [], [], []
    for sign, s, r in steps:
        res = cut_and_paste(region, node, s, r, sign, phi=phi, c=c)
        slices.append(res.region)
        values.append(res.ac)
        labels.append((sign, float(s), float(r)))
    meta = {"complete": False, "eps": eps, "r_c": r_c, "second_variation": q}
    if contract:
        pre, pre_vals = _contract_to_empty(slices[0], c)
        slices = pre[:-1] + slices
        values = pre_vals[:-1] + values
        labels = [("contract", 0.0, 0.0)] * (len(pre) - 1) + labels
    base = ac_functional(region, c)
    values = np.array(values)
    meta.update(base=base, max=float(values.max()), margin=float(base - values.max()),
                values=values, labels=labels)
    return Sweepout(slices, np.linspace(0.0, 1.0, len(slices)), meta)


@dataclass
class PositiveBound:
    """Upper bound ``max{length(gamma1), w0, length(gamma2)}`` for the width."""

    value: float
    length1: float
    width: WidthEstimate
    length2: float
    lower: float | None
    consistent: bool | None
    path1_max: float
    path3_max: float

    def __float__(self):
        return self.value


def competitor_bound_positive(region, c, min_k, cfg=BirkhoffConfig(), slices=32, **kw):
    """Three-path upper bound at a Configuration-2 node on a positively curved surface.

    Path 1 is curve shortening flow from ``gamma1`` to a point (reversed),
    path 2 the pulled-tight family from ``gamma1`` to ``gamma2`` and path 3
    the flow of ``gamma2`` to a point.  ``lower`` is the Gauss-Bonnet width
    lower bound, reported with a consistency flag.
    """
    if min_k <= 0:
        raise ConfigError("a positive curvature lower bound is required")
    cv = region.boundary[0]
    node = detect_node(cv, region)
    if node is None or node.config != Config.CONFIG2:
        raise ConfigError("a Configuration-2 node is required")
    g1, g2 = split_at_node(cv, node)
    x0 = np.asarray(node.point, float)
    path1 = csf_path_to_point(g1)
    path3 = csf_path_to_point(g2)

    def pinned(loop):
        v = np.vstack([loop.vertices, loop.vertices[:1] + loop.shift])
        return DiscreteCurve(loop.surface, v, closed=False)

    p1, p2 = pinned(g1), pinned(g2)
    est = pull_tight_width(x0, x0, region, (p1, p2.reversed() if _needs_reverse(p1, p2) else p2),
                           cfg, slices=slices, check_convex=False, **kw)
    l1, l2 = length(g1), length(g2)
    value = max(l1, est.value, l2)
    from .criteria import gauss_bonnet_bounds
    lower = gauss_bonnet_bounds(min_k, c).width_lower
    return PositiveBound(value, l1, est, l2, lower, bool(value >= lower),
                         float(max(path1.lengths)), float(max(path3.lengths)))


def _needs_reverse(p1, p2):
    """Match orientations of two loops pinned at the same point (same turning sense)."""
    s1 = np.sign(_signed_area(DiscreteCurve(p1.surface, p1.vertices[:-1])))
    s2 = np.sign(_signed_area(DiscreteCurve(p2.surface, p2.vertices[:-1])))
    return s1 != s2
