import math

import numpy as np
import pytest

from ccurv import fixtures as fx
from ccurv import geometry as geo
from ccurv.curve import Config, DiscreteCurve, Region, ac_functional, detect_node, length
from ccurv.errors import ConfigError, MultipleNodes, NoNegativeDirection
from ccurv.minmax import (Sweepout, competitor_bound_positive, competitor_sweepout_config1,
                          cut_and_paste, initial_family, pull_tight_width, sweepout_max)
from ccurv.shortening import BirkhoffConfig, birkhoff_map


def _polyline(surface, corners, per_side=32):
    pts = [np.asarray(corners[0], float)]
    for a, b in zip(corners[:-1], corners[1:]):
        t = np.linspace(0, 1, per_side + 1)[1:, None]
        pts.extend(np.asarray(a, float) + t * (np.asarray(b, float) - np.asarray(a, float)))
    return DiscreteCurve(surface, np.array(pts), closed=False)


def _lens(alpha, c=1.0, m=128):
    cv, info = fx.lens_figure_eight(c, alpha, m=m)
    region = Region(cv)
    return c, cv, info, region, detect_node(cv, region)


@pytest.fixture(scope="module")
def lens():
    return _lens(math.pi / 2)


# -- sweepout_max ----------------------------------------------------------

def test_concentric_circles_against_scan():
    T = geo.FlatTorus.square(0.5)
    radii = np.linspace(0.02, 0.48, 47)
    slices = [Region.empty(T)] + [fx.disk(T, (0.0, 0.0), r, n=512) for r in radii] + [Region.full(T)]
    sw = Sweepout(slices, np.linspace(0, 1, len(slices)))
    est = sweepout_max(sw, c=1.0)
    scan = 2 * np.pi * radii - np.pi * radii**2
    assert est.value == pytest.approx(scan.max(), abs=1e-3)
    assert est.index == 1 + int(np.argmax(scan))
    assert sw.check_endpoints()


def test_trivial_sweepout():
    T = geo.FlatTorus.square(1.0)
    est = sweepout_max(Sweepout([Region.empty(T)], [0.0]), c=1.0)
    assert est.value == 0.0 and est.index == 0


def test_latitude_sweepout_peaks_at_equator():
    rhos = np.linspace(0.1, math.pi - 0.1, 59)  # midpoint is the equator
    slices = [fx.sphere_cap(r) for r in rhos]
    est = sweepout_max(Sweepout(slices, np.linspace(0, 1, len(slices))), c=0.0)
    assert est.value == pytest.approx(2 * np.pi, abs=1e-3)
    assert rhos[est.index] == pytest.approx(math.pi / 2)


def test_sweepout_parameters_validated():
    T = geo.FlatTorus.square(1.0)
    with pytest.raises(ValueError):
        Sweepout([Region.empty(T), Region.full(T)], [0.5, 0.2])
    with pytest.raises(ValueError):
        Sweepout([Region.empty(T)], [0.0, 1.0])


# -- pull_tight_width --------------------------------------------------------

@pytest.fixture(scope="module")
def rectangle():
    P = fx.plane()
    region = Region(fx.polygon(P, [(0, 0), (1, 0), (1, 0.5), (0, 0.5)]), witness=(0.5, 0.25))
    bottom = _polyline(P, [(0, 0), (1, 0)], per_side=64)
    top = _polyline(P, [(0, 0), (0, 0.5), (1, 0.5), (1, 0)])
    return P, region, bottom, top


def test_rectangle_width_is_degenerate(rectangle):
    P, region, bottom, top = rectangle
    est = pull_tight_width((0, 0), (1, 0), region, (bottom, top), BirkhoffConfig(L=6, r0=1.0),
                           slices=8, tol=1e-6, check_convex=False)
    assert est.degenerate and not est.mountain_pass
    assert est.w0 == pytest.approx(2.0, abs=1e-9)
    assert est.value <= 2.0 + 1e-9
    assert est.family.check_endpoints()


def test_pull_tight_max_is_non_increasing(rectangle):
    P, region, bottom, top = rectangle
    trace = []
    pull_tight_width((0, 0), (1, 0), region, (bottom, top), BirkhoffConfig(L=6, r0=1.0),
                     slices=8, tol=1e-6, check_convex=False, refine=False, trace=trace)
    maxima = np.array([m for _, m, _, _ in trace])
    assert len(maxima) >= 2
    assert np.all(np.diff(maxima) <= 1e-12)


def test_birkhoff_slices_shorten_individually(rectangle):
    P, region, bottom, top = rectangle
    fam = initial_family(bottom, top, slices=6)
    cfg = BirkhoffConfig(L=6, r0=1.0, region=region)
    for cv in fam.slices[1:-1]:
        lens = [length(cv)]
        for _ in range(4):
            cv = birkhoff_map(cv, cfg)
            lens.append(length(cv))
        assert np.all(np.diff(lens) <= 1e-12)


def test_initial_family_is_pinned(rectangle):
    P, region, bottom, top = rectangle
    fam = initial_family(bottom, top, slices=9)
    assert fam.kind == "path" and fam.check_endpoints()
    assert fam.slices[0] is bottom and fam.slices[-1] is top
    with pytest.raises(ValueError):
        initial_family(bottom, _polyline(P, [(0, 0), (0, 1)]))


def test_convexity_precondition(rectangle):
    P = fx.plane()
    th = 2 * np.pi * np.arange(400) / 400
    r = 1 + 0.4 * np.cos(3 * th)
    star = Region(DiscreteCurve(P, np.stack([r * np.cos(th), r * np.sin(th)], -1)), witness=(0, 0))
    a = _polyline(P, [(1.4, 0.0), (0.0, 0.0)])
    with pytest.raises(ConfigError):
        pull_tight_width((1.4, 0.0), (0.0, 0.0), star, (a, a), slices=4)


# -- cut_and_paste -----------------------------------------------------------

def test_zero_scale_is_identity(lens):
    c, cv, info, region, node = lens
    for sign in ("plus", "minus"):
        res = cut_and_paste(region, node, 0.0, 0.0, sign, c=c)
        assert abs(res.ac - ac_functional(region, c)) < 1e-8
        assert res.decrease == 0.0


@pytest.mark.parametrize("r", [0.03, 0.06, 0.1])
def test_plus_chords_shorter_than_wedge_arcs(lens, r):
    c, cv, info, region, node = lens
    res = cut_and_paste(region, node, 0.0, r, "plus", c=c)
    before = sum(length(b, "chord") for b in region.boundary)
    after = sum(length(b, "chord") for b in res.region.boundary)
    # each branch of radius 1/c leaves the ball after an arc of 2 asin(rc/2)/c
    arcs = 4 * 2 * math.asin(r * c / 2) / c
    p = res.points - node.point
    # plus joins the exits across the two complement sectors, above and below the node
    chords = sum(np.linalg.norm(np.subtract(*p[p[:, 1] * sgn > 0])) for sgn in (1, -1))
    assert chords < arcs
    assert before - after == pytest.approx(arcs - chords, abs=2e-3 * r)
    assert res.decrease > 0


def test_surgery_continuity(lens):
    c, cv, info, region, node = lens
    phi = fx.lens_bump(info)
    s_vals = np.linspace(0.0, 0.02, 5)
    r_vals = np.linspace(0.02, 0.1, 5)
    for sign in ("plus", "minus"):
        ac = np.array([[cut_and_paste(region, node, s, r, sign, phi=phi, c=c).ac for r in r_vals]
                       for s in s_vals])
        ds = np.abs(np.diff(ac, axis=0)) / np.diff(s_vals)[0]
        dr = np.abs(np.diff(ac, axis=1)) / np.diff(r_vals)[0]
        assert max(ds.max(), dr.max()) < 10.0


def test_surgery_rejects_bad_arguments(lens):
    c, cv, info, region, node = lens
    with pytest.raises(ValueError):
        cut_and_paste(region, node, 0.0, 0.05, "sideways")
    with pytest.raises(ValueError):
        cut_and_paste(region, node, 0.0, -0.1, "plus")


# -- competitor sweepouts --------------------------------------------------

def test_zero_test_function_has_no_negative_direction(lens):
    c, cv, info, region, node = lens
    with pytest.raises(NoNegativeDirection):
        competitor_sweepout_config1(region, node, np.zeros(cv.n), c)


def test_competitor_margin_grows_with_instability():
    margins, qs = [], []
    for alpha in (math.pi / 3, math.pi / 2, 2 * math.pi / 3):
        c, cv, info, region, node = _lens(alpha)
        assert node.config is Config.CONFIG1
        sw = competitor_sweepout_config1(region, node, fx.lens_bump(info), c, eps=0.05, r_c=0.1,
                                         contract=False)
        margins.append(sw.meta["margin"])
        qs.append(abs(sw.meta["second_variation"]))
    order = np.argsort(qs)
    assert min(margins) > 0
    assert np.all(np.diff(np.array(margins)[order]) > 0)


def test_uniform_push_splits_the_node():
    # moving both lenses outward creates two crossings, so there is no single surgery centre
    c, cv, info, region, node = _lens(math.pi / 2)
    with pytest.raises(MultipleNodes):
        competitor_sweepout_config1(region, node, np.ones(cv.n), c, contract=False)


def test_competitor_slices_are_continuous(lens):
    c, cv, info, region, node = lens
    sw = competitor_sweepout_config1(region, node, fx.lens_bump(info), c, eps=0.05, r_c=0.2)
    assert sw.slices[0].kind == "empty"
    assert sw.meta["max"] < sw.meta["base"]
    jumps = sw.area_jumps()
    surgery = np.array([lab[0] != "contract" for lab in sw.meta["labels"]])
    assert np.max(jumps[surgery[1:]]) < 0.02
    # the contraction prefix is sampled every few flow steps
    assert np.max(jumps) < 0.2 * max(s.area() for s in sw.slices)
    assert not sw.meta["complete"]


# -- three-path bound --------------------------------------------------------

def test_sphere_touching_disks_bound():
    R = 3.0
    S = geo.round_sphere(R).plane_chart()
    cv = fx.touching_disks(S, 0.5, 0.6)
    region = Region(cv, witness=(0.0, 3.0))
    bound = competitor_bound_positive(
        region, 0.25, 1 / R**2, BirkhoffConfig(L=8, r0=4.0), slices=16,
        family=fx.touching_pencil_family(S, 0.5, 0.6, slices=16), tol=1e-8)
    # the widest loop through the contact point is a great circle
    assert bound.value == pytest.approx(2 * math.pi * R, rel=0.02)
    assert bound.consistent
    assert bound.path1_max <= bound.length1 + 1e-9
    assert bound.path3_max <= bound.length2 + 1e-9


def test_bound_needs_positive_curvature(lens):
    c, cv, info, region, node = lens
    with pytest.raises(ConfigError):
        competitor_bound_positive(region, c, 0.0)
