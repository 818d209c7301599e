import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccurv import fixtures as fx
from ccurv import geometry as geo
from ccurv.curve import (Config, DiscreteCurve, LiftVerdict, NodeData, PerturbationFamily, Region,
                         ac_functional, area, detect_node, embedded_lift_check, energy,
                         first_variation, gauss_bonnet_defect, geodesic_curvature, is_embedded,
                         length, second_variation, split_at_node)
from ccurv.errors import (AmbiguousSide, AngleDegenerate, MultipleNodes, NodeInSupport,
                          WrongFamily)


# length -----------------------------------------------------------------

def test_unit_circle_length(flat):
    assert length(fx.circle(flat, (0, 0), 1.0, n=256)) == pytest.approx(2 * math.pi, abs=1e-4)


def test_collapsed_curve_length(flat):
    cv = DiscreteCurve(flat, np.tile([0.3, 0.4], (16, 1)))
    assert length(cv) == 0.0


def test_sphere_latitude_length():
    cv = fx.sphere_latitude(math.pi / 4)
    assert length(cv) == pytest.approx(2 * math.pi * math.sin(math.pi / 4), abs=1e-4)
    assert length(cv, "chord") == pytest.approx(2 * math.pi * math.sin(math.pi / 4), abs=1e-4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=12, max_size=40))
def test_length_squared_below_energy(steps):
    # random reparametrization of a fixed arc of the unit circle
    t = np.concatenate([[0.0], np.cumsum(steps)])
    t = 2.0 * t / t[-1]
    cv = DiscreteCurve(fx.plane(), np.stack([np.cos(t), np.sin(t)], -1), closed=False)
    assert length(cv) ** 2 <= energy(cv) * (1 + 1e-12)


def test_length_energy_equality_at_constant_speed(flat):
    cv = DiscreteCurve(flat, np.stack([np.linspace(0, 1, 20), np.linspace(0, 2, 20)], -1), closed=False)
    assert energy(cv) == pytest.approx(length(cv) ** 2, rel=1e-12)


# area and A^c -------------------------------------------------------------

def test_unit_disk_area(flat):
    assert area(fx.disk(flat, (0, 0), 1.0)) == pytest.approx(math.pi, abs=1e-4)


def test_torus_minus_tiny_disk():
    T = geo.FlatTorus.square(0.5)
    eps = 0.05
    region = Region(fx.circle(T, (0.5, 0.5), eps), witness=(0.1, 0.1))
    assert region.complement
    assert area(region) == pytest.approx(1 - math.pi * eps**2, abs=1e-4)


@pytest.mark.parametrize("rho", [0.3, 1.0, 2.0])
def test_spherical_cap_area(rho):
    assert area(fx.sphere_cap(rho)) == pytest.approx(2 * math.pi * (1 - math.cos(rho)), abs=1e-4)


def test_ac_unit_disk(flat):
    assert ac_functional(fx.disk(flat, (0, 0), 1.0), 1.0) == pytest.approx(math.pi, abs=1e-3)


def test_ac_empty(flat):
    assert ac_functional(Region.empty(flat), 2.0) == 0.0


@pytest.mark.parametrize("rho,c", [(0.5, 0.3), (1.1, 1.0), (2.0, 2.5)])
def test_ac_spherical_cap(rho, c):
    want = 2 * math.pi * math.sin(rho) - 2 * math.pi * c * (1 - math.cos(rho))
    assert ac_functional(fx.sphere_cap(rho), c) == pytest.approx(want, abs=1e-3)


def test_witness_on_boundary_is_ambiguous(flat):
    with pytest.raises(AmbiguousSide):
        Region(fx.circle(flat, (0, 0), 1.0), witness=(1.0, 0.0))


def test_short_curve_rejected(flat):
    with pytest.raises(ValueError):
        DiscreteCurve(flat, np.zeros((5, 2)))


# curvature ----------------------------------------------------------------

def test_circle_curvature_toward_disk(flat):
    region = fx.disk(flat, (1.0, -2.0), 2.0)
    k = geodesic_curvature(region.boundary[0], region)
    np.testing.assert_allclose(k, 0.5, atol=1e-4)


def test_clockwise_circle_curvature_toward_disk(flat):
    cv = fx.circle(flat, (0, 0), 2.0, ccw=False)
    region = Region(cv, witness=(0.0, 0.0))
    np.testing.assert_allclose(geodesic_curvature(cv, region), 0.5, atol=1e-4)


def test_straight_line_curvature(flat):
    cv = DiscreteCurve(flat, np.stack([np.linspace(0, 1, 17), 0.5 * np.linspace(0, 1, 17)], -1),
                       closed=False)
    np.testing.assert_allclose(geodesic_curvature(cv)[1:-1], 0.0, atol=1e-6)


@pytest.mark.parametrize("rho", [0.4, math.pi / 4, 1.3])
def test_latitude_curvature(rho):
    region = fx.sphere_cap(rho)
    k = geodesic_curvature(region.boundary[0], region)
    np.testing.assert_allclose(k, 1 / math.tan(rho), atol=1e-4)


def test_curvature_sign_flips_with_side(flat):
    cv = fx.circle(flat, (0, 0), 0.7)
    inside = Region(cv, witness=(0.0, 0.0))
    outside = Region(cv, witness=(3.0, 3.0))
    np.testing.assert_allclose(geodesic_curvature(cv, inside), -geodesic_curvature(cv, outside))


# first variation ------------------------------------------------------------

@pytest.mark.parametrize("R,c", [(1 / 1.5, 1.5), (0.5, 1.0), (2.0, 0.25)])
def test_first_variation_on_circles(flat, R, c):
    fam = PerturbationFamily(fx.disk(flat, (0, 0), R), np.ones(256))
    assert first_variation(fam, c) == pytest.approx((1 / R - c) * 2 * math.pi * R, abs=1e-3)


def test_first_variation_zero_field(flat):
    fam = PerturbationFamily(fx.disk(flat, (0, 0), 1.0), np.zeros(256))
    assert first_variation(fam, 3.0) == 0.0


def test_first_variation_vanishes_on_sphere_latitude():
    region = fx.sphere_cap(math.pi / 4)
    rng = np.random.default_rng(0)
    phi = rng.normal(size=256)
    fam = PerturbationFamily(region, phi)
    assert abs(first_variation(fam, 1.0)) < 1e-3 * np.sum(np.abs(phi)) / 256


def test_first_variation_node_in_support():
    cv, _ = fx.lens_figure_eight(1.0, math.pi / 2, m=64)
    region = Region(cv)
    fam = PerturbationFamily(region, np.ones(cv.n), node=detect_node(cv, region))
    with pytest.raises(NodeInSupport):
        first_variation(fam, 1.0)


# second variation ------------------------------------------------------------

def test_second_variation_flat_circle(flat):
    # critical circle of radius 1/c: Q(1) = -c^2 L
    c = 2.0
    cv = fx.circle(flat, (0, 0), 1 / c)
    assert second_variation(cv, None, np.ones(cv.n), c) == pytest.approx(-c * c * math.pi, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_second_variation_polarization(a, b):
    cv = fx.sphere_latitude(math.pi / 4, n=128)
    th = 2 * np.pi * np.arange(cv.n) / cv.n
    phi = a[0] + a[1] * np.cos(th) + a[2] * np.sin(th) + a[3] * np.cos(2 * th) + a[4] * np.sin(3 * th) + a[5]
    psi = b[0] + b[1] * np.cos(th) + b[2] * np.sin(2 * th) + b[3] * np.cos(4 * th) + b[4] * np.sin(th) + b[5]
    Q = lambda f: second_variation(cv, None, f, 1.0)
    lhs = Q(phi + psi) + Q(phi - psi)
    rhs = 2 * Q(phi) + 2 * Q(psi)
    scale = max(1.0, abs(Q(phi)) + abs(Q(psi)))
    assert abs(lhs - rhs) <= 1e-10 * scale
    assert Q(2.5 * phi) == pytest.approx(6.25 * Q(phi), rel=1e-10, abs=1e-12)


def test_config1_requires_alpha_below_pi():
    cv, _ = fx.lens_figure_eight(1.0, math.pi / 2, m=64)
    node = dataclasses.replace(detect_node(cv), alpha=math.pi)
    with pytest.raises(AngleDegenerate):
        second_variation(cv, node, np.ones(cv.n), 1.0)


def test_config2_alpha_pi_limit():
    cv = fx.tangent_circles(n=128)
    node = detect_node(cv)
    # bump on the inner circle vanishing near the contact
    k = np.arange(128)
    phi = np.zeros(cv.n)
    phi[128:] = np.where((k >= 3) & (k <= 125), np.sin(np.pi * (k - 3) / 122), 0.0)
    value = second_variation(cv, node, phi, 1.0)
    assert value == pytest.approx(second_variation(cv, None, phi, 1.0, method="p1"))
    with pytest.raises(AngleDegenerate):
        second_variation(cv, node, np.ones(cv.n), 1.0)


def test_node_angle_must_be_positive():
    with pytest.raises(AngleDegenerate):
        NodeData(np.zeros(2), 0.0, 10.0, 0.0, Config.CONFIG1)


# nodes -------------------------------------------------------------------------

def test_embedded_circle_has_no_node(flat):
    cv = fx.circle(flat, (0, 0), 1.0)
    assert detect_node(cv) is None
    assert is_embedded(cv)


@pytest.mark.parametrize("alpha", [math.pi / 4, math.pi / 3, math.pi / 2, 2 * math.pi / 3])
def test_lens_node(alpha):
    cv, info = fx.lens_figure_eight(1.0, alpha, m=128)
    node = detect_node(cv)
    assert node.config is Config.CONFIG1
    assert node.alpha == pytest.approx(alpha, abs=1e-3)
    np.testing.assert_allclose(node.point, 0.0, atol=1e-9)
    assert not is_embedded(cv)


def test_lens_split_lengths():
    cv, info = fx.lens_figure_eight(1.0, math.pi / 3, m=128)
    a, b = split_at_node(cv, detect_node(cv))
    assert length(a) == pytest.approx(info["loop_length"], rel=1e-4)
    assert length(b) == pytest.approx(info["loop_length"], rel=1e-4)


def test_internally_tangent_circles():
    node = detect_node(fx.tangent_circles())
    assert node.alpha == math.pi
    assert node.config is Config.CONFIG2
    assert node.kind == "tangent"


def test_externally_touching_disks():
    cv = fx.touching_disks(a=0.5, b=0.6)
    node = detect_node(cv, Region(cv, witness=(0.0, 3.0)))
    assert node.alpha == math.pi and node.config is Config.CONFIG2


def test_multiple_nodes(flat):
    t = 2 * np.pi * np.arange(400) / 400
    cv = DiscreteCurve(flat, np.stack([np.sin(2 * t), np.sin(3 * t)], -1))
    with pytest.raises(MultipleNodes):
        detect_node(cv)


# lifts on flat tori ---------------------------------------------------------

@pytest.mark.parametrize("inj,c,verdict", [(1.0, 1.5, LiftVerdict.EMBEDDABLE),
                                           (1.0, 1.0, LiftVerdict.NOT_EMBEDDABLE),
                                           (1.0, 0.9, LiftVerdict.NOT_EMBEDDABLE),
                                           (2.0, 0.6, LiftVerdict.EMBEDDABLE)])
def test_embedded_lift_check(inj, c, verdict):
    assert embedded_lift_check(geo.FlatTorus.square(inj), c) is verdict


def test_lift_check_skewed_lattice():
    # (3, 2) - 2 (1, 1) = (1, 0) is the shortest lattice vector, so inj = 1/2
    T = geo.FlatTorus(np.array([[1.0, 1.0], [3.0, 2.0]]))
    r = 0.5
    assert embedded_lift_check(T, 1 / r + 1e-9) is LiftVerdict.EMBEDDABLE
    assert embedded_lift_check(T, 1 / r - 1e-9) is LiftVerdict.NOT_EMBEDDABLE


def test_lift_check_wrong_family(sphere):
    with pytest.raises(WrongFamily):
        embedded_lift_check(sphere, 1.0)


# Gauss-Bonnet ----------------------------------------------------------------

def test_gauss_bonnet_complement_region(sphere_chart):
    cv = fx.sphere_latitude(1.0)
    region = Region(cv, witness=(5.0, 5.0))
    assert abs(gauss_bonnet_defect(region)) < 1e-3
