"""Prescribed-curvature solve on the unit sphere and its index-one certificate."""

import math

import numpy as np

from ccurv import fixtures as fx
from ccurv import geometry as geo
from ccurv.curve import Region, geodesic_curvature, length, second_variation
from ccurv.shortening import solve_prescribed_curvature

S = geo.round_sphere(1.0).plane_chart()
for c in (0.5, 1.0, 2.0):
    rho = math.atan(1 / c)  # latitude with cot(rho) = c
    seed = Region(fx.circle(S, (0.1, -0.05), 0.7 * math.tan(rho / 2), n=128), witness=(0.1, -0.05))
    region = solve_prescribed_curvature(S, c, seed)
    cv = region.boundary[0]
    res = float(np.max(np.abs(geodesic_curvature(cv, region) - c)))
    q = second_variation(cv, None, np.ones(cv.n), c)
    print(f"c = {c}: length {length(cv):.6f} vs 2 pi sin(rho) = {2 * math.pi * math.sin(rho):.6f}, "
          f"residual {res:.1e}, Q(1) = {q:.4f} (negative: not stable)")
