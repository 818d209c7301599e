"""Constant-curvature circles on a flat torus embed exactly when c * inj > 1."""

import math

from ccurv import geometry as geo
from ccurv.curve import Region, embedded_lift_check, geodesic_curvature, is_embedded, length
from ccurv import fixtures as fx
from ccurv.errors import CCurvError
from ccurv.shortening import solve_prescribed_curvature

T = geo.FlatTorus.square(1.0)  # injectivity radius 1
print(f"square torus, inj = {geo.surface_stats(T).inj}")
for c in (0.9, 1.2, 1.5, 3.0):
    verdict = embedded_lift_check(T, c)
    line = f"c = {c:3.1f}: lift check {verdict.value}"
    try:
        seed = Region(fx.circle(T, (0.0, 0.0), 0.8 / c, n=128), witness=(0.0, 0.0))
        region = solve_prescribed_curvature(T, c, seed)
        cv = region.boundary[0]
        res = max(abs(k - c) for k in geodesic_curvature(cv, region))
        line += (f", solved length {length(cv):.6f} (2 pi / c = {2 * math.pi / c:.6f}), "
                 f"residual {res:.1e}, embedded {is_embedded(cv)}")
    except CCurvError as exc:
        line += f", solver stopped: {type(exc).__name__}"
    print(line)
