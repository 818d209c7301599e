"""Pull-tight width of a dumbbell: the widest slice settles on the neck geodesic."""

import time

from ccurv import fixtures as fx
from ccurv.curve import length
from ccurv.minmax import pull_tight_width
from ccurv.shortening import BirkhoffConfig, geodesic_residual

region = fx.peanut()
p, q, right, left = fx.peanut_arcs()
trace = []
t = time.perf_counter()
est = pull_tight_width(p, q, region, (right, left), BirkhoffConfig(L=8, r0=1.0), slices=16,
                       tol=1e-9, check_convex=False, family=fx.peanut_family(slices=16), trace=trace)
for rounds, m, n, ins in trace[:: max(1, len(trace) // 8)]:
    print(f"round {rounds:4d}: widest slice {m:.6f} over {n} slices")
print(f"width {est.value:.6f} (neck 0.6), residual {geodesic_residual(est.family.slices[est.index]):.1e}, "
      f"{time.perf_counter() - t:.1f} s")
# the boundary arcs are far longer than the neck, so w0 is attained at an endpoint
ends = est.family.slices[0], est.family.slices[-1]
print(f"endpoint arcs {length(ends[0]):.4f} and {length(ends[1]):.4f}: w0 = {est.w0:.4f}, "
      f"degenerate {est.degenerate}")
