"""Surgeries at a crossing lower A^c, and a competitor sweepout stays below A^c."""

import math

import numpy as np

from ccurv import fixtures as fx
from ccurv.curve import Region, ac_functional, detect_node
from ccurv.minmax import competitor_sweepout_config1, cut_and_paste

c = 1.0
cv, info = fx.lens_figure_eight(c, math.pi / 2, m=128)
region = Region(cv)
node = detect_node(cv, region)
phi = fx.lens_bump(info)
print(f"node: {node.config.name}, angle {node.alpha:.4f}, A^c = {ac_functional(region, c):.5f}")
for r in (0.02, 0.05, 0.1):
    plus = cut_and_paste(region, node, 0.01, r, "plus", phi=phi, c=c)
    minus = cut_and_paste(region, node, 0.01, r, "minus", phi=phi, c=c)
    print(f"r = {r:4.2f}: decrease plus {plus.decrease:.2e}, minus {minus.decrease:.2e}")
sw = competitor_sweepout_config1(region, node, phi, c, eps=0.05, r_c=0.2)
vals = sw.meta["values"]
print(f"competitor sweepout: {len(sw.slices)} slices, max A^c {vals.max():.5f}, "
      f"margin {sw.meta['margin']:.2e}, largest area step {np.max(sw.area_jumps()):.3f}")
