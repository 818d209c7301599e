"""Threshold curves for curvature -1 and the positive-curvature condition region."""

import numpy as np

from ccurv import criteria as cr

f2 = cr.figure2_curves([0.5, 1.0, 2.0, 5.0, 10.0])
print("inj     coth(inj)   comparison bound")
for x, b, r in f2.rows():
    print(f"{x:5.2f}   {b:9.5f}   {r:9.5f}")

m, c = cr.figure1_corner()
print(f"\ncorner of the condition region (min K, c) = ({m:.4f}, {c:.4f})")
print(f"lower branch meets c = 0 at min K = {cr.figure1_region(50).intercept:.6f}")
for mk in (0.02, 0.05, 0.1):
    print(f"min K = {mk}: the first condition needs c > {float(cr.figure1_upper(mk)):.6f}")

rep = cr.evaluate_criteria(type("S", (), {"minK": -1.0, "maxK": -1.0, "inj": 2.0})(), 1.05)
print("\nmin K = -1, inj = 2, c = 1.05:")
for name, margin, holds in rep.rows():
    print(f"  {name:10s} margin {margin:+.4f}  {'holds' if holds else 'fails'}")
