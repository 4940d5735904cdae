"""
Choosing K2
===========

A large ``K2`` separates buyers with different values into different vote
counts but caps the largest value the market can price. A small one admits
big values and lumps everyone together.
"""

import numpy as np

from qsp import LinearCurveSpec, granularity, k2_sweep, linear_curve, optimal_k2_range

curve = linear_curve(LinearCurveSpec(0.01, 0.0, 100))
values = [10, 20, 30, 45]

for k2 in (1e-3, 1e-5):
    rep = granularity(curve, k2, values)
    print(f"K2 = {k2:g}: i_max = {rep.i_max}, min gap {rep.min_diff}, "
          f"optimal {rep.optimal}, V up to {rep.v_max_allowed:g}")

# %%
# Sweeping K2 shows both sides of the trade-off.

rows = k2_sweep(curve, values, np.geomspace(1e-5, 1e-1, 13))
print("\n      K2  feasible  spread  min_diff  V_max")
for r in rows:
    print(f"{r['k2']:8.2g}  {str(r['feasible']):>8}  {str(r['spread']):>6}  "
          f"{str(r['min_diff']):>8}  {r['v_max_allowed']:g}")
print("optimal K2 range:", optimal_k2_range(rows))
