"""
Total cost and its bounds
=========================

The sum of QSP prices over ``m`` votes has a closed form in the influence
``p(m) - p(0)`` and the squared marginals. It stays under ``M * p(m)**2``,
while a bound in ``m**2`` is far too loose for curves with small increments.
"""

import numpy as np

from qsp import (QSP, big_o_witness, build_schedule, i_squared_constant,
                 tight_m, total_cost_closed_form, total_cost_direct)
from qsp.families import DEMO_FAMILIES, DEMO_K2, demo_curves

curves = demo_curves()

print(f"K2 = {DEMO_K2}, N = 1000\n")
print(f"{'curve':<18}{'total':>10}{'closed':>10}{'M':>8}{'tight M':>10}{'M_i N^2/total':>16}")
for name, curve in curves.items():
    sched = build_schedule(QSP(curve, DEMO_K2))
    direct = total_cost_direct(sched, curve.n)
    closed = total_cost_closed_form(curve, DEMO_K2, curve.n)
    wit = big_o_witness(curve, DEMO_K2)
    over = i_squared_constant(DEMO_K2) * curve.n ** 2 / direct
    print(f"{name:<18}{direct:>10.2f}{closed:>10.2f}{wit.m:>8.0f}"
          f"{tight_m(curve, DEMO_K2):>10.1f}{over:>16.3g}")

# %%
# The p-bound holds at every m, not just at the end.

for name, curve in curves.items():
    partial = np.cumsum(build_schedule(QSP(curve, DEMO_K2)).prices)
    bound = big_o_witness(curve, DEMO_K2).m * np.asarray(curve.samples[1:]) ** 2
    print(f"{name:<18} worst ratio {np.max(partial / bound):.3f}  ({DEMO_FAMILIES[name][1]})")
