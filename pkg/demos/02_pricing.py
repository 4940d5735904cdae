"""
Pricing votes on a non-linear curve
===================================

Quadratic success payments charge ``dp(i) * (p(i) - p(0)) / K2`` for the
``i``-th vote. A buyer who values the outcome at ``V`` then stops where the
acquired influence reaches ``K2 * V``.
"""

from qsp import (QSP, Flat, OneVote, PricingParams, build_schedule, curve_for,
                 i_max_general, k2_upper_bound, rational_buyer)

curve = curve_for(0.45, 100, 50)
k2 = 0.002

print(f"p(0) = {curve.p0:.4f}; K2 must stay below (1 - p(0))/V")
for v in (50, 150, 250):
    print(f"  V = {v:>3}: bound {k2_upper_bound(curve.p0, v):.5f}")

# %%
# Prices grow with both the marginal gain and the influence already bought.

sched = build_schedule(QSP(curve, k2))
print("\n i   p(i)     dp(i)    c(i)")
for i in (1, 2, 5, 10, 20, 30, 40, 50):
    print(f"{i:>2}   {curve[i]:.4f}   {curve.marginal(i):.4f}   {sched.price(i):8.3f}")

# %%
# The greedy buyer and the inverse-curve formula agree.

for v in (20, 100, 200):
    trace = rational_buyer(sched, curve, v)
    i_max = i_max_general(curve, PricingParams(k2, v))
    print(f"V = {v:>3}: buyer stops at {trace.i_stop:>2}, i_max = {i_max:>2}, "
          f"influence {curve[i_max] - curve.p0:.4f} vs K2*V = {k2 * v:.4f}")

# %%
# Flat and one-vote regimes for comparison.

for spec in (Flat(0.5, curve.n), OneVote(0.5, curve.n)):
    s = build_schedule(spec)
    print(f"{s.regime:>8}: buyer with V = 100 takes {rational_buyer(s, curve, 100).i_stop} votes")
