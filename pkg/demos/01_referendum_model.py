"""
Referendum outcome probabilities
================================

Each of ``n`` voters says yes with probability ``y``. A stakeholder who buys
``i`` of the votes outright needs only ``floor(n/2) + 1 - i`` of the rest.
"""

import numpy as np

from qsp import curve_for, exact_probability_bought, outcome_probability

# %%
# Odd electorates are fair coins at y = 0.5, even ones are not: a tie is a
# loss, so the even case sits below one half.

for n in (1, 2, 3, 4, 99, 100):
    print(f"n = {n:>3}   p(0.5, n) = {outcome_probability(0.5, n):.6f}")

# %%
# Larger electorates sharpen the curve around y = 0.5.

ys = np.linspace(0.3, 0.7, 9)
print("\n   y   " + "  ".join(f"n={n:<5}" for n in (10, 100, 1000)))
for y in ys:
    row = "  ".join(f"{outcome_probability(y, n):.5f}" for n in (10, 100, 1000))
    print(f"{y:.2f}   {row}")

# %%
# Buying votes at n = 100. The curve is sampled up to the saturation point
# and its increments peak where the race is tightest.

curve = curve_for(0.4, 100, 50)
dps = np.array(curve.marginals())
peak = int(dps.argmax()) + 1
first = next(i for i, p in enumerate(curve.samples) if p > 0.8)
print(f"\ny = 0.4: p(0) = {curve.p0:.4f}, largest gain at vote {peak}, "
      f"p exceeds 0.8 after {first} votes")

# %%
# Floats track the exact rational result closely.

exact = exact_probability_bought("0.4", 100, 10)
print(f"p(0.4, 100, 10) = {float(exact)!r} (exact), {curve[10]!r} (float)")
