"""Bundled demonstration curves and seeded random curve generators.

The four demo families are illustrative shapes for total-cost plots; their
parameters are chosen here, they are not measured data.
"""

import numpy as np

from .curve import LinearCurveSpec, ProbabilityCurve, linear_curve

__all__ = [
    "DEMO_N",
    "DEMO_K2",
    "DEMO_FAMILIES",
    "demo_curve",
    "demo_curves",
    "random_curve",
    "random_linear_spec",
    "random_linear_curve",
]

DEMO_N = 1000
DEMO_K2 = 1e-3


def _rescale(shape, lo, hi):
    shape = np.asarray(shape, dtype=float)
    unit = (shape - shape[0]) / (shape[-1] - shape[0])
    return lo + (hi - lo) * unit


def _linear(n):
    return [0.05 + 0.9 * i / n for i in range(n + 1)]


def _logistic(n):
    i = np.arange(n + 1)
    return _rescale(1 / (1 + np.exp(-(i - n / 2) / (n / 12.5))), 0.02, 0.98)


def _early_saturating(n):
    i = np.arange(n + 1)
    return _rescale(-np.expm1(-i / (n / 16)), 0.1, 0.99)


def _slow_start(n):
    i = np.arange(n + 1)
    return _rescale((i / n) ** 3, 0.01, 0.95)


#: name -> (generator, one-line description)
DEMO_FAMILIES = {
    "linear": (_linear, "p(i) = 0.05 + 0.9 i/N"),
    "logistic": (_logistic, "logistic centred at N/2, width N/12.5, rescaled to [0.02, 0.98]"),
    "early-saturating": (_early_saturating, "1 - exp(-16 i/N) rescaled to [0.1, 0.99]"),
    "slow-start": (_slow_start, "(i/N)^3 rescaled to [0.01, 0.95]"),
}


def demo_curve(name, n=DEMO_N):
    try:
        gen = DEMO_FAMILIES[name][0]
    except KeyError:
        raise KeyError(f"unknown demo curve {name!r}; choose from "
                       f"{', '.join(DEMO_FAMILIES)}") from None
    return ProbabilityCurve(gen(n))


def demo_curves(n=DEMO_N):
    return {name: demo_curve(name, n) for name in DEMO_FAMILIES}


def random_curve(rng, n_max=200, n_min=1, margin=1e-3):
    """Random strictly increasing curve with ``n_min <= N <= n_max``.

    Increments are positive draws normalized to a random span, so
    ``p(N) <= 1 - margin``.
    """
    n = int(rng.integers(n_min, n_max + 1))
    p0 = rng.uniform(0.0, 0.6)
    span = rng.uniform(0.05, 1.0 - margin - p0)
    steps = rng.uniform(0.01, 1.0, n) ** rng.uniform(1.0, 3.0)
    steps *= span / steps.sum()
    samples = np.concatenate(([p0], p0 + np.cumsum(steps)))
    return ProbabilityCurve(samples)


def random_linear_spec(rng, n_max=200):
    n = int(rng.integers(2, n_max + 1))
    delta_p = rng.uniform(1e-3, min(0.05, 0.99 / (n - 1)))
    intercept = rng.uniform(0.0, 1.0 - 1e-9 - delta_p * (n - 1))
    return LinearCurveSpec(delta_p, intercept, n)


def random_linear_curve(rng, n_max=200):
    return linear_curve(random_linear_spec(rng, n_max))

