"""Total cost of a QSP purchase, its closed forms, and K2 trade-off diagnostics.

Summing the QSP prices over the first ``m`` votes gives

    sum c(i) = ((p(m) - p(0))**2 + sum dp(i)**2) / (2*K2)
             = (A**2 * m**2 + B * m) / (2*K2)

with ``A`` and ``B`` the means of ``dp(i)`` and ``dp(i)**2`` over
``i = 1..m``. The total is bounded by ``M * p(m)**2``, which is a much closer
envelope than any ``M * m**2`` line when marginals are small.
"""

from dataclasses import asdict, dataclass, field
from itertools import combinations
import json
import math

from .errors import BoundViolation, DomainError, UnaffordableInRange
from .pricing import (UNAFFORDABLE, PricingParams, QSP, build_schedule,
                      i_max_general, k2_upper_bound)

__all__ = [
    "CostAnalysis",
    "BigOWitness",
    "GranularityReport",
    "total_cost_direct",
    "total_cost_constant_closed",
    "total_cost_closed_form",
    "total_cost_from_averages",
    "averages",
    "big_o_witness",
    "tight_m",
    "i_squared_constant",
    "granularity",
    "k2_sweep",
    "optimal_k2_range",
    "analyze",
]


def _check_k2(k2):
    if not k2 > 0:
        raise DomainError(f"k2 must be positive, got {k2!r}")


def _check_i_max(curve, i_max, lower=0):
    if int(i_max) != i_max or not lower <= i_max <= curve.n:
        raise DomainError(f"i_max = {i_max!r} outside [{lower}, {curve.n}]")
    return int(i_max)


def total_cost_direct(schedule, i_max):
    """``c(1) + ... + c(i_max)`` summed with :func:`math.fsum`."""
    if int(i_max) != i_max or not 0 <= i_max <= len(schedule):
        raise DomainError(f"i_max = {i_max!r} outside [0, {len(schedule)}]")
    prices = schedule.prices[:int(i_max)]
    for i, c in enumerate(prices, 1):
        if c is UNAFFORDABLE:
            raise UnaffordableInRange(i)
    return math.fsum(prices)


def total_cost_constant_closed(delta_p, k2, i_max):
    """``(dp**2 / K2) * (i_max**2 + i_max) / 2``."""
    if not delta_p > 0:
        raise DomainError(f"delta_p must be positive, got {delta_p!r}")
    _check_k2(k2)
    return delta_p ** 2 / k2 * (i_max ** 2 + i_max) / 2


def total_cost_closed_form(curve, k2, i_max):
    """Closed-form QSP total over the first ``i_max`` votes.

    The squared term is the telescoped influence ``p(i_max) - p(0)``, not a
    sum of probabilities.
    """
    _check_k2(k2)
    m = _check_i_max(curve, i_max)
    if m == 0:
        return 0.0
    influence = curve[m] - curve.p0
    diagonal = math.fsum(d * d for d in curve.marginals()[:m])
    return (influence ** 2 + diagonal) / (2 * k2)


def averages(curve, i_max):
    """Means ``(A, B)`` of ``dp(i)`` and ``dp(i)**2`` over ``i = 1..i_max``."""
    m = _check_i_max(curve, i_max, lower=1)
    dps = curve.marginals()[:m]
    return math.fsum(dps) / m, math.fsum(d * d for d in dps) / m


def total_cost_from_averages(a_avg, b_avg, k2, i_max):
    """``(A**2 * i_max**2 + B * i_max) / (2*K2)``."""
    _check_k2(k2)
    return (a_avg ** 2 * i_max ** 2 + b_avg * i_max) / (2 * k2)


@dataclass(frozen=True)
class BigOWitness:
    """Constant ``m`` with ``sum_{i<=j} c(i) <= m * p(j)**2``.

    ``regime`` is ``"easy"`` when ``1 - 2 p(0) <= 0`` (``m = 1/(2 K2)``) and
    ``"bounded-below"`` otherwise (``m = (1 - p(0))/K2``). ``p_threshold``
    is the smallest ``p(j)`` for which the coarse algebraic argument certifies
    the bound; the bound itself holds at every ``j``.
    """

    m: float
    regime: str
    p_threshold: float


def big_o_witness(curve, k2):
    _check_k2(k2)
    p0 = curve.p0
    slack = 1 - 2 * p0
    if slack <= 0:
        return BigOWitness(1 / (2 * k2), "easy", 0.0)
    m = (1 - p0) / k2
    return BigOWitness(m, "bounded-below", slack / (2 * k2 * m - 1))


def tight_m(curve, k2):
    """Smallest ``M`` with ``sum_{i<=j} c(i) <= M * p(j)**2`` for all ``j >= 1``."""
    _check_k2(k2)
    dps = curve.marginals()
    best = 0.0
    running = 0.0
    for j, dp in enumerate(dps, 1):
        running += dp * (curve[j] - curve.p0) / k2
        best = max(best, running / curve[j] ** 2)
    return best


def i_squared_constant(k2):
    """``M`` of the coarse ``O(i_max**2)`` bound, valid for every ``i_max >= 1``.

    From ``sum c(i) <= (i_max**2 + i_max) / (2 K2) <= M * i_max**2`` which
    needs ``i_max >= 1 / (2 K2 M - 1)``.
    """
    _check_k2(k2)
    return 1 / k2


# -- granularity -------------------------------------------------------------

@dataclass(frozen=True)
class GranularityReport:
    """How a single ``k2`` spreads a set of perceived values over ``i_max``.

    ``min_diff`` is the smallest ``|i_max(V_a) - i_max(V_b)|`` over pairs of
    distinct values (None with fewer than two); ``flattened`` counts the
    distinct values that share their ``i_max`` with another value.
    """

    k2: float
    values: tuple
    i_max: tuple
    min_diff: int | None
    flattened: int
    optimal: bool
    v_max_allowed: float


def granularity(curve, k2, values):
    _check_k2(k2)
    values = tuple(values)
    bound_violators = [v for v in values if not k2 < k2_upper_bound(curve.p0, v)]
    if bound_violators:
        raise BoundViolation(k2, k2_upper_bound(curve.p0, max(bound_violators)),
                             bound_violators)
    i_maxes = tuple(i_max_general(curve, PricingParams(k2, v)) for v in values)
    by_value = dict(zip(values, i_maxes))
    distinct = sorted(by_value)
    diffs = [abs(by_value[a] - by_value[b]) for a, b in combinations(distinct, 2)]
    min_diff = min(diffs) if diffs else None
    counts = {}
    for v in distinct:
        counts[by_value[v]] = counts.get(by_value[v], 0) + 1
    flattened = sum(c for c in counts.values() if c > 1)
    return GranularityReport(
        k2=k2, values=values, i_max=i_maxes, min_diff=min_diff,
        flattened=flattened, optimal=min_diff == 1,
        v_max_allowed=(1 - curve.p0) / k2)


def k2_sweep(curve, values, k2_grid):
    """Granularity rows across ``k2_grid``.

    Rows are dicts with ``k2``, ``feasible``, ``min_diff``, ``flattened``,
    ``optimal``, ``spread`` (number of distinct ``i_max``) and
    ``v_max_allowed``. A ``k2`` that violates the bound for some value, or
    asks for more influence than the sampled curve covers, is reported
    infeasible instead of raising.
    """
    rows = []
    for k2 in map(float, k2_grid):
        row = {"k2": k2, "v_max_allowed": (1 - curve.p0) / k2}
        try:
            rep = granularity(curve, k2, values)
        except (BoundViolation, DomainError):
            row.update(feasible=False, min_diff=None, flattened=None,
                       optimal=False, spread=None)
        else:
            row.update(feasible=True, min_diff=rep.min_diff, flattened=rep.flattened,
                       optimal=rep.optimal, spread=len(set(rep.i_max)))
        rows.append(row)
    return rows


def optimal_k2_range(rows):
    """``(lowest, highest)`` optimal ``k2`` in a sweep, or None."""
    good = [r["k2"] for r in rows if r["optimal"]]
    return (min(good), max(good)) if good else None


# -- report ------------------------------------------------------------------

@dataclass
class CostAnalysis:
    """Total-cost summary of buying ``i_max`` votes under QSP pricing."""

    k2: float
    i_max: int
    total_direct: float
    total_closed: float
    a_avg: float | None
    b_avg: float | None
    m_witness: float
    regime: str
    granularity: dict | None = field(default=None)

    def to_json(self):
        return json.dumps(asdict(self), indent=2)


def analyze(curve, k2, i_max=None, values=None):
    """Build a :class:`CostAnalysis` for ``i_max`` votes.

    With ``values`` and no ``i_max`` the largest value's ``i_max`` is used and
    a granularity block is attached.
    """
    gran = None
    if values:
        rep = granularity(curve, k2, values)
        gran = {"values": list(rep.values), "i_max": list(rep.i_max),
                "min_diff": rep.min_diff, "flattened": rep.flattened,
                "optimal": rep.optimal, "v_max_allowed": rep.v_max_allowed}
        if i_max is None:
            i_max = max(rep.i_max)
    if i_max is None:
        raise DomainError("either i_max or values is required")
    m = _check_i_max(curve, i_max)
    schedule = build_schedule(QSP(curve, k2))
    a_avg, b_avg = averages(curve, m) if m else (None, None)
    wit = big_o_witness(curve, k2)
    return CostAnalysis(
        k2=k2, i_max=m,
        total_direct=total_cost_direct(schedule, m),
        total_closed=total_cost_closed_form(curve, k2, m),
        a_avg=a_avg, b_avg=b_avg, m_witness=wit.m, regime=wit.regime,
        granularity=gran)
