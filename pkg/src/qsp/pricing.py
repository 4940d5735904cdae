"""Vote pricing: the four cost regimes and the rational buyer.

A rational buyer with perceived value ``V`` buys the ``i``-th vote while
``dp(i) * V >= c(i)``. Quadratic success payments price each vote at

    c(i) = dp(i) * (p(i) - p(0)) / K2

so that the buyer stops at ``i_max = floor(p^-1(K2*V + p(0)))`` and the
acquired influence ``p(i_max) - p(0)`` tracks ``K2 * V``. With a constant
marginal ``dp`` this is the familiar linear price ``(dp / K) * i`` with
``K = K2 / dp``.
"""

import csv
from dataclasses import dataclass, field
from decimal import Context, Decimal, localcontext
import io
import json
import math

from .curve import ProbabilityCurve, invert, marginal
from .errors import (BoundViolation, DomainError, QSPError, TargetBeyondCurve)

__all__ = [
    "UNAFFORDABLE",
    "SNAP_TOL",
    "PricingParams",
    "Flat",
    "OneVote",
    "Linear",
    "QSP",
    "CostSchedule",
    "BuyerTrace",
    "k2_upper_bound",
    "check_k2",
    "i_max_constant",
    "i_max_general",
    "cost_constant",
    "cost_general",
    "build_schedule",
    "rational_buyer",
    "schedule_to_csv",
    "schedule_from_csv",
    "schedule_to_json",
    "schedule_from_json",
]

#: Relative distance to an integer below which a real index is snapped to it.
SNAP_TOL = 1e-9

_DEC = Context(prec=60)


def _dec(x):
    return Decimal(repr(float(x)))


class _Unaffordable:
    """Price marker for a vote that cannot be bought at any value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNAFFORDABLE"

    def __reduce__(self):
        return (_Unaffordable, ())


UNAFFORDABLE = _Unaffordable()


def _positive(name, value):
    if not value > 0 or math.isinf(value):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _snap_floor(x, scale=1.0):
    nearest = round(x)
    if abs(x - nearest) <= SNAP_TOL * max(1.0, scale):
        return int(nearest)
    return math.floor(x)


@dataclass(frozen=True)
class PricingParams:
    """Market constant ``k2`` and a stakeholder's perceived value ``v``."""

    k2: float
    v: float

    def __post_init__(self):
        _positive("k2", self.k2)
        _positive("v", self.v)

    def legacy_k(self, delta_p):
        """Constant-marginal equivalent ``K = K2 / dp``."""
        _positive("delta_p", delta_p)
        return self.k2 / delta_p

    def target(self, p0):
        """Probability the buyer should end up at: ``K2 * V + p(0)``."""
        return self.k2 * self.v + p0


def k2_upper_bound(p0, v):
    """Exclusive upper bound ``(1 - p0) / v`` on the market constant."""
    if not 0 <= p0 < 1:
        raise DomainError(f"p(0) must lie in [0, 1), got {p0!r}")
    _positive("v", v)
    return (1 - p0) / v


def check_k2(k2, p0, v):
    """Raise :class:`BoundViolation` unless ``0 < k2 < (1 - p0) / v``."""
    _positive("k2", k2)
    bound = k2_upper_bound(p0, v)
    if not k2 < bound:
        raise BoundViolation(k2, bound, (v,))
    return bound


def i_max_constant(k, v):
    """``floor(K * V)``, snapping products that land a hair below an integer."""
    _positive("k", k)
    _positive("v", v)
    return _snap_floor(k * v, k * v)


def i_max_general(curve, params):
    """Largest vote count a rational buyer takes under QSP pricing.

    ``floor(p^-1(K2*V + p(0)))`` on the polyline extension of ``curve``.
    The K2 bound is checked against this curve's ``p(0)``.
    """
    check_k2(params.k2, curve.p0, params.v)
    target = params.target(curve.p0)
    if target > curve[-1]:
        raise TargetBeyondCurve(target, curve[-1])
    return min(_snap_floor(invert(curve, target), curve.n), curve.n)


def cost_constant(delta_p, k, i):
    """Linear price ``(dp / K) * i`` of the ``i``-th vote."""
    _positive("delta_p", delta_p)
    _positive("k", k)
    if int(i) != i or i < 1:
        raise DomainError(f"vote index must be >= 1, got {i!r}")
    with localcontext(_DEC):
        return float(_dec(delta_p) / _dec(k) * int(i))


def cost_general(curve, k2, i):
    """QSP price ``dp(i) * (p(i) - p(0)) / K2`` of the ``i``-th vote.

    Computed in decimal on the shortest repr of each input and rounded once,
    so hand-written curves price without binary noise (``[0.2, 0.4, 0.8]``
    with ``K2 = 0.1`` gives exactly ``0.4`` and ``2.4``).
    """
    _positive("k2", k2)
    marginal(curve, i)  # index check
    p = curve.samples
    with localcontext(_DEC):
        exact = (_dec(p[i]) - _dec(p[i - 1])) * (_dec(p[i]) - _dec(p[0])) / _dec(k2)
    return float(exact)


# -- schedules ---------------------------------------------------------------

@dataclass(frozen=True)
class Flat:
    """Every vote costs ``c``."""
    c: float
    n_votes: int


@dataclass(frozen=True)
class OneVote:
    """The first vote costs ``c``; no further vote can be bought."""
    c: float
    n_votes: int


@dataclass(frozen=True)
class Linear:
    """Constant-marginal quadratic payments, ``c(i) = (dp / K) * i``."""
    delta_p: float
    k: float
    n_votes: int


@dataclass(frozen=True)
class QSP:
    """Quadratic success payments over a sampled curve."""
    curve: ProbabilityCurve
    k2: float


@dataclass(frozen=True)
class CostSchedule:
    """Materialized prices ``c(1), ..., c(N)``.

    ``prices[i - 1]`` is the price of vote ``i``; unbuyable votes hold
    :data:`UNAFFORDABLE`.
    """

    regime: str
    prices: tuple
    params: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.prices)

    def price(self, i):
        if int(i) != i or not 1 <= i <= len(self.prices):
            raise DomainError(f"vote index {i!r} outside [1, {len(self.prices)}]")
        return self.prices[i - 1]


def _n_votes(n):
    if int(n) != n or n < 1:
        raise DomainError(f"schedule length must be a positive integer, got {n!r}")
    return int(n)


def build_schedule(spec):
    """Materialize the prices of a regime spec into a :class:`CostSchedule`."""
    if isinstance(spec, Flat):
        _positive("c", spec.c)
        n = _n_votes(spec.n_votes)
        return CostSchedule("flat", (float(spec.c),) * n, {"c": spec.c})
    if isinstance(spec, OneVote):
        _positive("c", spec.c)
        n = _n_votes(spec.n_votes)
        return CostSchedule("one-vote", (float(spec.c),) + (UNAFFORDABLE,) * (n - 1),
                            {"c": spec.c})
    if isinstance(spec, Linear):
        n = _n_votes(spec.n_votes)
        prices = tuple(cost_constant(spec.delta_p, spec.k, i) for i in range(1, n + 1))
        return CostSchedule("linear", prices, {"delta_p": spec.delta_p, "k": spec.k})
    if isinstance(spec, QSP):
        curve = spec.curve
        prices = tuple(cost_general(curve, spec.k2, i) for i in range(1, curve.n + 1))
        return CostSchedule("qsp", prices, {"k2": spec.k2})
    raise DomainError(f"unknown regime spec {spec!r}")


@dataclass(frozen=True)
class BuyerTrace:
    """Outcome of the greedy purchase loop.

    ``decisions`` lists ``(i, gain, price, bought)`` for every vote examined,
    where ``gain = dp(i) * V``; the last entry is the refused vote unless the
    buyer exhausted the schedule.
    """

    i_stop: int
    decisions: tuple


def rational_buyer(schedule, curve, v):
    """Buy votes ``1, 2, ...`` while ``dp(i) * V >= c(i)``.

    A tie buys the vote. Under QSP pricing the buy condition is equivalent to
    ``p(i) <= K2*V + p(0)``, which is monotone in ``i``, so the greedy stop
    is the global optimum.
    """
    _positive("v", v)
    if len(schedule) != curve.n:
        raise DomainError(
            f"schedule has {len(schedule)} prices but the curve has {curve.n} votes")
    decisions = []
    i_stop = 0
    for i in range(1, len(schedule) + 1):
        gain = marginal(curve, i) * v
        price = schedule.price(i)
        bought = price is not UNAFFORDABLE and gain >= price
        decisions.append((i, gain, price, bought))
        if not bought:
            break
        i_stop = i
    return BuyerTrace(i_stop, tuple(decisions))


# -- persistence -------------------------------------------------------------

def _fmt_price(c):
    return "inf" if c is UNAFFORDABLE else repr(c)


def schedule_to_csv(schedule):
    """``i,c`` CSV text; unaffordable votes are written as ``inf``."""
    lines = ["i,c"]
    lines += [f"{i},{_fmt_price(c)}" for i, c in enumerate(schedule.prices, 1)]
    return "\n".join(lines) + "\n"


def schedule_from_csv(text, regime="custom"):
    prices = []
    reader = csv.reader(io.StringIO(text))
    header = None
    for lineno, row in enumerate(reader, 1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        if header is None:
            header = [h.strip() for h in row]
            if header[:2] != ["i", "c"]:
                raise QSPError(f"line {lineno}: expected header 'i,c'")
            continue
        try:
            i = int(row[0])
            token = row[1].strip()
        except (IndexError, ValueError):
            raise QSPError(f"line {lineno}: cannot parse {','.join(row)!r}") from None
        if i != len(prices) + 1:
            raise QSPError(f"line {lineno}: expected i = {len(prices) + 1}, got {i}")
        if token == "inf":
            prices.append(UNAFFORDABLE)
        else:
            try:
                prices.append(float(token))
            except ValueError:
                raise QSPError(f"line {lineno}: bad price {token!r}") from None
    if header is None:
        raise QSPError("empty schedule file")
    return CostSchedule(regime, tuple(prices))


def schedule_to_json(schedule):
    doc = {
        "regime": schedule.regime,
        "params": {k: v for k, v in schedule.params.items()},
        "rows": [{"i": i, "c": "inf" if c is UNAFFORDABLE else c}
                 for i, c in enumerate(schedule.prices, 1)],
    }
    return json.dumps(doc, indent=2)


def schedule_from_json(text):
    doc = json.loads(text)
    prices = tuple(UNAFFORDABLE if row["c"] == "inf" else float(row["c"])
                   for row in doc["rows"])
    return CostSchedule(doc.get("regime", "custom"), prices, doc.get("params", {}))
