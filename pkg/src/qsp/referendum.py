"""Outcome probabilities for a two-option referendum with an "average voter".

Each of ``n`` voters votes "yes" independently with probability ``y``; "yes"
wins on a strict majority, so a tie (possible only for even ``n``) is a loss.
A buyer may purchase ``i`` votes, which are certain "yes" votes and take the
place of ``i`` free voters.

Binomial terms are accumulated with :func:`math.fsum`. Each term is a direct
float product of an exact integer coefficient and two powers when those stay
in range, and is evaluated in log-space through :func:`math.lgamma` once
``C(n, d)`` would overflow or the powers underflow (large ``n``).
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import BudgetError, DomainError

__all__ = [
    "ReferendumModel",
    "majority",
    "outcome_probability",
    "outcome_probability_bought",
    "curve_for",
    "brute_force_probability",
    "exact_probability_bought",
    "BRUTE_FORCE_BUDGET",
]

#: Largest number of free voters ``n - i`` that brute force will enumerate.
BRUTE_FORCE_BUDGET = 24

_MAX_COEF_BITS = 1000
_TINY = 1e-290


def _check(y, n, i=0):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"voter count n must be a positive integer, got {n!r}")
    if int(i) != i or i < 0:
        raise DomainError(f"bought votes i must be a non-negative integer, got {i!r}")
    if not 0 <= y <= 1:
        raise DomainError(f"yes-probability y must lie in [0, 1], got {y!r}")
    return int(n), int(i)


def majority(n):
    """Votes needed for a strict majority of ``n``: ``floor(n/2) + 1``."""
    return n // 2 + 1


@dataclass(frozen=True)
class ReferendumModel:
    """A referendum of ``n`` voters with average yes-probability ``y``."""

    y: float
    n: int

    def __post_init__(self):
        _check(self.y, self.n)

    def probability(self, i=0):
        return outcome_probability_bought(self.y, self.n, i)

    def curve(self, i_hi):
        return curve_for(self.y, self.n, i_hi)


def outcome_probability(y, n):
    """Probability that "yes" wins with no votes bought."""
    return outcome_probability_bought(y, n, 0)


def outcome_probability_bought(y, n, i):
    """Probability that "yes" wins when ``i`` of the ``n`` votes are bought.

    Sums ``C(n-i, d) y^d (1-y)^(n-i-d)`` for ``d`` from
    ``floor(n/2) + 1 - i`` to ``n - i``. Once the bought votes alone form a
    majority the result is exactly 1.
    """
    n, i = _check(y, n, i)
    need = majority(n) - i  # free "yes" votes still required
    if need <= 0:
        return 1.0
    m = n - i
    if y == 0:
        return 0.0
    if y == 1:
        return 1.0
    return min(1.0, math.fsum(_binomial_terms(y, m, need)))


def _binomial_terms(y, m, lo):
    """``C(m, d) y^d (1-y)^(m-d)`` for ``d = lo..m``.

    Coefficients come from the exact integer recurrence. A term is a plain
    float product while the coefficient and the power product stay in the
    normal float range; otherwise it is evaluated in log-space.
    """
    q = 1.0 - y
    log_y = math.log(y)
    log_q = math.log1p(-y)
    log_m_fact = math.lgamma(m + 1)
    coef = math.comb(m, lo)
    terms = []
    for d in range(lo, m + 1):
        if d > lo:
            coef = coef * (m - d + 1) // d
        powers = y ** d * q ** (m - d) if coef.bit_length() < _MAX_COEF_BITS else 0.0
        if powers >= _TINY:
            terms.append(float(coef) * powers)
        else:
            terms.append(math.exp(log_m_fact - math.lgamma(d + 1) - math.lgamma(m - d + 1)
                                  + d * log_y + (m - d) * log_q))
    return terms


def curve_for(y, n, i_hi, tol=None):
    """Sample ``p(y, n, i)`` for ``i = 0..i_hi`` into a :class:`ProbabilityCurve`."""
    from .curve import DEFAULT_TOL, curve_from_samples

    if int(i_hi) != i_hi or i_hi < 1:
        raise DomainError(f"i_hi must be a positive integer, got {i_hi!r}")
    values = [outcome_probability_bought(y, n, i) for i in range(int(i_hi) + 1)]
    return curve_from_samples(values, tol=DEFAULT_TOL if tol is None else tol)


def brute_force_probability(y, n, i=0):
    """Probability that "yes" wins, by enumerating every free-voter ballot.

    All ``2**(n - i)`` yes/no assignments of the free voters are listed and
    those reaching a strict majority together with the bought votes are
    weighted by ``y**d * (1-y)**(n-i-d)``. Independent of the closed form;
    intended as a test oracle.
    """
    n, i = _check(y, n, i)
    m = max(n - i, 0)
    if m > BRUTE_FORCE_BUDGET:
        raise BudgetError(
            f"brute force needs 2**{m} assignments; budget is 2**{BRUTE_FORCE_BUDGET}")
    ballots = np.arange(2 ** m, dtype=np.uint32)
    yes = np.bitwise_count(ballots).astype(np.int64)
    wins = yes + min(i, n) >= majority(n)
    weights = np.power(float(y), yes[wins]) * np.power(1.0 - float(y), m - yes[wins])
    return math.fsum(weights.tolist())


def exact_probability_bought(y, n, i=0):
    """Exact rational value of :func:`outcome_probability_bought`.

    ``y`` may be a :class:`~fractions.Fraction`, an int, a decimal string such
    as ``"0.4"``, or a float (taken at its exact binary value).
    """
    y = Fraction(y)
    n, i = _check(y, n, i)
    need = majority(n) - i
    if need <= 0:
        return Fraction(1)
    m = n - i
    a, b = y.numerator, y.denominator
    total = sum(math.comb(m, d) * a ** d * (b - a) ** (m - d)
                for d in range(need, m + 1))
    return Fraction(total, b ** m)
