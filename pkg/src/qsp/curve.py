"""Strictly increasing probability curves sampled on integer vote counts.

A curve holds ``p(0), p(1), ..., p(N)`` and is extended to real arguments by
linear interpolation between neighbouring knots, which makes it exactly
invertible segment by segment.
"""

from bisect import bisect_right
import csv
from dataclasses import dataclass
import io
import math

from .errors import (CurveParseError, DomainError, NonMonotoneError,
                     OutOfRangeError)

__all__ = [
    "DEFAULT_TOL",
    "ProbabilityCurve",
    "LinearCurveSpec",
    "curve_from_samples",
    "linear_curve",
    "evaluate",
    "invert",
    "marginal",
    "read_curve_csv",
    "write_curve_csv",
]

#: Smallest accepted step between consecutive samples.
DEFAULT_TOL = 1e-12


class ProbabilityCurve:
    """Validated, immutable sampled curve ``p(0..N)``.

    Build instances with :func:`curve_from_samples` or :func:`linear_curve`.
    """

    __slots__ = ("_p", "tol")

    def __init__(self, samples, tol=DEFAULT_TOL):
        values = tuple(float(v) for v in samples)
        if len(values) < 2:
            raise DomainError("a curve needs at least two samples")
        for k, v in enumerate(values):
            if not 0.0 <= v <= 1.0:  # also rejects NaN
                raise OutOfRangeError(k, v)
            if k and v - values[k - 1] < tol:
                raise NonMonotoneError(k, values[k - 1], v, tol)
        object.__setattr__(self, "_p", values)
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("ProbabilityCurve is immutable")

    @property
    def samples(self):
        return self._p

    @property
    def n(self):
        """Index of the last knot, ``N``."""
        return len(self._p) - 1

    @property
    def p0(self):
        return self._p[0]

    def __len__(self):
        return len(self._p)

    def __getitem__(self, k):
        return self._p[k]

    def __iter__(self):
        return iter(self._p)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityCurve):
            return NotImplemented
        return self._p == other._p

    def __hash__(self):
        return hash(self._p)

    def __repr__(self):
        if len(self._p) <= 6:
            return f"ProbabilityCurve({list(self._p)!r})"
        return (f"ProbabilityCurve(N={self.n}, p(0)={self._p[0]!r}, "
                f"p(N)={self._p[-1]!r})")

    def marginals(self):
        """All marginal gains ``[dp(1), ..., dp(N)]``."""
        p = self._p
        return [p[k] - p[k - 1] for k in range(1, len(p))]

    def evaluate(self, x):
        return evaluate(self, x)

    def invert(self, target):
        return invert(self, target)

    def marginal(self, i):
        return marginal(self, i)


@dataclass(frozen=True)
class LinearCurveSpec:
    """Constant marginal probability: ``p(i) = delta_p * i + intercept``."""

    delta_p: float
    intercept: float
    n_samples: int

    def __post_init__(self):
        if not self.delta_p > 0:
            raise DomainError(f"delta_p must be positive, got {self.delta_p!r}")
        if not self.intercept >= 0:
            raise DomainError(f"intercept must be non-negative, got {self.intercept!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise DomainError(f"n_samples must be an integer >= 2, got {self.n_samples!r}")
        top = self.intercept + self.delta_p * (self.n_samples - 1)
        if top > 1:
            raise DomainError(f"last sample {top!r} exceeds 1")


def curve_from_samples(values, tol=DEFAULT_TOL):
    """Validate ``values`` as ``p(0), ..., p(N)`` and wrap them in a curve.

    Raises :class:`OutOfRangeError` for a value outside ``[0, 1]`` and
    :class:`NonMonotoneError` when a step is smaller than ``tol``; both carry
    the offending index.
    """
    return ProbabilityCurve(values, tol=tol)


def linear_curve(spec):
    return ProbabilityCurve(
        [spec.delta_p * i + spec.intercept for i in range(spec.n_samples)])


def evaluate(curve, x):
    """Polyline value of the curve at real ``x`` in ``[0, N]``.

    Integer arguments return the stored knot unchanged.
    """
    if not 0 <= x <= curve.n:
        raise DomainError(f"x = {x!r} outside [0, {curve.n}]")
    p = curve.samples
    k = math.floor(x)
    if k == x:
        return p[k]
    return p[k] + (x - k) * (p[k + 1] - p[k])


def invert(curve, target):
    """Real ``x`` in ``[0, N]`` with ``evaluate(curve, x) == target``.

    Knot values map back to their integer index exactly.
    """
    p = curve.samples
    if not p[0] <= target <= p[-1]:
        raise DomainError(
            f"target {target!r} outside the curve range [{p[0]!r}, {p[-1]!r}]")
    k = bisect_right(p, target) - 1
    if p[k] == target:
        return float(k)
    return k + (target - p[k]) / (p[k + 1] - p[k])


def marginal(curve, i):
    """Marginal gain ``p(i) - p(i-1)`` of the ``i``-th vote, ``1 <= i <= N``."""
    if int(i) != i or not 1 <= i <= curve.n:
        raise DomainError(f"marginal index {i!r} outside [1, {curve.n}]")
    p = curve.samples
    return p[i] - p[i - 1]


def read_curve_csv(source, tol=DEFAULT_TOL):
    """Parse an ``i,p`` CSV (path or open text file) into a curve.

    Lines starting with ``#`` are ignored and extra columns are allowed.
    Rows must list ``i = 0, 1, 2, ...`` in order. Errors name the 1-based
    line number of the offending row.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_curve_csv(fh, tol)
    rows = [(lineno, line) for lineno, line in enumerate(source, 1)
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise CurveParseError(0, "empty curve file")
    header_line, header = rows[0][0], next(csv.reader([rows[0][1]]))
    header = [h.strip() for h in header]
    if header[:2] != ["i", "p"]:
        raise CurveParseError(header_line, f"expected header 'i,p', got {','.join(header)!r}")
    values = []
    for lineno, line in rows[1:]:
        fields = next(csv.reader([line]))
        try:
            i = int(fields[0])
            value = float(fields[1])
        except (IndexError, ValueError):
            raise CurveParseError(lineno, f"cannot parse {line.strip()!r}") from None
        if i != len(values):
            raise CurveParseError(lineno, f"expected i = {len(values)}, got {i}")
        values.append(value)
    try:
        return curve_from_samples(values, tol=tol)
    except (NonMonotoneError, OutOfRangeError) as exc:
        raise CurveParseError(rows[exc.index + 1][0], str(exc)) from exc
    except DomainError as exc:
        raise CurveParseError(header_line, str(exc)) from exc


def write_curve_csv(curve, dest=None):
    """Write the curve as ``i,p`` CSV; returns the text when ``dest`` is None."""
    buf = io.StringIO()
    buf.write("i,p\n")
    for k, v in enumerate(curve.samples):
        buf.write(f"{k},{v!r}\n")
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return text
