"""Exception types raised across the package."""


class QSPError(Exception):
    """Base class for every error raised by :mod:`qsp`."""


class DomainError(QSPError, ValueError):
    """An argument lies outside the domain of the operation."""


class BudgetError(QSPError):
    """Exhaustive enumeration would exceed its size budget."""


class CurveError(DomainError):
    """A sampled probability curve failed validation."""


class NonMonotoneError(CurveError):
    def __init__(self, index, lower, upper, tol):
        self.index = index
        super().__init__(
            f"curve is not strictly increasing at index {index}: "
            f"p({index}) - p({index - 1}) = {upper - lower!r} < {tol!r}")


class OutOfRangeError(CurveError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"p({index}) = {value!r} is outside [0, 1]")


class CurveParseError(CurveError):
    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


class BoundViolation(DomainError):
    """K2 does not satisfy 0 < K2 < (1 - p(0)) / V."""

    def __init__(self, k2, bound, values=()):
        self.k2 = k2
        self.bound = bound
        self.values = tuple(values)
        msg = f"K2 = {k2!r} must be strictly below (1 - p(0))/V = {bound!r}"
        if self.values:
            msg += f" (offending V: {', '.join(repr(v) for v in self.values)})"
        super().__init__(msg)


class TargetBeyondCurve(DomainError):
    def __init__(self, target, p_last):
        self.target = target
        self.p_last = p_last
        super().__init__(
            f"target probability K2*V + p(0) = {target!r} exceeds the last "
            f"sampled value p(N) = {p_last!r}")


class UnaffordableInRange(QSPError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"vote {index} is unaffordable")


class LatticeError(QSPError):
    pass


class ResourceGuardError(LatticeError):
    def __init__(self, cells, cap):
        self.cells = cells
        self.cap = cap
        super().__init__(
            f"lattice has {cells} cells, above the cap of {cap}; "
            "pass allow_large=True to build it anyway")


class LatticeFormatError(LatticeError):
    pass


class LatticeVersionError(LatticeFormatError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(
            f"unsupported lattice format version {found} (expected {expected})")


class ChecksumError(LatticeFormatError):
    pass


class OffLatticeError(LatticeError, KeyError):
    def __init__(self, message, nearest):
        self.nearest = nearest
        super().__init__(f"{message}; nearest lattice point is {nearest}")

    def __str__(self):
        return self.args[0]
