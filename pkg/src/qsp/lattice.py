"""Precomputed ``p(y, n, i)`` over a rectangular grid, with a binary file format.

File layout (little-endian)::

    offset  size  field
    0       4     magic b"QSPL"
    4       2     format version (uint16)
    6       2     y count (uint16)
    8       2     n count (uint16), n runs 1..count
    10      2     i count (uint16), i runs 0..count-1
    12      4     reserved, zero
    16      8     y start (float64)
    24      8     y step (float64)
    32      8*C   values, row-major over (y, n, i), float64
    32+8*C  8     BLAKE2b-64 digest of the value bytes
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
import hashlib
import struct

import numpy as np

from .errors import (ChecksumError, DomainError, LatticeFormatError,
                     LatticeVersionError, OffLatticeError, ResourceGuardError)
from .referendum import outcome_probability_bought

__all__ = [
    "LatticeSpec",
    "LatticeTable",
    "FULL_SCALE_SPEC",
    "DEFAULT_CELL_CAP",
    "FORMAT_VERSION",
    "build_lattice",
    "save",
    "load",
    "query",
    "export_csv",
]

MAGIC = b"QSPL"
FORMAT_VERSION = 1
DEFAULT_CELL_CAP = 10_000_000
Y_TOL = 1e-12

_HEADER = struct.Struct("<4sHHHHI dd")
_DIGEST_SIZE = 8
_MAX_DIM = 0xFFFF


@dataclass(frozen=True)
class LatticeSpec:
    """Grid ``y = y_start + k*y_step`` (``k < y_count``), ``n = 1..n_max``,
    ``i = 0..i_cap``."""

    y_start: float = 0.0
    y_step: float = 0.01
    y_count: int = 101
    n_max: int = 1000
    i_cap: int = 501

    def __post_init__(self):
        for name in ("y_count", "n_max"):
            value = getattr(self, name)
            if int(value) != value or not 1 <= value <= _MAX_DIM:
                raise DomainError(f"{name} must be an integer in [1, {_MAX_DIM}], got {value!r}")
        if int(self.i_cap) != self.i_cap or not 0 <= self.i_cap < _MAX_DIM:
            raise DomainError(f"i_cap must be an integer in [0, {_MAX_DIM - 1}], got {self.i_cap!r}")
        if self.y_count > 1 and not self.y_step > 0:
            raise DomainError(f"y_step must be positive, got {self.y_step!r}")
        ys = self.y_values()
        if not (0 <= ys[0] and ys[-1] <= 1):
            raise DomainError(f"y grid [{ys[0]!r}, {ys[-1]!r}] leaves [0, 1]")

    @property
    def shape(self):
        return (self.y_count, self.n_max, self.i_cap + 1)

    @property
    def cells(self):
        return self.y_count * self.n_max * (self.i_cap + 1)

    def y_values(self):
        # decimal arithmetic keeps grid points such as 0.3 free of drift
        start, step = Decimal(repr(float(self.y_start))), Decimal(repr(float(self.y_step)))
        return [float(start + k * step) for k in range(self.y_count)]


FULL_SCALE_SPEC = LatticeSpec()


class LatticeTable:
    """Dense ``(y, n, i)`` array of outcome probabilities; read-only."""

    def __init__(self, spec, values):
        values = np.ascontiguousarray(values, dtype="<f8")
        if values.shape != spec.shape:
            raise LatticeFormatError(f"value array shape {values.shape} != {spec.shape}")
        values.setflags(write=False)
        self.spec = spec
        self.values = values
        self._ys = spec.y_values()

    def __eq__(self, other):
        if not isinstance(other, LatticeTable):
            return NotImplemented
        return self.spec == other.spec and self.values.tobytes() == other.values.tobytes()

    def __repr__(self):
        return f"LatticeTable({self.spec!r})"

    def y_index(self, y):
        spec = self.spec
        k = 0 if spec.y_count == 1 else round((y - spec.y_start) / spec.y_step)
        k = min(max(k, 0), spec.y_count - 1)
        return k, abs(self._ys[k] - y) <= Y_TOL

    def query(self, y, n, i):
        return query(self, y, n, i)


def _plane(args):
    y, n_max, i_cap = args
    out = np.empty((n_max, i_cap + 1))
    for n in range(1, n_max + 1):
        for i in range(i_cap + 1):
            out[n - 1, i] = outcome_probability_bought(y, n, i)
    return out


def build_lattice(spec, cap=DEFAULT_CELL_CAP, allow_large=False, workers=1):
    """Evaluate every cell of ``spec``.

    Refuses grids above ``cap`` cells unless ``allow_large``. With
    ``workers > 1`` the ``y`` planes are computed in separate processes;
    the result does not depend on the worker count.
    """
    if spec.cells > cap and not allow_large:
        raise ResourceGuardError(spec.cells, cap)
    jobs = [(y, spec.n_max, spec.i_cap) for y in spec.y_values()]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            planes = list(pool.map(_plane, jobs))
    else:
        planes = [_plane(job) for job in jobs]
    return LatticeTable(spec, np.stack(planes))


def query(table, y, n, i):
    """Stored ``p(y, n, i)``; off-grid coordinates raise :class:`OffLatticeError`."""
    spec = table.spec
    k, on_grid = table.y_index(y)
    near_n = min(max(int(round(n)), 1), spec.n_max)
    near_i = min(max(int(round(i)), 0), spec.i_cap)
    nearest = (table._ys[k], near_n, near_i)
    if not on_grid:
        raise OffLatticeError(f"y = {y!r} is not a grid value", nearest)
    if n != near_n:
        raise OffLatticeError(f"n = {n!r} outside 1..{spec.n_max}", nearest)
    if i != near_i:
        raise OffLatticeError(f"i = {i!r} outside 0..{spec.i_cap}", nearest)
    return float(table.values[k, near_n - 1, near_i])


def _digest(payload):
    return hashlib.blake2b(payload, digest_size=_DIGEST_SIZE).digest()


def save(table, path):
    spec = table.spec
    payload = table.values.tobytes()
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, spec.y_count, spec.n_max,
                          spec.i_cap + 1, 0, spec.y_start, spec.y_step)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
        fh.write(_digest(payload))


def load(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise LatticeFormatError(f"file is {len(blob)} bytes, shorter than the header")
    magic, version, y_count, n_count, i_count, _, y_start, y_step = \
        _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise LatticeFormatError(f"bad magic {magic!r}; not a lattice file")
    if version != FORMAT_VERSION:
        raise LatticeVersionError(version, FORMAT_VERSION)
    if i_count < 1:
        raise LatticeFormatError("i count must be at least 1")
    try:
        spec = LatticeSpec(y_start, y_step, y_count, n_count, i_count - 1)
    except DomainError as exc:
        raise LatticeFormatError(f"invalid header: {exc}") from None
    size = spec.cells * 8
    expected = _HEADER.size + size + _DIGEST_SIZE
    if len(blob) != expected:
        raise LatticeFormatError(
            f"file is {len(blob)} bytes, expected {expected} (truncated or padded)")
    payload = blob[_HEADER.size:_HEADER.size + size]
    if _digest(payload) != blob[_HEADER.size + size:]:
        raise ChecksumError("payload checksum mismatch")
    values = np.frombuffer(payload, dtype="<f8").reshape(spec.shape).copy()
    return LatticeTable(spec, values)


def export_csv(table, dest):
    """Write ``y,n,i,p`` rows to an open text file."""
    dest.write("y,n,i,p\n")
    for k, y in enumerate(table._ys):
        for n in range(1, table.spec.n_max + 1):
            row = table.values[k, n - 1]
            for i, p in enumerate(row):
                dest.write(f"{y!r},{n},{i},{float(p)!r}\n")
