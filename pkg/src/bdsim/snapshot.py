"""Binary field snapshots.

Layout (little-endian): a 32-byte header ``magic "BDSF" | version u32 | N u32 |
L f64 | field count u32 | flags u32 | reserved u32`` followed, per field, by the
``N x N`` coefficient array in row-major order with real and imaginary parts
interleaved as f64.
"""
from __future__ import annotations

import struct

import numpy as np

from .errors import InvalidInputError
from .grid import FourierGrid, SpectralField

__all__ = ["write_snapshot", "read_snapshot", "FLAG_REAL", "FLAG_MEAN_ZERO", "HEADER"]

MAGIC = b"BDSF"
VERSION = 1
HEADER = struct.Struct("<4sIIdIII")
FLAG_REAL = 1
FLAG_MEAN_ZERO = 2


def write_snapshot(path, grid: FourierGrid, fields, flags: int | None = None) -> None:
    arrays = []
    real = mean_zero = True
    for f in fields:
        if isinstance(f, SpectralField):
            real &= f.is_real
            mean_zero &= f.is_mean_zero
            f = f.coeffs
        a = np.asarray(f, dtype="<c16")
        if a.shape != (grid.n, grid.n):
            raise InvalidInputError("field shape does not match grid")
        arrays.append(a)
    if flags is None:
        flags = (FLAG_REAL if real else 0) | (FLAG_MEAN_ZERO if mean_zero else 0)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, grid.n, float(grid.period), len(arrays), flags, 0))
        for a in arrays:
            fh.write(np.ascontiguousarray(a).tobytes())


def read_snapshot(path):
    """Return ``(grid, [coeff arrays], flags)``."""
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
        if len(head) != HEADER.size:
            raise InvalidInputError("truncated snapshot header")
        magic, version, n, period, count, flags, _ = HEADER.unpack(head)
        if magic != MAGIC:
            raise InvalidInputError(f"bad snapshot magic {magic!r}")
        if version != VERSION:
            raise InvalidInputError(f"unsupported snapshot version {version}")
        grid = FourierGrid(n, period)
        size = n * n
        fields = []
        for _ in range(count):
            buf = fh.read(16 * size)
            if len(buf) != 16 * size:
                raise InvalidInputError("truncated snapshot body")
            fields.append(np.frombuffer(buf, dtype="<c16").reshape(n, n).astype(complex))
    return grid, fields, flags
