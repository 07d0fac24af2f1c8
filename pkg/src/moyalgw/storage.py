"""Flat binary and CSV serialization of fields.

Binary layout: magic ``MGF1`` (4 bytes), int64 dim, int64 points, float64
extent, float64 theta, then the complex128 samples row-major.  theta is
carried so a file round-trips the full physical context; it is not part of
GridSpec and is returned alongside the field.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .algebra import MatrixField
from .errors import ConfigError
from .grid import GridField, GridSpec

__all__ = [
    "write_grid_field",
    "read_grid_field",
    "grid_field_to_csv",
    "matrix_field_to_csv",
]

_MAGIC = b"MGF1"
_HEADER = struct.Struct("<4sqqdd")


def write_grid_field(path, f: GridField, theta: float) -> None:
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(_MAGIC, f.spec.dim, f.spec.points, f.spec.extent, theta)
        )
        fh.write(np.ascontiguousarray(f.values, dtype=np.complex128).tobytes())


def read_grid_field(path) -> tuple[GridField, float]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigError(f"{path}: truncated grid field file")
    magic, dim, points, extent, theta = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ConfigError(f"{path}: not a grid field file")
    spec = GridSpec(int(dim), float(extent), int(points))
    n = points**dim
    vals = np.frombuffer(raw, dtype=np.complex128, count=n, offset=_HEADER.size)
    return GridField(spec, vals.reshape((points,) * dim).copy()), float(theta)


def grid_field_to_csv(path, f: GridField) -> None:
    """Plot-ready table: one row per node with coordinates and Re/Im."""
    axes = [f.spec.axis()] * f.spec.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(f.spec.dim)] + ["re", "im"])
        it = np.ndindex(*f.values.shape)
        for idx in it:
            row = [f"{axes[d][idx[d]]:.12g}" for d in range(f.spec.dim)]
            v = f.values[idx]
            w.writerow(row + [f"{v.real:.15g}", f"{v.imag:.15g}"])


def matrix_field_to_csv(path, m: MatrixField) -> None:
    """Coefficient table: row index, column index, Re, Im."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "l", "re", "im"])
        for k in range(m.spec.size):
            for l in range(m.spec.size):
                v = m.coeff[k, l]
                w.writerow(
                    [
                        "+".join(str(i) for i in m.spec.multi_index(k)),
                        "+".join(str(i) for i in m.spec.multi_index(l)),
                        f"{v.real:.15g}",
                        f"{v.imag:.15g}",
                    ]
                )
