"""Uniform space-time field container and its text file format.

A field is a real-valued function sampled on a tensor grid: ``values[i, j]``
is the sample at position ``x[i]``, time ``t[j]``.  Both axes must be
strictly increasing and uniformly spaced; single-sample axes are allowed
(a window can collapse an axis) but then carry no spacing.

File format (UTF-8 text, ``.field`` by convention)::

    # fieldgrid v1
    x: <N_x space-separated decimals>
    t: <N_t space-separated decimals>
    <N_x rows of N_t space-separated values>

Values are written with shortest round-trip precision, so
``load_field(save_field(g))`` reproduces ``g`` exactly.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FieldFormatError, GridError, WindowError

__all__ = ["FieldGrid", "load_field", "save_field", "window_time"]

# Relative tolerance on axis uniformity: successive spacings may deviate
# from the mean spacing by at most this factor.
UNIFORMITY_RTOL = 1e-9

_MAGIC = "# fieldgrid v1"


def _check_axis(name: str, axis: np.ndarray) -> None:
    if axis.ndim != 1 or axis.size == 0:
        raise GridError(f"{name} axis must be a non-empty 1-d array")
    if not np.all(np.isfinite(axis)):
        raise GridError(f"{name} axis contains non-finite entries")
    if axis.size == 1:
        return
    d = np.diff(axis)
    if np.any(d <= 0):
        k = int(np.argmax(d <= 0))
        raise GridError(
            f"{name} axis is not strictly increasing at index {k}: "
            f"{axis[k]} -> {axis[k + 1]}"
        )
    h = (axis[-1] - axis[0]) / (axis.size - 1)
    dev = np.abs(d - h)
    worst = int(np.argmax(dev))
    if dev[worst] > UNIFORMITY_RTOL * h:
        raise GridError(
            f"{name} axis is not uniform: spacing at index {worst} is "
            f"{d[worst]:.17g}, mean spacing {h:.17g}"
        )


@dataclass(frozen=True)
class FieldGrid:
    """Immutable field samples on a uniform rectangular grid.

    Parameters
    ----------
    x : array_like, shape (N_x,)
        Spatial sample positions, strictly increasing, uniform.
    t : array_like, shape (N_t,)
        Temporal sample positions, strictly increasing, uniform.
    values : array_like, shape (N_x, N_t)
        Field samples; all entries must be finite.
    """

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        t = np.ascontiguousarray(self.t, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        _check_axis("x", x)
        _check_axis("t", t)
        if values.shape != (x.size, t.size):
            raise GridError(
                f"values shape {values.shape} does not match grid "
                f"({x.size}, {t.size})"
            )
        if not np.all(np.isfinite(values)):
            raise GridError("values contain non-finite entries")
        for arr in (x, t, values):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)

    @property
    def n_x(self) -> int:
        return self.x.size

    @property
    def n_t(self) -> int:
        return self.t.size

    @property
    def dx(self) -> float:
        if self.x.size < 2:
            raise GridError("dx undefined for a single-sample x axis")
        return float((self.x[-1] - self.x[0]) / (self.x.size - 1))

    @property
    def dt(self) -> float:
        if self.t.size < 2:
            raise GridError("dt undefined for a single-sample t axis")
        return float((self.t[-1] - self.t[0]) / (self.t.size - 1))

    @property
    def x_extent(self) -> float:
        return float(self.x[-1] - self.x[0])

    @property
    def t_extent(self) -> float:
        return float(self.t[-1] - self.t[0])


def window_time(grid: FieldGrid, t_lo: float, t_hi: float) -> FieldGrid:
    """Restrict a field to the time samples nearest [t_lo, t_hi].

    Bounds snap to the nearest sample within dt/2; the window keeps every
    sample between the snapped bounds inclusive.  Windowing twice with the
    same bounds is a no-op.
    """
    if t_hi < t_lo:
        raise WindowError(f"empty window: t_lo={t_lo} > t_hi={t_hi}")
    t = grid.t
    if t_hi < t[0] or t_lo > t[-1]:
        raise WindowError(
            f"window [{t_lo}, {t_hi}] does not intersect grid span "
            f"[{t[0]}, {t[-1]}]"
        )
    i_lo = int(np.argmin(np.abs(t - t_lo)))
    i_hi = int(np.argmin(np.abs(t - t_hi)))
    if i_hi < i_lo:
        raise WindowError(f"window [{t_lo}, {t_hi}] snaps to no samples")
    return FieldGrid(grid.x, t[i_lo : i_hi + 1], grid.values[:, i_lo : i_hi + 1])


def save_field(grid: FieldGrid, path: str | os.PathLike) -> None:
    """Write a field to the v1 text format with exact round-trip precision."""
    buf = io.StringIO()
    buf.write(_MAGIC + "\n")
    buf.write("x: " + " ".join(repr(float(v)) for v in grid.x) + "\n")
    buf.write("t: " + " ".join(repr(float(v)) for v in grid.t) + "\n")
    for row in grid.values:
        buf.write(" ".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def _parse_axis_line(line: str, key: str, lineno: int) -> np.ndarray:
    parts = line.split()
    if not parts or parts[0] != key + ":":
        raise FieldFormatError(
            f"line {lineno}: expected '{key}:' axis header, got {line[:40]!r}"
        )
    if len(parts) == 1:
        raise FieldFormatError(f"line {lineno}: empty {key} axis")
    try:
        return np.array([float(v) for v in parts[1:]], dtype=float)
    except ValueError as exc:
        raise FieldFormatError(f"line {lineno}: bad {key} value: {exc}") from None


def load_field(path: str | os.PathLike) -> FieldGrid:
    """Read a field from the v1 text format.

    Raises
    ------
    FieldFormatError
        On a bad magic line, malformed axis header, non-numeric token, or
        a value block whose shape disagrees with the axes.
    """
    with open(path, "r", encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic.strip() != _MAGIC:
            raise FieldFormatError(
                f"bad magic line {magic!r}, expected {_MAGIC!r}"
            )
        x = _parse_axis_line(fh.readline(), "x", 2)
        t = _parse_axis_line(fh.readline(), "t", 3)
        rows = []
        for lineno, line in enumerate(fh, start=4):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != t.size:
                raise FieldFormatError(
                    f"line {lineno}: expected {t.size} values, got {len(parts)}"
                )
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise FieldFormatError(f"line {lineno}: bad value: {exc}") from None
    if len(rows) != x.size:
        raise FieldFormatError(
            f"expected {x.size} value rows, got {len(rows)}"
        )
    values = np.array(rows, dtype=float).reshape(x.size, t.size)
    # structural problems are format errors, but an axis that parses and
    # then violates a grid invariant (non-uniform, duplicated sample) is
    # a data problem and surfaces as GridError from the constructor
    return FieldGrid(x, t, values)
