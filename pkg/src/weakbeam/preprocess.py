"""Time-axis conditioning: decimation and zero-phase band-pass filtering."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .grid import FieldGrid

__all__ = ["downsample_time", "bandpass_time"]


def downsample_time(grid: FieldGrid, factor: int) -> FieldGrid:
    """Keep every ``factor``-th time sample, starting at the first.

    The result's time step is ``factor * dt``; no anti-alias filter is
    applied (pair with :func:`bandpass_time` when the band demands one).
    """
    if factor < 1 or factor != int(factor):
        raise ParameterError(f"downsample factor must be a positive integer, got {factor}")
    factor = int(factor)
    return FieldGrid(grid.x, grid.t[::factor], grid.values[:, ::factor])


def bandpass_time(
    grid: FieldGrid,
    f_lo: float,
    f_hi: float,
    taper_frac: float = 0.1,
) -> FieldGrid:
    """Zero-phase band-pass along the time axis of every spatial row.

    Each row is demeaned, transformed with a real FFT, multiplied by a
    frequency mask, and inverse transformed.  The mask is 1 on
    ``[f_lo, f_hi]``, rolls off with raised-cosine flanks of width
    ``taper_frac * (f_hi - f_lo)`` placed outside the band, and is 0
    beyond the flanks.  Filtering is applied in a single pass on the full
    record; no group delay is introduced.

    Raises
    ------
    ParameterError
        If the band is empty, non-positive, or ``f_hi`` exceeds the
        Nyquist frequency ``1 / (2 dt)``.
    """
    if not (0.0 <= f_lo < f_hi):
        raise ParameterError(f"need 0 <= f_lo < f_hi, got [{f_lo}, {f_hi}]")
    if not (0.0 <= taper_frac):
        raise ParameterError(f"taper_frac must be non-negative, got {taper_frac}")
    dt = grid.dt
    nyquist = 0.5 / dt
    if f_hi > nyquist:
        raise ParameterError(
            f"f_hi={f_hi} exceeds Nyquist frequency {nyquist} at dt={dt}"
        )
    n = grid.n_t
    freqs = np.fft.rfftfreq(n, d=dt)
    width = taper_frac * (f_hi - f_lo)
    mask = np.zeros_like(freqs)
    inside = (freqs >= f_lo) & (freqs <= f_hi)
    mask[inside] = 1.0
    if width > 0:
        lo_flank = (freqs >= f_lo - width) & (freqs < f_lo)
        mask[lo_flank] = 0.5 * (1 + np.cos(np.pi * (f_lo - freqs[lo_flank]) / width))
        hi_flank = (freqs > f_hi) & (freqs <= f_hi + width)
        mask[hi_flank] = 0.5 * (1 + np.cos(np.pi * (freqs[hi_flank] - f_hi) / width))

    rows = grid.values - grid.values.mean(axis=1, keepdims=True)
    spectrum = np.fft.rfft(rows, axis=1)
    filtered = np.fft.irfft(spectrum * mask, n=n, axis=1)
    return FieldGrid(grid.x, grid.t, filtered)
