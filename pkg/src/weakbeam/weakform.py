"""Weak-form linear system assembly for PDE discovery.

The field ``w(x, t)`` is tested against separable compactly supported
functions ``psi(x, t) = phi_x(x - x_k) * phi_t(t - t_k)`` centered on a
subgrid of query points, where each 1-d factor is the piecewise
polynomial ``phi(y) = (1 - (y / c)^2)^p`` on ``|y| <= c`` and zero
outside.  Integration by parts moves every derivative in the candidate
library onto the test function, so the data is never differentiated:

    < psi, D w > = (-1)^|D| < D psi, w >

Inner products are discretized with the uniform quadrature weight
``(X / N_x) * (T / N_t)`` and evaluated for all query points at once by
separable FFT convolutions.  Columns of the resulting matrix ``G`` hold
one candidate term each; ``b`` holds the second time derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.signal import fftconvolve

from .errors import DegenerateDataError, ParameterError, SelectionError
from .grid import FieldGrid

__all__ = [
    "TermSpec",
    "LibrarySpec",
    "default_library",
    "TestFunctionBasis",
    "CornerDiagnostic",
    "WeakSystem",
    "reference_testfn_1d",
    "spectral_corner",
    "select_support",
    "default_query_strides",
    "rescale",
    "assemble",
    "unscale_coefficients",
]

# Hard cap on the polynomial degree parameter; beyond this the profile is
# so narrow that quadrature on integer samples loses accuracy.
P_MAX = 16

LAMBDA_GRID_SIZE = 100

# Queries per axis the default stride rule aims for.
_TARGET_QUERIES_PER_AXIS = 44

# cap on corner-refinement passes; every observed case fixes within ~6
_CORNER_MAX_ZOOMS = 32


@dataclass(frozen=True)
class TermSpec:
    """One candidate right-hand-side term: ``w^power`` differentiated."""

    dx_order: int
    dt_order: int
    power: int

    def __post_init__(self):
        if self.dx_order < 0 or self.dt_order < 0:
            raise ParameterError("derivative orders must be non-negative")
        if self.power not in (0, 1):
            raise ParameterError(f"unsupported field power {self.power}")
        if self.power == 0 and (self.dx_order or self.dt_order):
            raise ParameterError("constant term cannot carry derivatives")

    @property
    def name(self) -> str:
        if self.power == 0:
            return "1"
        return "w" + ("_" + "x" * self.dx_order + "t" * self.dt_order
                      if self.dx_order or self.dt_order else "")


@dataclass(frozen=True)
class LibrarySpec:
    """Left-hand side plus the candidate terms it is regressed onto."""

    lhs: TermSpec
    terms: tuple[TermSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ParameterError("library needs at least one candidate term")
        if len(set(self.terms)) != len(self.terms):
            raise ParameterError("duplicate library terms")
        if self.lhs in self.terms:
            raise ParameterError("lhs may not appear among the candidates")

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.terms)

    def max_orders(self) -> tuple[int, int]:
        """Largest (dx, dt) orders over candidates and lhs."""
        dx = max([t.dx_order for t in self.terms] + [self.lhs.dx_order])
        dt = max([t.dt_order for t in self.terms] + [self.lhs.dt_order])
        return dx, dt


def default_library() -> LibrarySpec:
    """``w_tt`` against {w_t, w_x, w_xx, w_xxx, w_xxxx, w, 1}."""
    return LibrarySpec(
        lhs=TermSpec(0, 2, 1),
        terms=(
            TermSpec(0, 1, 1),
            TermSpec(1, 0, 1),
            TermSpec(2, 0, 1),
            TermSpec(3, 0, 1),
            TermSpec(4, 0, 1),
            TermSpec(0, 0, 1),
            TermSpec(0, 0, 0),
        ),
    )


@dataclass(frozen=True)
class TestFunctionBasis:
    """Per-axis test function parameters: degree p, half-width m, stride s."""

    p_x: int
    p_t: int
    m_x: int
    m_t: int
    s_x: int = 1
    s_t: int = 1

    def __post_init__(self):
        for name in ("p_x", "p_t", "m_x", "m_t", "s_x", "s_t"):
            v = getattr(self, name)
            if v < 1 or v != int(v):
                raise ParameterError(f"{name} must be a positive integer, got {v}")


@dataclass(frozen=True)
class CornerDiagnostic:
    """Changepoint of the cumulative log-power spectrum along one axis."""

    corner_bin: int
    tau_hat: float  # log10(corner_bin), the changepoint abscissa
    n_bins: int


def reference_testfn_1d(p: int, m: int, deriv: int, h: float) -> np.ndarray:
    """Sample the deriv-th derivative of ``(1 - (y/c)^2)^p`` on its support.

    The support is ``[-c, c]`` with ``c = m * h``; samples are taken at
    ``y_j = j * h`` for ``j = -m .. m`` (2m + 1 points).  The profile has
    unit peak, and every derivative of order below ``p`` vanishes exactly
    at the endpoints; that exactness is preserved by evaluating the
    factored form ``(1 - u^2)^(p - r) * Q_r(u)`` where ``Q_r`` follows the
    recurrence ``Q_{r+1} = (1 - u^2) Q_r' - 2 (p - r) u Q_r``.
    """
    if p < 1 or p != int(p):
        raise ParameterError(f"p must be a positive integer, got {p}")
    if m < 1 or m != int(m):
        raise ParameterError(f"m must be a positive integer, got {m}")
    if h <= 0 or not math.isfinite(h):
        raise ParameterError(f"h must be positive and finite, got {h}")
    if deriv < 0 or deriv != int(deriv):
        raise ParameterError(f"deriv must be a non-negative integer, got {deriv}")
    if deriv > p:
        raise ParameterError(
            f"derivative order {deriv} exceeds polynomial degree parameter {p}"
        )
    u = np.arange(-m, m + 1, dtype=float) / m
    q = Polynomial([1.0])
    one_minus_u2 = Polynomial([1.0, 0.0, -1.0])
    ramp = Polynomial([0.0, 1.0])
    for r in range(deriv):
        q = one_minus_u2 * q.deriv() - 2.0 * (p - r) * ramp * q
    vals = (1.0 - u * u) ** (p - deriv) * q(u)
    return vals / (m * h) ** deriv


def _segment_ssr_prefix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """SSR of the best-fit line over each prefix x[:k+1], y[:k+1]."""
    n = np.arange(1, x.size + 1, dtype=float)
    sx = np.cumsum(x)
    sy = np.cumsum(y)
    sxx = np.cumsum(x * x)
    sxy = np.cumsum(x * y)
    syy = np.cumsum(y * y)
    vxx = sxx - sx * sx / n
    vxy = sxy - sx * sy / n
    vyy = syy - sy * sy / n
    with np.errstate(divide="ignore", invalid="ignore"):
        ssr = vyy - np.where(vxx > 0, vxy * vxy / np.maximum(vxx, 1e-300), 0.0)
    return np.maximum(ssr, 0.0)


def _changepoint(y: np.ndarray, hi: int) -> int:
    """Two-segment line fit over ``y[:hi]`` vs bin index; returns the
    1-based bin of the shared breakpoint (each segment needs >= 2 points)."""
    if hi < 3:
        return max(1, hi // 2)
    yv = y[:hi]
    k = np.arange(1, hi + 1, dtype=float)
    ssr_left = _segment_ssr_prefix(k, yv)
    ssr_right = _segment_ssr_prefix(k[::-1], yv[::-1])[::-1]
    b_candidates = np.arange(1, hi - 1)
    total = ssr_left[b_candidates] + ssr_right[b_candidates]
    return int(b_candidates[int(np.argmin(total))]) + 1


def spectral_corner(values: np.ndarray, axis: int) -> CornerDiagnostic:
    """Locate the knee of the power spectrum along one axis.

    The squared magnitude of the real FFT is averaged over the other
    axis, bin 0 is dropped, and the cumulative sum of the log-power is
    fit with two straight lines over bin index, trying every admissible
    changepoint.  Past the signal band the log-power sits on a flat noise
    floor, so its cumulative sum is exactly linear there and the
    changepoint minimizing the total squared residual marks the
    transition.

    A single pass can overshoot badly when the spectrum trails off
    gradually instead of hitting the floor at a cliff: the long floor
    dominates the fit and drags the breakpoint into it.  The fit is
    therefore repeated on the window [1, 2 b] around the previous answer
    until the breakpoint reproduces itself; a sharp knee is its own fixed
    point, while a drawn-out tail collapses onto the curvature maximum.

    Conversely, on spectra with a strong narrowband peak the refinement
    can collapse into the excitation band itself, where noise by
    definition does not dominate.  The corner is therefore floored at two
    octaves above the dominant bin.  ``tau_hat`` reports the final
    abscissa in log10-bin units.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ParameterError("expected a 2-d field array")
    if axis not in (0, 1):
        raise ParameterError(f"axis must be 0 or 1, got {axis}")
    power = np.abs(np.fft.rfft(values, axis=axis)) ** 2
    power = power.mean(axis=1 - axis)
    n = values.shape[axis]
    n_bins = n // 2
    power = power[1 : n_bins + 1]
    if power.size == 0 or power.max() <= 0.0:
        raise DegenerateDataError("field has no spectral content along axis")
    # exact-zero bins (e.g. a masked stopband) get a relative floor so the
    # log stays finite; the cliff itself still dominates the fit
    floored = np.maximum(power, power.max() * 1e-30)
    y = np.cumsum(np.log10(floored))
    if n_bins < 3:
        corner = max(1, n_bins // 2)
        return CornerDiagnostic(corner, math.log10(corner), n_bins)
    b = _changepoint(y, n_bins)
    seen = {b}
    for _ in range(_CORNER_MAX_ZOOMS):
        b_next = _changepoint(y, min(n_bins, 2 * b))
        if b_next == b or b_next in seen:
            b = b_next
            break
        seen.add(b_next)
        b = b_next
    k_peak = int(np.argmax(power)) + 1
    b = max(b, min(4 * k_peak, n_bins - 1))
    return CornerDiagnostic(b, math.log10(b), n_bins)


def _support_for_axis(
    n: int, corner_bin: int, tau: float, p_min: int
) -> tuple[int, int]:
    """Smallest half-width m whose test function is tau-quiet at the corner.

    The spectral magnitude of the profile at scaled frequency
    ``w = 2 pi k m / N`` is modeled by the Gaussian peak approximation
    ``exp(-w^2 / (4 p))``; p itself is tied to m through the decay
    condition ``((2m - 1) / m^2)^p <= tau`` (clamped to [p_min, P_MAX]).
    """
    m_min = 3
    m_max = (n - 1) // 2
    if m_max < m_min:
        raise SelectionError(
            f"axis of {n} samples cannot host a support (need >= {2 * m_min + 1})"
        )
    m = np.arange(m_min, m_max + 1, dtype=float)
    log_tau = math.log(tau)
    p = np.ceil(log_tau / np.log((2 * m - 1) / m**2))
    p = np.clip(p, p_min, P_MAX)
    w = 2.0 * math.pi * corner_bin * m / n
    ratio = np.exp(-(w**2) / (4.0 * p))
    ok = np.flatnonzero(ratio <= tau)
    idx = int(ok[0]) if ok.size else m.size - 1
    return int(m[idx]), int(p[idx])


def default_query_strides(
    grid: FieldGrid, basis: TestFunctionBasis, n_terms: int = 7
) -> tuple[int, int]:
    """Pick query strides giving roughly 44 centers per axis.

    The returned strides satisfy ``K >= 2 * n_terms`` where K is the
    total number of query points; if necessary they are reduced toward 1,
    and if even unit strides cannot reach that row count a
    :class:`SelectionError` is raised.
    """
    sizes = (grid.n_x, grid.n_t)
    ms = (basis.m_x, basis.m_t)
    s = [
        max(1, int(round((n - 2 * m) / _TARGET_QUERIES_PER_AXIS)))
        for n, m in zip(sizes, ms)
    ]

    def count(n, m, stride):
        interior = n - 2 * m
        if interior < 1:
            raise SelectionError(
                f"support half-width {m} leaves no interior on {n} samples"
            )
        return (interior - 1) // stride + 1

    def total():
        return count(sizes[0], ms[0], s[0]) * count(sizes[1], ms[1], s[1])

    while total() < 2 * n_terms and (s[0] > 1 or s[1] > 1):
        i = 0 if s[0] >= s[1] else 1
        if s[i] == 1:
            i = 1 - i
        s[i] = max(1, s[i] // 2)
    if total() < 2 * n_terms:
        raise SelectionError(
            f"only {total()} query points available, need {2 * n_terms}"
        )
    return s[0], s[1]


def select_support(
    grid: FieldGrid,
    tau: float = 1e-9,
    tau_hat: float | tuple[float, float] | None = None,
    library: LibrarySpec | None = None,
) -> TestFunctionBasis:
    """Choose test function degree, half-widths, and strides from the data.

    The corner frequency of each axis is found with
    :func:`spectral_corner` (or taken from ``tau_hat``, the changepoint
    abscissa in log10-bin units, bypassing the spectrum fit); the support
    half-width is then the smallest m whose test function spectrum has
    decayed below ``tau`` at the corner, and the degree p follows from
    the same ``tau`` through the endpoint decay condition.
    """
    if not (0.0 < tau < 1.0):
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    library = library or default_library()
    max_dx, max_dt = library.max_orders()
    sizes = (grid.n_x, grid.n_t)
    if tau_hat is None:
        corners = [
            spectral_corner(grid.values, axis).corner_bin for axis in (0, 1)
        ]
    else:
        pair = (tau_hat, tau_hat) if np.isscalar(tau_hat) else tuple(tau_hat)
        if len(pair) != 2:
            raise ParameterError("tau_hat must be a scalar or a pair")
        corners = [
            min(max(1, int(round(10.0 ** th))), n // 2)
            for th, n in zip(pair, sizes)
        ]
    m_x, p_x = _support_for_axis(grid.n_x, corners[0], tau, max_dx + 1)
    m_t, p_t = _support_for_axis(grid.n_t, corners[1], tau, max_dt + 1)
    basis = TestFunctionBasis(p_x=p_x, p_t=p_t, m_x=m_x, m_t=m_t)
    s_x, s_t = default_query_strides(grid, basis, n_terms=library.n_terms)
    return TestFunctionBasis(p_x=p_x, p_t=p_t, m_x=m_x, m_t=m_t, s_x=s_x, s_t=s_t)


def rescale(grid: FieldGrid, basis: TestFunctionBasis) -> tuple[float, float, float]:
    """Scale factors (gamma_w, gamma_x, gamma_t) for conditioning.

    gamma_w normalizes the field to unit peak magnitude; gamma_x and
    gamma_t normalize each test function half-support to unit length.
    """
    amax = float(np.max(np.abs(grid.values)))
    if amax == 0.0:
        raise DegenerateDataError("cannot rescale an identically zero field")
    return 1.0 / amax, 1.0 / (basis.m_x * grid.dx), 1.0 / (basis.m_t * grid.dt)


@dataclass(frozen=True)
class WeakSystem:
    """Assembled weak-form regression system ``b ~ G c``.

    G and b live on the scaled data (gamma factors applied); coefficients
    solved from them must pass through :func:`unscale_coefficients` to
    refer to the original units.
    """

    G: np.ndarray
    b: np.ndarray
    query_points: np.ndarray  # (K, 2) integer grid indices
    basis: TestFunctionBasis
    library: LibrarySpec
    gamma_w: float
    gamma_x: float
    gamma_t: float
    condition_number: float = field(default=np.nan)

    def __post_init__(self):
        G = np.asarray(self.G, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if G.ndim != 2 or b.ndim != 1 or G.shape[0] != b.size:
            raise ParameterError("G must be (K, J) with b of length K")
        if G.shape[1] != self.library.n_terms:
            raise ParameterError("G column count must match the library")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(b))):
            raise ParameterError("assembled system contains non-finite entries")

    @property
    def n_queries(self) -> int:
        return self.G.shape[0]


def _default_query_indices(
    n: int, m: int, s: int
) -> np.ndarray:
    last = n - m - 1
    return np.arange(m, last + 1, s, dtype=int)


def assemble(
    grid: FieldGrid,
    library: LibrarySpec,
    basis: TestFunctionBasis,
    scales: tuple[float, float, float] = (1.0, 1.0, 1.0),
    query_points: np.ndarray | None = None,
) -> WeakSystem:
    """Build the weak-form system by separable FFT convolution.

    Each column of G is the discrete inner product of the field term with
    the appropriately differentiated test function at every query point,
    carrying the integration-by-parts sign ``(-1)^(dx + dt)``.  The
    result equals direct summation over each support window up to FFT
    round-off.

    ``scales = (gamma_w, gamma_x, gamma_t)`` multiplies the field and the
    axes before assembly; pass :func:`rescale` output for conditioning,
    or leave the default for raw units.
    """
    gw, gx, gt = scales
    if gw <= 0 or gx <= 0 or gt <= 0:
        raise ParameterError(f"scale factors must be positive, got {scales}")
    max_dx, max_dt = library.max_orders()
    if basis.p_x < max_dx + 1:
        raise ParameterError(
            f"p_x={basis.p_x} too low for spatial order {max_dx} (need >= {max_dx + 1})"
        )
    if basis.p_t < max_dt + 1:
        raise ParameterError(
            f"p_t={basis.p_t} too low for temporal order {max_dt} (need >= {max_dt + 1})"
        )
    n_x, n_t = grid.n_x, grid.n_t
    m_x, m_t = basis.m_x, basis.m_t
    if 2 * m_x + 1 > n_x or 2 * m_t + 1 > n_t:
        raise ParameterError(
            f"support ({2 * m_x + 1} x {2 * m_t + 1}) exceeds grid ({n_x} x {n_t})"
        )

    if query_points is None:
        xs = _default_query_indices(n_x, m_x, basis.s_x)
        ts = _default_query_indices(n_t, m_t, basis.s_t)
        ix = np.repeat(xs, ts.size)
        it = np.tile(ts, xs.size)
    else:
        pts = np.asarray(query_points, dtype=int)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
            raise ParameterError("query_points must be a non-empty (K, 2) array")
        ix, it = pts[:, 0], pts[:, 1]
        if np.any(ix < m_x) or np.any(ix > n_x - 1 - m_x) or np.any(
            it < m_t
        ) or np.any(it > n_t - 1 - m_t):
            raise ParameterError(
                "a query point's support window extends outside the grid"
            )
    pairs = np.column_stack([ix, it])

    hx, ht = gx * grid.dx, gt * grid.dt
    weight = (gx * grid.x_extent / n_x) * (gt * grid.t_extent / n_t)
    scaled = gw * grid.values

    def base_field(power: int) -> np.ndarray:
        return scaled if power == 1 else np.ones_like(scaled)

    xconv_cache: dict[tuple[int, int], np.ndarray] = {}

    def column(term: TermSpec) -> np.ndarray:
        key = (term.power, term.dx_order)
        if key not in xconv_cache:
            kx = reference_testfn_1d(basis.p_x, m_x, term.dx_order, hx)
            xconv_cache[key] = fftconvolve(
                base_field(term.power), kx[::-1, None], mode="valid"
            )
        kt = reference_testfn_1d(basis.p_t, m_t, term.dt_order, ht)
        full = fftconvolve(xconv_cache[key], kt[None, ::-1], mode="valid")
        sign = -1.0 if (term.dx_order + term.dt_order) % 2 else 1.0
        return sign * weight * full[ix - m_x, it - m_t]

    G = np.column_stack([column(t) for t in library.terms])
    b = column(library.lhs)
    cond = float(np.linalg.cond(G))
    return WeakSystem(
        G=G,
        b=b,
        query_points=pairs,
        basis=basis,
        library=library,
        gamma_w=gw,
        gamma_x=gx,
        gamma_t=gt,
        condition_number=cond,
    )


def unscale_coefficients(system: WeakSystem, c_scaled: np.ndarray) -> np.ndarray:
    """Map coefficients of the scaled system back to original units.

    Exact inverse of the column scaling induced by the gamma factors:
    relative to the lhs term, each candidate coefficient picks up
    ``gamma_w^(q - q_lhs) * gamma_x^(i_lhs - i) * gamma_t^(k_lhs - k)``.
    """
    c_scaled = np.asarray(c_scaled, dtype=float)
    if c_scaled.shape != (system.library.n_terms,):
        raise ParameterError("coefficient vector length must match the library")
    lhs = system.library.lhs
    factors = np.array(
        [
            system.gamma_w ** (t.power - lhs.power)
            * system.gamma_x ** (lhs.dx_order - t.dx_order)
            * system.gamma_t ** (lhs.dt_order - t.dt_order)
            for t in system.library.terms
        ]
    )
    return c_scaled * factors
