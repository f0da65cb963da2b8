"""Sparse coefficient recovery by modified sequential-thresholding least squares.

A threshold ``lam`` keeps coefficient j only while

    lam * max(1, ||b|| / ||G_j||)  <=  |c_j|  <=  (1 / lam) * min(1, ||b|| / ||G_j||)

so the bounds adapt to each column's scale.  Candidate thresholds are
ranked by the loss

    L(lam) = ||G (c_lam - c_ls)|| / ||G c_ls||  +  nnz(c_lam) / J

and the smallest minimizer wins, trading data fidelity against support
size without any tuning parameter beyond the threshold grid itself.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, RankDeficiencyWarning

__all__ = [
    "SparseSolution",
    "default_lambda_grid",
    "least_squares",
    "mstls",
    "optimize_lambda",
]


def default_lambda_grid(n: int = 100) -> np.ndarray:
    """The standard threshold sweep: n log-spaced values in [1e-10, 1]."""
    return np.logspace(-10, 0, n)


def least_squares(G: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least squares; warns instead of failing on rank loss."""
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    if G.ndim != 2 or b.ndim != 1 or G.shape[0] != b.size:
        raise ParameterError(f"incompatible shapes {G.shape} and {b.shape}")
    c, _, rank, _ = np.linalg.lstsq(G, b, rcond=None)
    if rank < G.shape[1]:
        warnings.warn(
            f"system rank {rank} < {G.shape[1]} columns; minimum-norm solution",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return c


def _threshold_bounds(G: np.ndarray, b: np.ndarray, lam: float):
    norm_b = np.linalg.norm(b)
    col_norms = np.linalg.norm(G, axis=0)
    with np.errstate(divide="ignore"):
        ratio = np.where(col_norms > 0, norm_b / np.maximum(col_norms, 1e-300), np.inf)
    lower = lam * np.maximum(1.0, ratio)
    upper = (1.0 / lam) * np.minimum(1.0, ratio)
    return lower, upper


def mstls(G: np.ndarray, b: np.ndarray, lam: float, max_sweeps: int | None = None) -> np.ndarray:
    """One thresholded least-squares fixed point at threshold ``lam``.

    Starting from the full least-squares solution, indices violating the
    scale-adapted bounds are deactivated and the remaining columns are
    refit, until the active set is stable or empty.  The sweep count is
    capped at J + 1 (each sweep removes at least one index or stops).
    """
    if not (0.0 < lam):
        raise ParameterError(f"lam must be positive, got {lam}")
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    n = G.shape[1]
    if max_sweeps is None:
        max_sweeps = n + 1
    lower, upper = _threshold_bounds(G, b, lam)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        c = least_squares(G, b)
        active = np.ones(n, dtype=bool)
        for _ in range(max_sweeps):
            keep = active & (np.abs(c) >= lower) & (np.abs(c) <= upper)
            if not keep.any():
                return np.zeros(n)
            if np.array_equal(keep, active):
                break
            active = keep
            c = np.zeros(n)
            c[active] = least_squares(G[:, active], b)
    out = np.where(active, c, 0.0)
    return out


@dataclass(frozen=True)
class SparseSolution:
    """Result of the thresholded sweep on one weak-form system."""

    coefficients: np.ndarray          # in the units the system was assembled in
    lambda_hat: float
    relative_residual: float          # ||b - G c|| / ||b|| on that same system
    loss_curve: np.ndarray = field(repr=False)  # (n_lambda, 2): lam, loss
    support: tuple[int, ...] = ()

    @property
    def nnz(self) -> int:
        return len(self.support)


def optimize_lambda(
    G: np.ndarray,
    b: np.ndarray,
    lambda_grid: np.ndarray | None = None,
) -> SparseSolution:
    """Sweep the threshold grid and keep the smallest loss minimizer.

    A zero right-hand side short-circuits to the empty model at the
    smallest grid value (nothing to fit, and every threshold agrees).
    """
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0):
        raise ParameterError("lambda grid must be a non-empty positive 1-d array")
    grid = np.sort(grid)
    n = G.shape[1]

    if np.linalg.norm(b) == 0.0:
        zeros = np.zeros(n)
        curve = np.column_stack([grid, np.zeros_like(grid)])
        return SparseSolution(
            coefficients=zeros,
            lambda_hat=float(grid[0]),
            relative_residual=0.0,
            loss_curve=curve,
            support=(),
        )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        c_ls = least_squares(G, b)
    denom = np.linalg.norm(G @ c_ls)
    losses = np.empty(grid.size)
    solutions = []
    for i, lam in enumerate(grid):
        c = mstls(G, b, lam)
        misfit = np.linalg.norm(G @ (c - c_ls)) / denom if denom > 0 else 0.0
        losses[i] = misfit + np.count_nonzero(c) / n
        solutions.append(c)
    best = int(np.argmin(losses))
    # smallest lambda attaining the minimum (argmin already returns the
    # first index, and the grid is sorted ascending)
    c_hat = solutions[best]
    residual = float(np.linalg.norm(b - G @ c_hat) / np.linalg.norm(b))
    return SparseSolution(
        coefficients=c_hat,
        lambda_hat=float(grid[best]),
        relative_residual=residual,
        loss_curve=np.column_stack([grid, losses]),
        support=tuple(int(j) for j in np.flatnonzero(c_hat)),
    )
