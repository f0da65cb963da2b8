"""Data ensembling by time subsampling.

Every decimation step d from 1 to max_ds contributes d phase-shifted
subsets (offsets 1..d), giving ``max_ds (max_ds + 1) / 2`` derived
datasets whose union at each d covers every original sample.  Discovery
runs independently on each subset, hyperparameters re-selected from
scratch, and per-term statistics summarize the spread.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discovery import DiscoveryResult, discover
from .errors import AggregationError, ParameterError, WeakbeamError
from .grid import FieldGrid
from .weakform import LibrarySpec, default_library

__all__ = [
    "TermStats",
    "EnsembleRun",
    "EnsembleResult",
    "subsample_time",
    "run_ensemble",
    "aggregate",
]


def subsample_time(grid: FieldGrid, d: int, offset: int) -> FieldGrid:
    """Every d-th time sample starting at 1-based offset (1 <= offset <= d)."""
    if d < 1 or d != int(d):
        raise ParameterError(f"decimation step must be a positive integer, got {d}")
    if not (1 <= offset <= d) or offset != int(offset):
        raise ParameterError(f"offset must lie in [1, {d}], got {offset}")
    sl = slice(int(offset) - 1, None, int(d))
    return FieldGrid(grid.x, grid.t[sl], grid.values[:, sl])


@dataclass(frozen=True)
class EnsembleRun:
    """One subset's outcome; failures carry the message, never vanish."""

    d: int
    offset: int
    result: DiscoveryResult | None = field(repr=False, default=None)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class TermStats:
    """Coefficient statistics over the runs where a term was active."""

    name: str
    n_active: int
    mean: float
    median: float
    std: float
    min: float
    max: float


@dataclass(frozen=True)
class EnsembleResult:
    runs: tuple[EnsembleRun, ...]
    stats: dict[str, TermStats]
    modal_support: tuple[str, ...]
    support_agreement: float  # fraction of successful runs matching the mode

    @property
    def n_success(self) -> int:
        return sum(1 for r in self.runs if r.ok)

    def coefficient_values(self, name: str) -> np.ndarray:
        """Unscaled coefficient of one term across successful runs (0 when
        inactive), ordered as the runs are."""
        vals = []
        for r in self.runs:
            if r.ok:
                vals.append(r.result.coefficient(name))
        return np.array(vals)


def run_ensemble(
    grid: FieldGrid,
    max_ds: int = 10,
    tau: float = 1e-9,
    library: LibrarySpec | None = None,
    lambda_grid: np.ndarray | None = None,
) -> EnsembleResult:
    """Discover on every time-decimated subset and aggregate.

    Hyperparameters (corner, supports, strides, threshold) are selected
    independently per subset, so the ensemble probes the full selection
    pipeline, not just the regression.
    """
    if max_ds < 1 or max_ds != int(max_ds):
        raise ParameterError(f"max_ds must be a positive integer, got {max_ds}")
    library = library or default_library()
    runs = []
    for d in range(1, int(max_ds) + 1):
        for offset in range(1, d + 1):
            sub = subsample_time(grid, d, offset)
            try:
                result = discover(sub, tau=tau, library=library, lambda_grid=lambda_grid)
                runs.append(EnsembleRun(d=d, offset=offset, result=result))
            except WeakbeamError as exc:
                runs.append(
                    EnsembleRun(d=d, offset=offset, error=f"{type(exc).__name__}: {exc}")
                )
    return aggregate(tuple(runs), library)


def aggregate(runs: tuple[EnsembleRun, ...], library: LibrarySpec | None = None) -> EnsembleResult:
    """Per-term statistics and modal support over successful runs."""
    library = library or default_library()
    successes = [r for r in runs if r.ok]
    if not successes:
        detail = "; ".join(
            f"d={r.d} offset={r.offset}: {r.error}" for r in runs[:5]
        )
        raise AggregationError(f"all {len(runs)} ensemble runs failed ({detail} ...)")

    stats: dict[str, TermStats] = {}
    for name in library.term_names:
        values = np.array(
            [
                r.result.coefficient(name)
                for r in successes
                if name in r.result.support
            ]
        )
        if values.size == 0:
            continue
        spread = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        stats[name] = TermStats(
            name=name,
            n_active=int(values.size),
            mean=float(np.mean(values)),
            median=float(np.median(values)),
            std=spread,
            min=float(np.min(values)),
            max=float(np.max(values)),
        )

    supports = [tuple(sorted(r.result.support)) for r in successes]
    counts: dict[tuple[str, ...], int] = {}
    for s in supports:
        counts[s] = counts.get(s, 0) + 1
    # deterministic mode: highest count, ties broken lexicographically
    modal_count = max(counts.values())
    modal_support = min(s for s, c in counts.items() if c == modal_count)
    return EnsembleResult(
        runs=tuple(runs),
        stats=stats,
        modal_support=modal_support,
        support_agreement=modal_count / len(successes),
    )
