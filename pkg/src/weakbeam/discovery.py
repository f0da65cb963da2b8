"""End-to-end PDE discovery on one field: supports, scaling, assembly,
sparse solve, and unscaling, bundled with every diagnostic a report needs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import FieldGrid
from .sparse import SparseSolution, optimize_lambda
from .weakform import (
    CornerDiagnostic,
    LibrarySpec,
    TestFunctionBasis,
    WeakSystem,
    assemble,
    default_library,
    rescale,
    select_support,
    spectral_corner,
    unscale_coefficients,
)

__all__ = ["DiscoveryResult", "discover", "render_pde"]


def render_pde(lhs_name: str, term_names, coefficients, sig_figs: int = 6) -> str:
    """Human-readable equation, e.g. ``w_tt = -58.5218 w_xxxx``."""
    parts = []
    for name, c in zip(term_names, coefficients):
        if c == 0.0:
            continue
        mag = f"{abs(c):.{sig_figs}g}"
        body = mag if name == "1" else f"{mag} {name}"
        parts.append((c < 0, body))
    if not parts:
        return f"{lhs_name} = 0"
    out = f"{lhs_name} = "
    for i, (negative, body) in enumerate(parts):
        if i == 0:
            out += ("-" if negative else "") + body
        else:
            out += (" - " if negative else " + ") + body
    return out


@dataclass(frozen=True)
class DiscoveryResult:
    """Sparse PDE identified from one field, with all hyperparameters."""

    library: LibrarySpec
    basis: TestFunctionBasis
    coefficients: np.ndarray          # original units, dense over the library
    solution: SparseSolution = field(repr=False)  # scaled-system solve
    system: WeakSystem = field(repr=False)
    corner_x: CornerDiagnostic | None = None
    corner_t: CornerDiagnostic | None = None

    @property
    def term_names(self) -> tuple[str, ...]:
        return self.library.term_names

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.term_names[j] for j in self.solution.support)

    @property
    def lambda_hat(self) -> float:
        return self.solution.lambda_hat

    @property
    def relative_residual(self) -> float:
        return self.solution.relative_residual

    @property
    def condition_number(self) -> float:
        return self.system.condition_number

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.system.gamma_w, self.system.gamma_x, self.system.gamma_t)

    def coefficient(self, name: str) -> float:
        names = self.term_names
        if name not in names:
            raise KeyError(f"unknown term {name!r}, library has {names}")
        return float(self.coefficients[names.index(name)])

    @property
    def pde_text(self) -> str:
        return render_pde(self.library.lhs.name, self.term_names, self.coefficients)

    def as_report(self) -> dict:
        """JSON-ready summary of the discovery."""
        return {
            "pde": self.pde_text,
            "terms": list(self.term_names),
            "coefficients": [float(c) for c in self.coefficients],
            "coefficients_scaled": [float(c) for c in self.solution.coefficients],
            "support": list(self.support),
            "lambda_hat": self.lambda_hat,
            "relative_residual": self.relative_residual,
            "condition_number": self.condition_number,
            "n_queries": int(self.system.n_queries),
            "gamma": {
                "w": self.system.gamma_w,
                "x": self.system.gamma_x,
                "t": self.system.gamma_t,
            },
            "basis": {
                "p_x": self.basis.p_x,
                "p_t": self.basis.p_t,
                "m_x": self.basis.m_x,
                "m_t": self.basis.m_t,
                "s_x": self.basis.s_x,
                "s_t": self.basis.s_t,
            },
            "corner": {
                "x": None
                if self.corner_x is None
                else {"bin": self.corner_x.corner_bin, "tau_hat": self.corner_x.tau_hat},
                "t": None
                if self.corner_t is None
                else {"bin": self.corner_t.corner_bin, "tau_hat": self.corner_t.tau_hat},
            },
        }


def discover(
    grid: FieldGrid,
    tau: float = 1e-9,
    tau_hat: float | tuple[float, float] | None = None,
    library: LibrarySpec | None = None,
    basis: TestFunctionBasis | None = None,
    lambda_grid: np.ndarray | None = None,
) -> DiscoveryResult:
    """Identify a sparse PDE from one space-time field.

    Hyperparameters are selected from the data unless overridden: pass
    ``tau_hat`` to pin the spectral corner (log10-bin units) or a full
    ``basis`` to bypass selection entirely.  The regression runs on the
    rescaled system; reported coefficients are mapped back to the
    original units.
    """
    library = library or default_library()
    corner_x = corner_t = None
    if basis is None:
        if tau_hat is None:
            corner_x = spectral_corner(grid.values, 0)
            corner_t = spectral_corner(grid.values, 1)
            tau_hat = (corner_x.tau_hat, corner_t.tau_hat)
        basis = select_support(grid, tau=tau, tau_hat=tau_hat, library=library)
    gammas = rescale(grid, basis)
    system = assemble(grid, library, basis, scales=gammas)
    solution = optimize_lambda(system.G, system.b, lambda_grid)
    coefficients = unscale_coefficients(system, solution.coefficients)
    return DiscoveryResult(
        library=library,
        basis=basis,
        coefficients=coefficients,
        solution=solution,
        system=system,
        corner_x=corner_x,
        corner_t=corner_t,
    )
