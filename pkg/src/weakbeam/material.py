"""Cross sections, modulus recovery, and analytic bending frequencies.

The discovered PDE coefficient alpha multiplies the fourth spatial
derivative in ``w_tt = -alpha w_xxxx`` and equals ``E I / (rho A)`` for a
uniform beam, so the Young's modulus follows from geometry and density
alone: ``E = alpha rho A / I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterError

__all__ = [
    "CrossSection",
    "BeamModel",
    "section_properties",
    "modulus_from_alpha",
    "alpha_from_modulus",
    "frequency_roots",
    "natural_frequencies",
    "smape",
]

BOUNDARIES = ("clamped-free", "pinned-pinned", "clamped-clamped")


@dataclass(frozen=True)
class CrossSection:
    """Circular or rectangular solid cross section.

    Rectangular sections bend about the axis parallel to ``width``, so
    ``thickness`` is the in-plane (bending) dimension.
    """

    kind: str
    diameter: float = math.nan
    width: float = math.nan
    thickness: float = math.nan

    def __post_init__(self):
        if self.kind == "circle":
            if not (self.diameter > 0):
                raise ParameterError(f"circle needs diameter > 0, got {self.diameter}")
        elif self.kind == "rectangle":
            if not (self.width > 0 and self.thickness > 0):
                raise ParameterError(
                    f"rectangle needs width, thickness > 0, got "
                    f"{self.width}, {self.thickness}"
                )
        else:
            raise ParameterError(f"unknown section kind {self.kind!r}")

    @classmethod
    def circle(cls, diameter: float) -> "CrossSection":
        return cls(kind="circle", diameter=diameter)

    @classmethod
    def rectangle(cls, width: float, thickness: float) -> "CrossSection":
        return cls(kind="rectangle", width=width, thickness=thickness)

    @property
    def area(self) -> float:
        if self.kind == "circle":
            return math.pi * self.diameter**2 / 4.0
        return self.width * self.thickness

    @property
    def second_moment(self) -> float:
        if self.kind == "circle":
            return math.pi * self.diameter**4 / 64.0
        return self.width * self.thickness**3 / 12.0


def section_properties(section: CrossSection) -> tuple[float, float]:
    """(area, second moment of area) of a cross section."""
    return section.area, section.second_moment


@dataclass(frozen=True)
class BeamModel:
    """Uniform prismatic beam: geometry, density, optional modulus."""

    section: CrossSection
    length: float
    density: float
    youngs_modulus: float | None = None

    def __post_init__(self):
        if not (self.length > 0):
            raise ParameterError(f"length must be positive, got {self.length}")
        if not (self.density > 0):
            raise ParameterError(f"density must be positive, got {self.density}")
        if self.youngs_modulus is not None and not (self.youngs_modulus > 0):
            raise ParameterError(
                f"youngs_modulus must be positive, got {self.youngs_modulus}"
            )

    def require_modulus(self) -> float:
        if self.youngs_modulus is None:
            raise ParameterError("beam has no Young's modulus set")
        return self.youngs_modulus


def modulus_from_alpha(alpha: float, beam: BeamModel) -> float:
    """Young's modulus from the stiffness coefficient alpha = E I / (rho A).

    alpha must be positive; a non-positive value indicates the discovered
    fourth-derivative coefficient had the wrong sign.
    """
    if not (alpha > 0):
        raise ParameterError(f"alpha must be positive, got {alpha}")
    area, second = section_properties(beam.section)
    return alpha * beam.density * area / second


def alpha_from_modulus(modulus: float, beam: BeamModel) -> float:
    if not (modulus > 0):
        raise ParameterError(f"modulus must be positive, got {modulus}")
    area, second = section_properties(beam.section)
    return modulus * second / (beam.density * area)


def _sech(x: float) -> float:
    # overflow-free 1 / cosh
    e = math.exp(-abs(x))
    return 2.0 * e / (1.0 + e * e)


def frequency_roots(boundary: str, n_modes: int) -> np.ndarray:
    """First ``n_modes`` roots beta_n L of the bending characteristic equation."""
    if n_modes < 1:
        raise ParameterError(f"n_modes must be >= 1, got {n_modes}")
    if boundary == "pinned-pinned":
        return np.pi * np.arange(1, n_modes + 1, dtype=float)
    if boundary == "clamped-free":
        # cos(x) cosh(x) = -1, one root per interval ((n-1) pi, n pi)
        func = lambda x: math.cos(x) + _sech(x)
        brackets = [((n - 1) * math.pi + 1e-9, n * math.pi) for n in range(1, n_modes + 1)]
    elif boundary == "clamped-clamped":
        # cos(x) cosh(x) = +1, skipping the trivial root at 0
        func = lambda x: math.cos(x) - _sech(x)
        brackets = [(n * math.pi, (n + 1) * math.pi) for n in range(1, n_modes + 1)]
    else:
        raise ParameterError(
            f"unknown boundary {boundary!r}, expected one of {BOUNDARIES}"
        )
    return np.array([brentq(func, lo, hi, xtol=1e-14) for lo, hi in brackets])


def natural_frequencies(
    beam: BeamModel, boundary: str = "clamped-free", n_modes: int = 5
) -> np.ndarray:
    """Analytic bending natural frequencies in Hz, ascending."""
    modulus = beam.require_modulus()
    area, second = section_properties(beam.section)
    roots = frequency_roots(boundary, n_modes)
    scale = math.sqrt(
        modulus * second / (beam.density * area * beam.length**4)
    ) / (2.0 * math.pi)
    return roots**2 * scale


def smape(values: np.ndarray, nominal: float) -> float:
    """Symmetric mean absolute percentage error against one nominal value."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ParameterError("smape needs at least one value")
    denom = (np.abs(values) + abs(nominal)) / 2.0
    terms = np.where(denom > 0, np.abs(values - nominal) / np.maximum(denom, 1e-300), 0.0)
    return float(100.0 * terms.mean())
