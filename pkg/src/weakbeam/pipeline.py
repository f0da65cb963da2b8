"""Measured-data pipeline: load, condition, discover, ensemble, recover
the modulus, and validate by forward simulation, emitting one report.

Every stage is fenced: a failure raises :class:`StageError` carrying the
stage name and its reserved process exit code, so batch drivers can tell
a bad file from a bad regression from a bad simulation.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .beamfem import simulate_measured, sweep_modulus
from .discovery import discover, render_pde
from .ensemble import run_ensemble
from .errors import DegenerateDataError, ParameterError, WeakbeamError
from .grid import FieldGrid, load_field, window_time
from .material import BeamModel, CrossSection, modulus_from_alpha
from .preprocess import bandpass_time, downsample_time
from .weakform import default_library

__all__ = ["PipelineConfig", "StageError", "STAGE_EXIT_CODES", "run_pipeline"]

STAGE_EXIT_CODES = {
    "ingest": 2,
    "preprocess": 3,
    "discover": 4,
    "ensemble": 5,
    "material": 6,
    "simulate": 7,
}


class StageError(WeakbeamError):
    """A pipeline stage failed; carries the stage's reserved exit code."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def exit_code(self) -> int:
        return STAGE_EXIT_CODES[self.stage]


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one measured-data run needs, JSON round-trippable."""

    field_path: str
    downsample: int = 1
    band: tuple[float, float] | None = None
    taper_frac: float = 0.1
    window: tuple[float, float] | None = None
    tau: float = 1e-9
    tau_hat: tuple[float, float] | None = None
    max_ds: int = 0  # 0 skips the ensemble stage
    section: CrossSection | None = None
    density: float | None = None
    nominal_modulus: float | None = None
    simulate: bool = True
    sweep: tuple[float, float, int] | None = None
    n_fit: int = 25
    fourier_order: int = 3

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        raw = dict(raw)
        section = raw.get("section")
        if isinstance(section, dict):
            raw["section"] = CrossSection(**section)
        for key in ("band", "window", "tau_hat", "sweep"):
            if raw.get(key) is not None:
                raw[key] = tuple(raw[key])
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"unknown pipeline config keys: {sorted(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.section is not None:
            sec = {"kind": self.section.kind}
            if self.section.kind == "circle":
                sec["diameter"] = self.section.diameter
            else:
                sec["width"] = self.section.width
                sec["thickness"] = self.section.thickness
            out["section"] = sec
        for key in ("band", "window", "tau_hat", "sweep"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_pipeline(config: PipelineConfig, out_dir: str | Path | None = None) -> dict:
    """Execute the configured stages and return the JSON-ready report.

    Identical configs on identical inputs produce identical reports
    except for the wall-clock entries under ``"timing"``.  When
    ``out_dir`` is given the report plus plot-ready CSV exports (loss
    curve, ensemble coefficients, sweep curve) land there.
    """
    report: dict = {"config": config.to_dict(), "stages": []}
    timing: dict[str, float] = {}
    beam: BeamModel | None = None
    library = default_library()

    def begin(stage: str) -> float:
        report["stages"].append(stage)
        return time.perf_counter()

    # ingest
    t0 = begin("ingest")
    try:
        data = load_field(config.field_path)
    except (WeakbeamError, OSError) as exc:
        raise StageError("ingest", exc) from exc
    report["ingest"] = {
        "path": config.field_path,
        "n_x": data.n_x,
        "n_t": data.n_t,
    }
    timing["ingest"] = time.perf_counter() - t0

    # preprocess
    t0 = begin("preprocess")
    try:
        processed = data
        if config.downsample and config.downsample != 1:
            processed = downsample_time(processed, config.downsample)
        if config.band is not None:
            processed = bandpass_time(
                processed, config.band[0], config.band[1], config.taper_frac
            )
        windowed = (
            processed
            if config.window is None
            else window_time(processed, *config.window)
        )
    except WeakbeamError as exc:
        raise StageError("preprocess", exc) from exc
    report["preprocess"] = {
        "downsample": config.downsample,
        "band": list(config.band) if config.band else None,
        "window": list(config.window) if config.window else None,
        "n_x": windowed.n_x,
        "n_t": windowed.n_t,
        "dt": windowed.dt if windowed.n_t > 1 else None,
    }
    timing["preprocess"] = time.perf_counter() - t0

    # discover
    t0 = begin("discover")
    degenerate = False
    result = None
    try:
        result = discover(windowed, tau=config.tau, tau_hat=config.tau_hat, library=library)
        report["discovery"] = result.as_report() | {"degenerate": False}
    except DegenerateDataError as exc:
        degenerate = True
        report["discovery"] = {
            "pde": render_pde(library.lhs.name, library.term_names, np.zeros(library.n_terms)),
            "degenerate": True,
            "reason": str(exc),
        }
    except WeakbeamError as exc:
        raise StageError("discover", exc) from exc
    timing["discover"] = time.perf_counter() - t0

    # ensemble
    ensemble = None
    if config.max_ds >= 1 and not degenerate:
        t0 = begin("ensemble")
        try:
            ensemble = run_ensemble(
                windowed, max_ds=config.max_ds, tau=config.tau, library=library
            )
        except WeakbeamError as exc:
            raise StageError("ensemble", exc) from exc
        report["ensemble"] = {
            "n_runs": len(ensemble.runs),
            "n_success": ensemble.n_success,
            "modal_support": list(ensemble.modal_support),
            "support_agreement": ensemble.support_agreement,
            "stats": {
                name: {
                    "n_active": s.n_active,
                    "mean": s.mean,
                    "median": s.median,
                    "std": s.std,
                    "min": s.min,
                    "max": s.max,
                }
                for name, s in sorted(ensemble.stats.items())
            },
            "failures": [
                {"d": r.d, "offset": r.offset, "error": r.error}
                for r in ensemble.runs
                if not r.ok
            ],
        }
        timing["ensemble"] = time.perf_counter() - t0

    # material
    if config.section is not None and config.density is not None and not degenerate:
        t0 = begin("material")
        try:
            beam = BeamModel(
                section=config.section,
                length=windowed.x_extent,
                density=config.density,
            )
            alpha = -result.coefficient("w_xxxx")
            modulus = modulus_from_alpha(alpha, beam)
            beam = BeamModel(
                section=config.section,
                length=windowed.x_extent,
                density=config.density,
                youngs_modulus=modulus,
            )
        except (WeakbeamError, KeyError) as exc:
            raise StageError("material", exc) from exc
        material = {"alpha": alpha, "youngs_modulus": modulus}
        if config.nominal_modulus:
            material["nominal_modulus"] = config.nominal_modulus
            material["percent_error"] = (
                100.0 * abs(modulus - config.nominal_modulus) / config.nominal_modulus
            )
        report["material"] = material
        timing["material"] = time.perf_counter() - t0

    # simulate / sweep
    if config.simulate and beam is not None and not degenerate:
        t0 = begin("simulate")
        try:
            sim = simulate_measured(
                processed,
                beam,
                n_fit=config.n_fit,
                order=config.fourier_order,
                window=config.window,
            )
            report["simulation"] = {
                "youngs_modulus": beam.youngs_modulus,
                "frobenius_rel": sim.frobenius_rel,
            }
            if config.sweep is not None:
                lo, hi, n = config.sweep
                sweep = sweep_modulus(
                    processed,
                    beam,
                    lo,
                    hi,
                    int(n),
                    n_fit=config.n_fit,
                    order=config.fourier_order,
                    window=config.window,
                )
                report["sweep"] = {
                    "moduli": [float(e) for e in sweep.moduli],
                    "errors": [float(e) for e in sweep.errors],
                    "best_modulus": sweep.best_modulus,
                    "best_error": sweep.best_error,
                }
        except WeakbeamError as exc:
            raise StageError("simulate", exc) from exc
        timing["simulate"] = time.perf_counter() - t0

    report["timing"] = timing

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "report.json", report)
        if result is not None:
            _write_csv(
                out / "loss_curve.csv",
                ["lambda", "loss"],
                [[float(l), float(v)] for l, v in result.solution.loss_curve],
            )
        if ensemble is not None:
            rows = []
            for r in ensemble.runs:
                if r.ok:
                    rows.append(
                        [r.d, r.offset, "ok", -r.result.coefficient("w_xxxx"),
                         r.result.relative_residual]
                    )
                else:
                    rows.append([r.d, r.offset, "failed", r.error, ""])
            _write_csv(
                out / "ensemble.csv",
                ["d", "offset", "status", "alpha", "relative_residual"],
                rows,
            )
        if "sweep" in report:
            _write_csv(
                out / "sweep.csv",
                ["youngs_modulus", "frobenius_rel"],
                [[float(m), float(e)] for m, e in zip(report["sweep"]["moduli"], report["sweep"]["errors"])],
            )
    return report
