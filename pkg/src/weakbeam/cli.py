"""Command line interface.

Every subcommand prints a JSON summary to stdout (deterministic except
for fields holding wall-clock time) and writes optional artifacts;
failures inside the staged pipeline map to reserved exit codes so batch
drivers can classify them.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .beamfem import simulate_measured, sweep_modulus
from .discovery import discover
from .ensemble import run_ensemble
from .errors import ParameterError, WeakbeamError
from .grid import load_field, save_field, window_time
from .material import (
    BeamModel,
    CrossSection,
    modulus_from_alpha,
    natural_frequencies,
    smape,
)
from .beamfem import FemMesh
from .pipeline import PipelineConfig, StageError, run_pipeline
from .preprocess import bandpass_time, downsample_time
from .synth import BurstSpec, generate_beam_data

__all__ = ["main"]


def _parse_section(text: str) -> CrossSection:
    """Parse ``circle:d=6.35e-3`` or ``rectangle:w=4.18e-3,t=2.84e-3``."""
    try:
        kind, _, body = text.partition(":")
        fields = dict(item.split("=") for item in body.split(",") if item)
        if kind in ("circle", "circ"):
            return CrossSection.circle(float(fields["d"]))
        if kind in ("rectangle", "rect"):
            return CrossSection.rectangle(float(fields["w"]), float(fields["t"]))
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"cannot parse section {text!r}: {exc}") from None
    raise ParameterError(f"unknown section kind in {text!r}")


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParameterError(f"expected 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _beam_args(p: argparse.ArgumentParser, need_modulus: bool) -> None:
    p.add_argument("--section", required=True, help="circle:d=D | rectangle:w=W,t=T")
    p.add_argument("--density", type=float, required=True, help="mass density kg/m^3")
    p.add_argument(
        "--modulus", type=float, required=need_modulus, default=None,
        help="Young's modulus in Pa",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakbeam",
        description="Discover beam dynamics from field data and validate by simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic burst-driven field")
    _beam_args(p, need_modulus=True)
    p.add_argument("--n-points", type=int, default=195, help="spatial samples")
    p.add_argument("--dx", type=float, default=5e-4, help="spatial spacing m")
    p.add_argument("--fc", type=float, required=True, help="burst center frequency Hz")
    p.add_argument("--cycles", type=int, default=5)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--sigma-rel", type=float, default=0.0, help="noise level vs peak")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin-frac", type=float, default=0.5)
    p.add_argument("--out", required=True, help="output field file")

    p = sub.add_parser("preprocess", help="downsample / band-pass / window a field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--downsample", type=int, default=1)
    p.add_argument("--band", type=_parse_pair, default=None, metavar="LO,HI")
    p.add_argument("--taper-frac", type=float, default=0.1)
    p.add_argument("--window", type=_parse_pair, default=None, metavar="T0,T1")

    p = sub.add_parser("discover", help="identify the sparse PDE of one field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tau", type=float, default=1e-9)
    p.add_argument("--tau-hat", type=_parse_pair, default=None, metavar="X,T")
    p.add_argument("--json", dest="json_out", default=None, help="write full report here")

    p = sub.add_parser("ensemble", help="discover over time-decimated subsets")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--max-ds", type=int, default=10)
    p.add_argument("--tau", type=float, default=1e-9)
    p.add_argument("--json", dest="json_out", default=None)
    p.add_argument("--csv", dest="csv_out", default=None, help="per-run alpha CSV")

    p = sub.add_parser("modulus", help="Young's modulus from a stiffness coefficient")
    _beam_args(p, need_modulus=False)
    p.add_argument("--alpha", type=float, required=True, help="w_xxxx coefficient magnitude")
    p.add_argument("--nominal", type=float, default=None)

    p = sub.add_parser("modes", help="analytic bending natural frequencies")
    _beam_args(p, need_modulus=True)
    p.add_argument("--length", type=float, required=True)
    p.add_argument(
        "--boundary",
        default="clamped-free",
        choices=("clamped-free", "pinned-pinned", "clamped-clamped"),
    )
    p.add_argument("--n-modes", type=int, default=5)
    p.add_argument(
        "--measured", default=None,
        help="comma-separated measured frequencies for SMAPE against mode 1",
    )

    p = sub.add_parser("simulate", help="edge-driven FEM replay of a measured field")
    _beam_args(p, need_modulus=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--window", type=_parse_pair, default=None, metavar="T0,T1")
    p.add_argument("--n-fit", type=int, default=25)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--out-field", default=None, help="write simulated field here")

    p = sub.add_parser("sweep-e", help="simulation error over a modulus grid")
    _beam_args(p, need_modulus=False)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--e-lo", type=float, required=True)
    p.add_argument("--e-hi", type=float, required=True)
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--window", type=_parse_pair, default=None, metavar="T0,T1")
    p.add_argument("--n-fit", type=int, default=25)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--csv", dest="csv_out", default=None)

    p = sub.add_parser("pipeline", help="run the staged measured-data pipeline")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out-dir", default=None)

    return parser


def _cmd_synth(args) -> int:
    beam = BeamModel(
        section=_parse_section(args.section),
        length=(args.n_points - 1) * args.dx,
        density=args.density,
        youngs_modulus=args.modulus,
    )
    mesh = FemMesh(args.n_points - 1, args.dx)
    spec = BurstSpec(
        center_frequency=args.fc, cycles=args.cycles, amplitude=args.amplitude
    )
    data = generate_beam_data(
        beam,
        mesh,
        spec,
        dt=args.dt,
        t_end=args.t_end,
        sigma_rel=args.sigma_rel,
        seed=args.seed,
        margin_frac=args.margin_frac,
    )
    save_field(data, args.out)
    _emit({"out": args.out, "n_x": data.n_x, "n_t": data.n_t})
    return 0


def _cmd_preprocess(args) -> int:
    data = load_field(args.infile)
    if args.downsample != 1:
        data = downsample_time(data, args.downsample)
    if args.band is not None:
        data = bandpass_time(data, args.band[0], args.band[1], args.taper_frac)
    if args.window is not None:
        data = window_time(data, *args.window)
    save_field(data, args.out)
    _emit({"out": args.out, "n_x": data.n_x, "n_t": data.n_t})
    return 0


def _cmd_discover(args) -> int:
    data = load_field(args.infile)
    result = discover(data, tau=args.tau, tau_hat=args.tau_hat)
    report = result.as_report()
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _emit(
        {
            "pde": report["pde"],
            "support": report["support"],
            "lambda_hat": report["lambda_hat"],
            "relative_residual": report["relative_residual"],
        }
    )
    return 0


def _cmd_ensemble(args) -> int:
    data = load_field(args.infile)
    result = run_ensemble(data, max_ds=args.max_ds, tau=args.tau)
    payload = {
        "n_runs": len(result.runs),
        "n_success": result.n_success,
        "modal_support": list(result.modal_support),
        "support_agreement": result.support_agreement,
        "stats": {
            name: {
                "n_active": s.n_active,
                "mean": s.mean,
                "median": s.median,
                "std": s.std,
                "min": s.min,
                "max": s.max,
            }
            for name, s in sorted(result.stats.items())
        },
    }
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.csv_out:
        lines = ["d,offset,status,alpha,relative_residual"]
        for r in result.runs:
            if r.ok:
                lines.append(
                    f"{r.d},{r.offset},ok,{-r.result.coefficient('w_xxxx')!r},"
                    f"{r.result.relative_residual!r}"
                )
            else:
                lines.append(f"{r.d},{r.offset},failed,{r.error},")
        with open(args.csv_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit(payload)
    return 0


def _cmd_modulus(args) -> int:
    beam = BeamModel(
        section=_parse_section(args.section), length=1.0, density=args.density
    )
    modulus = modulus_from_alpha(args.alpha, beam)
    payload = {"alpha": args.alpha, "youngs_modulus": modulus}
    if args.nominal:
        payload["nominal"] = args.nominal
        payload["percent_error"] = 100.0 * abs(modulus - args.nominal) / args.nominal
    _emit(payload)
    return 0


def _cmd_modes(args) -> int:
    beam = BeamModel(
        section=_parse_section(args.section),
        length=args.length,
        density=args.density,
        youngs_modulus=args.modulus,
    )
    freqs = natural_frequencies(beam, boundary=args.boundary, n_modes=args.n_modes)
    payload = {"boundary": args.boundary, "frequencies": [float(f) for f in freqs]}
    if args.measured:
        measured = np.array([float(v) for v in args.measured.split(",")])
        payload["smape_vs_mode1"] = smape(measured, float(freqs[0]))
    _emit(payload)
    return 0


def _cmd_simulate(args) -> int:
    data = load_field(args.infile)
    beam = BeamModel(
        section=_parse_section(args.section),
        length=data.x_extent,
        density=args.density,
        youngs_modulus=args.modulus,
    )
    result = simulate_measured(
        data, beam, n_fit=args.n_fit, order=args.order, window=args.window
    )
    if args.out_field:
        save_field(result.field, args.out_field)
    _emit({"youngs_modulus": args.modulus, "frobenius_rel": result.frobenius_rel})
    return 0


def _cmd_sweep_e(args) -> int:
    data = load_field(args.infile)
    beam = BeamModel(
        section=_parse_section(args.section),
        length=data.x_extent,
        density=args.density,
    )
    result = sweep_modulus(
        data,
        beam,
        args.e_lo,
        args.e_hi,
        args.n,
        n_fit=args.n_fit,
        order=args.order,
        window=args.window,
    )
    if args.csv_out:
        lines = ["youngs_modulus,frobenius_rel"]
        lines += [f"{m!r},{e!r}" for m, e in zip(result.moduli, result.errors)]
        with open(args.csv_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit(
        {
            "best_modulus": result.best_modulus,
            "best_error": result.best_error,
            "n_values": len(result.moduli),
        }
    )
    return 0


def _cmd_pipeline(args) -> int:
    config = PipelineConfig.from_json(args.config)
    report = run_pipeline(config, out_dir=args.out_dir)
    _emit(report)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "preprocess": _cmd_preprocess,
    "discover": _cmd_discover,
    "ensemble": _cmd_ensemble,
    "modulus": _cmd_modulus,
    "modes": _cmd_modes,
    "simulate": _cmd_simulate,
    "sweep-e": _cmd_sweep_e,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except WeakbeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
