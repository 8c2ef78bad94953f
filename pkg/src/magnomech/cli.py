"""Command-line entry point: ``magnomech spectrum | delay | validate``.

Exit status: 0 success, 1 validation or numerical failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np

from .analysis import SWEEP_VARIABLES, Sweep, delay_sweep, find_extrema
from .oracle import cross_validate
from .params import (ConfigError, ProbeGrid, SystemParams, ValidationError, dump_config,
                     params_from_dict)
from .presets import NAMES, Preset, get_preset
from .response import SingularityError, PhaseUndefinedError, spectrum
from .steady_state import ConvergenceError, solve_steady_state
from .svg import line_plot

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SPECTRUM_HEADER = ["delta_over_omega_b", "re_eps_out", "im_eps_out", "t_p_abs2", "phi_t"]
DELAY_HEADER = ["sweep_x", "tau_g_s"]
CHANNELS = ("absorption", "dispersion", "transmission", "phase")


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _load_params(path: str) -> SystemParams:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    # a run manifest carries its resolved parameters under "config"
    if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    return params_from_dict(doc)


def _resolve(args) -> tuple[SystemParams, Preset | None]:
    if args.preset and args.config:
        raise UsageError("give either --config or --preset, not both")
    if args.preset:
        try:
            preset = get_preset(args.preset)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        return preset.params, preset
    if args.config:
        return _load_params(args.config), None
    raise UsageError("one of --config or --preset is required")


def _apply_mode(params: SystemParams, mode: str | None) -> SystemParams:
    if mode is None:
        return params
    if mode == "self-consistent":
        return params.replace(G_mb_override=None)
    if params.G_mb_override is None:
        raise UsageError("--mode override needs G_mb_override in the configuration")
    return params


def _num(x: float) -> str:
    return repr(float(x))


def _write_text(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path!r}: {exc.strerror or exc}") from exc


def _emit(out: str | None, text: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        _write_text(out, text)


def _manifest(command: str, argv: list[str], params: SystemParams, mode: str, **extra) -> dict:
    return {
        "command": command,
        "argv": argv,
        "config": dump_config(params),
        "mode": mode,
        "determinism": "deterministic; no random state",
        "tool_version": _version(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **extra,
    }


def _sidecar(out: str, suffix: str, doc: dict):
    if out in (None, "-"):
        return
    _write_text(str(Path(out).with_suffix("")) + suffix, json.dumps(doc, indent=2) + "\n")


def _channels(arg: str | None, default: str) -> list[str]:
    names = [c.strip() for c in (arg or default).split(",") if c.strip()]
    bad = [c for c in names if c not in CHANNELS]
    if bad:
        raise UsageError(f"unknown channel(s) {', '.join(bad)}; choose from {', '.join(CHANNELS)}")
    return names


def spectrum_csv(spec, omega_b: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPECTRUM_HEADER)
    for d, e, t, ph in zip(spec.delta, spec.eps_out, spec.transmission, spec.phi_t):
        w.writerow([_num(d / omega_b), _num(e.real), _num(e.imag), _num(t), _num(ph)])
    return buf.getvalue()


def _features_doc(feats, omega_b: float) -> dict:
    doc = feats.to_dict()
    for kind in ("dips", "peaks"):
        for item in doc[kind]:
            item["delta_over_omega_b"] = item["delta"] / omega_b
            item["width_over_omega_b"] = item["width_at_half_prominence"] / omega_b
    return doc


def cmd_spectrum(args, argv) -> int:
    params, preset = _resolve(args)
    params = _apply_mode(params, args.mode)
    channels = _channels(args.channel, preset.channel if preset else "absorption")
    wb = params.omega_b
    lo = args.delta_min if args.delta_min is not None else (preset.delta_min if preset else 0.5)
    hi = args.delta_max if args.delta_max is not None else (preset.delta_max if preset else 1.5)
    n = args.points if args.points is not None else (preset.points if preset else 2001)
    try:
        grid = ProbeGrid(lo * wb, hi * wb, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ss = solve_steady_state(params)
    spec = spectrum(params, ss, grid)
    _emit(args.out, spectrum_csv(spec, wb))

    grid_doc = {"delta_min_over_omega_b": lo, "delta_max_over_omega_b": hi, "points": n}
    _sidecar(args.out, ".manifest.json",
             _manifest("spectrum", argv, params, params.mode, grid=grid_doc,
                       preset=args.preset, channels=channels))
    feature_channel = next((c for c in channels if c != "phase"), "absorption")
    if n >= 3:
        feats = find_extrema(spec, feature_channel)
        _sidecar(args.out, ".analysis.json", _features_doc(feats, wb))
    if args.svg:
        series = {c: spec.channel(c) for c in channels}
        _write_text(args.svg, line_plot(spec.delta / wb, series, "delta / omega_b",
                                        ", ".join(channels), args.preset or ""))
    return EXIT_OK


def _sweep_from_args(args, preset: Preset | None) -> Sweep:
    base = preset.sweep if preset else None
    variable = args.variable or (base.variable if base else None)
    lo = args.sweep_min if args.sweep_min is not None else (base.lo if base else None)
    hi = args.sweep_max if args.sweep_max is not None else (base.hi if base else None)
    n = args.points if args.points is not None else (base.n if base else 121)
    spacing = "log" if args.log else (base.spacing if base else "linear")
    if variable is None or lo is None or hi is None:
        raise UsageError("delay needs --variable, --sweep-min and --sweep-max (or a delay preset)")
    if variable not in SWEEP_VARIABLES:
        raise UsageError(f"unknown sweep variable {variable!r}")
    if spacing == "log" and lo <= 0:
        raise UsageError("log spacing needs a positive --sweep-min")
    return Sweep(variable, lo, hi, n, spacing)


def cmd_delay(args, argv) -> int:
    params, preset = _resolve(args)
    if preset is not None and preset.kind != "delay":
        raise UsageError(f"preset {preset.name} is a spectrum preset")
    sweep = _sweep_from_args(args, preset)
    mode = args.mode or (preset.mode if preset else params.mode)
    if mode == "override" and params.G_mb_override is None:
        raise UsageError("--mode override needs G_mb_override in the configuration")
    d_eval = None if args.delta_eval is None else args.delta_eval * params.omega_b
    try:
        curve = delay_sweep(params, sweep, mode, delta_eval=d_eval)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DELAY_HEADER)
    for x, t in zip(curve.x, curve.tau_g):
        w.writerow([_num(x), _num(t)])
    _emit(args.out, buf.getvalue())

    sweep_doc = {"variable": sweep.variable, "lo": sweep.lo, "hi": sweep.hi, "n": sweep.n,
                 "spacing": sweep.spacing, "delta_eval_over_omega_b": curve.delta_eval / params.omega_b}
    _sidecar(args.out, ".manifest.json",
             _manifest("delay", argv, params, mode, sweep=sweep_doc, preset=args.preset))
    x_star, tau_star = curve.extremum
    _sidecar(args.out, ".analysis.json", {
        "extremum": {"x": x_star, "tau_g_s": tau_star},
        "n_positive": int(np.sum(curve.tau_g > 0)),
        "n_negative": int(np.sum(curve.tau_g < 0)),
    })
    if args.svg:
        _write_text(args.svg, line_plot(curve.x, {"tau_g [s]": curve.tau_g}, sweep.variable,
                                        "tau_g [s]", args.preset or "", logx=sweep.spacing == "log"))
    return EXIT_OK


def cmd_validate(args, argv) -> int:
    params, preset = _resolve(args)
    params = _apply_mode(params, args.mode)
    wb = params.omega_b
    lo = 0.5 if args.delta_min is None else args.delta_min
    hi = 1.5 if args.delta_max is None else args.delta_max
    n = 2001 if args.points is None else args.points
    try:
        grid = ProbeGrid(lo * wb, hi * wb, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = cross_validate(params, grid, tol=args.tol)
    doc = report.to_dict()
    doc["argmax_delta_over_omega_b"] = report.argmax_delta / wb
    _emit(args.out, json.dumps(doc, indent=2) + "\n")
    _sidecar(args.out, ".manifest.json",
             _manifest("validate", argv, params, params.mode, tol=args.tol,
                       grid={"delta_min_over_omega_b": lo, "delta_max_over_omega_b": hi,
                             "points": n}))
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magnomech",
                                description="Probe response of a two-sphere cavity magnomechanical system")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON parameter file (or a run manifest)")
        sp.add_argument("--preset", choices=NAMES, metavar="NAME",
                        help="named preset: " + ", ".join(NAMES))
        sp.add_argument("--mode", choices=("self-consistent", "override"),
                        help="how the magnon-phonon coupling is obtained")
        sp.add_argument("--points", type=int, help="grid or sweep points")
        sp.add_argument("--out", default="-", help="output path (default stdout)")

    sp = sub.add_parser("spectrum", help="probe response on a detuning grid (CSV)")
    common(sp)
    sp.add_argument("--delta-min", type=float, help="grid start in units of omega_b")
    sp.add_argument("--delta-max", type=float, help="grid end in units of omega_b")
    sp.add_argument("--channel", help="comma list of " + ", ".join(CHANNELS))
    sp.add_argument("--svg", help="also write an SVG plot of the channels")

    sd = sub.add_parser("delay", help="group delay versus drive strength (CSV)")
    common(sd)
    sd.add_argument("--variable", choices=SWEEP_VARIABLES, help="swept drive quantity")
    sd.add_argument("--sweep-min", type=float)
    sd.add_argument("--sweep-max", type=float)
    sd.add_argument("--log", action="store_true", help="logarithmic sweep spacing")
    sd.add_argument("--delta-eval", type=float, help="probe detuning in units of omega_b (default 1)")
    sd.add_argument("--svg", help="also write an SVG plot")

    sv = sub.add_parser("validate", help="closed form vs matrix solve (JSON report)")
    common(sv)
    sv.add_argument("--tol", type=float, default=1e-10, help="max relative error allowed")
    sv.add_argument("--delta-min", type=float)
    sv.add_argument("--delta-max", type=float)
    return p


COMMANDS = {"spectrum": cmd_spectrum, "delay": cmd_delay, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args, argv)
    except (ConfigError, ValidationError, UsageError) as exc:
        print(f"magnomech: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityError, PhaseUndefinedError, ConvergenceError) as exc:
        print(f"magnomech: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"magnomech: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
