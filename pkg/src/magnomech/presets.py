"""Named parameter sets for the spectrum and delay presets.

Every preset starts from :func:`baseline_params` and changes only the
couplings and detunings that distinguish it from its siblings.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

from .analysis import Sweep, power_from_rabi
from .params import TWO_PI, YIG_SPHERE, SystemParams, baseline_params, field_from_rabi
from .steady_state import calibrate_gmb

MHZ = TWO_PI * 1e6
NOMINAL_G = 3.5 * MHZ
NOMINAL_DRIVE = 1.2e12
SWEEP_POINTS = 121


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # "spectrum" or "delay"
    params: SystemParams
    channel: str = "absorption"
    delta_min: float = 0.5  # units of omega_b
    delta_max: float = 1.5
    points: int = 2001
    sweep: Sweep | None = None
    mode: str = "override"
    note: str = ""


def _coupled(g1, g2, G, **changes) -> SystemParams:
    return baseline_params(g=(g1 * MHZ, g2 * MHZ), G_mb_override=G * MHZ, **changes)


def _detuned(p: SystemParams, d1=None, d2=None) -> SystemParams:
    wb = p.omega_b
    return p.with_detunings(delta_m1=None if d1 is None else d1 * wb,
                            delta_m2=None if d2 is None else d2 * wb)


@functools.lru_cache(maxsize=None)
def magnomechanical_coupling() -> float:
    """Single-magnon g_mb giving |G_mb| = 2pi x 3.5 MHz at the nominal drive
    (two-sphere baseline, detuning shift included)."""
    base = baseline_params(G_mb_override=None, Omega_d=NOMINAL_DRIVE)
    return calibrate_gmb(base, NOMINAL_G)


def _delay_params(g1: float, d1: float = 1.0) -> SystemParams:
    p = baseline_params(g=(g1 * MHZ, 1.5 * MHZ), G_mb_override=None,
                        g_mb=magnomechanical_coupling())
    return _detuned(p, d1=d1)


def _field_sweep() -> Sweep:
    b_nom = field_from_rabi(NOMINAL_DRIVE, YIG_SPHERE)
    return Sweep("B0", 1e-4 * b_nom, b_nom, SWEEP_POINTS, "log")


def _power_sweep(p: SystemParams) -> Sweep:
    p_nom = power_from_rabi(NOMINAL_DRIVE, p)
    return Sweep("P_d", 1e-8 * p_nom, p_nom, SWEEP_POINTS, "log")


def _spectra(prefix: str, channel: str, settings: dict, lo: float = 0.5, hi: float = 1.5) -> dict:
    # keep the grid step at omega_b / 2000 whatever the span
    n_points = int(round((hi - lo) * 2000)) + 1
    return {prefix + k: Preset(prefix + k, "spectrum", p, channel, lo, hi, n_points, note=n)
            for k, (p, n) in settings.items()}


def _build() -> dict[str, callable]:
    fig2 = {
        "a": (_coupled(0.0, 1.2, 0.0), "g1 = G_mb = 0, g2 = 1.2 MHz"),
        "b": (_coupled(0.0, 1.2, 2.0), "g1 = 0, g2 = 1.2 MHz, G_mb = 2 MHz"),
        "c": (_coupled(1.2, 1.2, 2.0), "g1 = g2 = 1.2 MHz, G_mb = 2 MHz"),
        "d": (_coupled(1.2, 1.2, 3.5), "g1 = g2 = 1.2 MHz, G_mb = 3.5 MHz"),
    }
    fig4 = {
        "a": (_detuned(_coupled(0.0, 1.5, 0.0), d2=0.7), "Delta_m2 = 0.7 omega_b, g1 = G_mb = 0"),
        "b": (_detuned(_coupled(0.0, 1.5, 3.5), d2=0.7), "Delta_m2 = 0.7 omega_b, g1 = 0"),
        "c": (_detuned(_coupled(1.5, 1.5, 3.5), d1=0.7, d2=0.7), "Delta_m1,2 = 0.7 omega_b"),
        "d": (_coupled(1.5, 1.5, 3.5), "Delta_m1,2 = omega_b"),
    }
    fig5 = {k: (_coupled(g1, 1.5, 3.5), f"g1 = {g1} MHz")
            for k, g1 in zip("abcd", (0.5, 0.8, 1.2, 1.5))}
    fig6 = {
        "a": (_coupled(1.5, 1.5, 0.5), "G_mb = 0.5 MHz"),
        "b": (_coupled(1.5, 1.5, 1.0), "G_mb = 1.0 MHz"),
        "c": (_coupled(1.5, 0.4, 3.5), "g2 = 0.4 MHz"),
        "d": (_coupled(1.5, 0.8, 3.5), "g2 = 0.8 MHz"),
    }
    table = {}
    table.update(_spectra("fig2", "absorption", fig2))
    table.update(_spectra("fig3", "dispersion", fig2))
    # the detuned windows reach down to ~0.5 omega_b, so widen the span
    table.update(_spectra("fig4", "absorption", fig4, 0.3, 1.7))
    table.update(_spectra("fig5", "transmission", fig5))
    table.update(_spectra("fig6", "transmission", fig6))
    fig7 = {
        "a": (_coupled(0.0, 1.5, 0.0), "g1 = g_mb = 0"),
        "b": (_coupled(0.0, 1.5, 4.0), "g1 = 0, G_mb = 4 MHz"),
        "c": (_coupled(1.5, 1.5, 4.0), "g1 = g2 = 1.5 MHz, G_mb = 4 MHz"),
    }
    table.update(_spectra("fig7", "phase", fig7))
    table["fig7"] = Preset("fig7", "spectrum", fig7["c"][0], "phase", note=fig7["c"][1])
    return table


def _delay_presets() -> dict[str, Preset]:
    fig8a = _delay_params(0.0)
    fig8b = _delay_params(1.5)
    fig9a = _delay_params(1.5, d1=1.0)
    fig9b = _delay_params(1.5, d1=-1.0)
    return {
        "fig8a": Preset("fig8a", "delay", fig8a, sweep=_field_sweep(),
                        mode="self-consistent", note="g1 = 0, sweep B0"),
        "fig8b": Preset("fig8b", "delay", fig8b, sweep=_field_sweep(),
                        mode="self-consistent", note="g1 = 1.5 MHz, sweep B0"),
        "fig9a": Preset("fig9a", "delay", fig9a, sweep=_power_sweep(fig9a),
                        mode="self-consistent", note="Delta_m1 = omega_b, sweep P_d"),
        "fig9b": Preset("fig9b", "delay", fig9b, sweep=_power_sweep(fig9b),
                        mode="self-consistent", note="Delta_m1 = -omega_b, sweep P_d"),
    }


SPECTRUM_PRESETS = _build()
DELAY_PRESETS = ("fig8a", "fig8b", "fig9a", "fig9b")
NAMES = tuple(sorted(SPECTRUM_PRESETS)) + DELAY_PRESETS


def get_preset(name: str) -> Preset:
    if name in SPECTRUM_PRESETS:
        return SPECTRUM_PRESETS[name]
    if name in DELAY_PRESETS:
        return _delay_presets()[name]
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(NAMES)}")
