"""Physical parameters of the two-sphere cavity magnomechanical system.

All frequencies, rates and couplings are stored as angular quantities in
rad/s.  Configuration documents carry ordinary frequencies in Hz under keys
ending in ``_hz``; the loader multiplies those by 2*pi.  Detunings are never
stored, they are derived from the bare frequencies on every access.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from typing import Any, Mapping

import numpy as np
from scipy.constants import hbar

TWO_PI = 2.0 * math.pi

# Total spin quoted for a 250 um sphere alongside rho = 4.22e27 m^-3.  Direct
# evaluation of 5/2 * rho * V gives ~8.6e16; kept only for cross-reference.
QUOTED_TOTAL_SPIN = 7.07e14

# Ratio between a bare frequency and the largest coupling/decay rate below
# which the rotating-wave approximation is flagged.
RWA_RATIO = 100.0


class ConfigError(ValueError):
    """Raised for malformed or incomplete configuration documents."""

    def __init__(self, message: str, keys: list[str] | None = None):
        super().__init__(message)
        self.keys = list(keys or [])


class ValidationError(ValueError):
    """Raised when parameters are physically inadmissible (e.g. zero damping)."""


class ParamWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SystemParams:
    """Immutable parameter set; every frequency-like field is in rad/s."""

    omega_a: float
    omega_b: float
    omega_m: tuple[float, float]
    kappa_a: float
    kappa_b: float
    kappa_m: tuple[float, float]
    g: tuple[float, float]
    g_mb: float
    omega_d: float
    Omega_d: complex = 0j
    eps_p: float = 1.0
    G_mb_override: complex | None = None
    omega_probe: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "omega_m", tuple(float(x) for x in self.omega_m))
        object.__setattr__(self, "kappa_m", tuple(float(x) for x in self.kappa_m))
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        object.__setattr__(self, "Omega_d", complex(self.Omega_d))
        if self.G_mb_override is not None:
            object.__setattr__(self, "G_mb_override", complex(self.G_mb_override))
        if len(self.omega_m) != 2 or len(self.kappa_m) != 2 or len(self.g) != 2:
            raise ValidationError("omega_m, kappa_m and g must each hold two entries")

    # derived detunings, recomputed on every access
    @property
    def delta_a(self) -> float:
        return self.omega_a - self.omega_d

    @property
    def delta_m(self) -> tuple[float, float]:
        return (self.omega_m[0] - self.omega_d, self.omega_m[1] - self.omega_d)

    @property
    def mode(self) -> str:
        return "override" if self.G_mb_override is not None else "self-consistent"

    def with_detunings(self, delta_a: float | None = None, delta_m1: float | None = None,
                       delta_m2: float | None = None) -> "SystemParams":
        """Return a copy whose bare frequencies realise the requested detunings."""
        wd = self.omega_d
        wa = self.omega_a if delta_a is None else wd + delta_a
        w1 = self.omega_m[0] if delta_m1 is None else wd + delta_m1
        w2 = self.omega_m[1] if delta_m2 is None else wd + delta_m2
        return replace(self, omega_a=wa, omega_m=(w1, w2))

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def digest(self) -> dict[str, Any]:
        """Compact JSON-friendly summary used in output metadata."""
        return dump_config(self)


@dataclass(frozen=True)
class SphereSpec:
    diameter: float
    spin_density: float
    gyromagnetic_ratio: float = TWO_PI * 28e9

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValidationError("sphere diameter must be positive")
        if not self.spin_density > 0:
            raise ValidationError("spin density must be positive")

    @property
    def volume(self) -> float:
        return math.pi / 6.0 * self.diameter ** 3


#: 250 um YIG sphere, rho = 4.22e27 m^-3, gamma/2pi = 28 GHz/T
YIG_SPHERE = SphereSpec(diameter=250e-6, spin_density=4.22e27)


@dataclass(frozen=True)
class ProbeGrid:
    delta_min: float
    delta_max: float
    n_points: int

    def __post_init__(self):
        if not self.delta_min < self.delta_max:
            raise ValidationError("delta_min must be smaller than delta_max")
        if self.n_points < 2:
            raise ValidationError("a probe grid needs at least two points")

    @classmethod
    def around_phonon(cls, params: SystemParams, lo: float = 0.5, hi: float = 1.5,
                      n_points: int = 2001) -> "ProbeGrid":
        """Grid in units of the phonon frequency, [lo, hi] * omega_b."""
        return cls(lo * params.omega_b, hi * params.omega_b, n_points)

    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.n_points)


# --------------------------------------------------------------------------
# calibration

def spins_from_sphere(sphere: SphereSpec) -> dict[str, float]:
    n = sphere.spin_density * sphere.volume
    return {"N": n, "S_total": 2.5 * n}


def rabi_from_field(B0: float, sphere: SphereSpec) -> complex:
    """Drive Rabi frequency (rad/s) for a microwave field of amplitude ``B0`` tesla."""
    if B0 < 0:
        raise ValueError("B0 must be non-negative")
    n = spins_from_sphere(sphere)["N"]
    return complex(math.sqrt(5.0) / 4.0 * sphere.gyromagnetic_ratio * math.sqrt(n) * B0)


def field_from_rabi(Omega_d: complex, sphere: SphereSpec) -> float:
    """Inverse of :func:`rabi_from_field`."""
    n = spins_from_sphere(sphere)["N"]
    return abs(Omega_d) / (math.sqrt(5.0) / 4.0 * sphere.gyromagnetic_ratio * math.sqrt(n))


def probe_amp_from_power(P_p: float, kappa_a: float, omega_p: float) -> float:
    """Input amplitude sqrt(2 P kappa / (hbar omega)) of a field of power ``P_p`` watt."""
    if P_p < 0:
        raise ValueError("power must be non-negative")
    if not omega_p > 0:
        raise ValueError("carrier frequency must be positive")
    return math.sqrt(2.0 * P_p * kappa_a / (hbar * omega_p))


def power_from_amp(amp: float, kappa: float, omega: float) -> float:
    """Inverse of :func:`probe_amp_from_power`."""
    return abs(amp) ** 2 * hbar * omega / (2.0 * kappa)


# --------------------------------------------------------------------------
# validation

def validate(params: SystemParams) -> list[str]:
    """Check admissibility; return a list of warnings, raise on zero damping."""
    rates = {
        "kappa_a": params.kappa_a,
        "kappa_b": params.kappa_b,
        "kappa_m1": params.kappa_m[0],
        "kappa_m2": params.kappa_m[1],
    }
    for name, value in rates.items():
        if not (np.isfinite(value) and value > 0):
            raise ValidationError(f"{name} must be a positive finite rate, got {value!r}")
    bare = {
        "omega_a": params.omega_a,
        "omega_b": params.omega_b,
        "omega_m1": params.omega_m[0],
        "omega_m2": params.omega_m[1],
        "omega_d": params.omega_d,
    }
    for name, value in bare.items():
        if not (np.isfinite(value) and value > 0):
            raise ValidationError(f"{name} must be a positive finite frequency, got {value!r}")

    out = []
    scale = max(abs(params.g[0]), abs(params.g[1]), params.kappa_a, *params.kappa_m)
    for name in ("omega_a", "omega_m1", "omega_m2"):
        if bare[name] < RWA_RATIO * scale:
            out.append(f"rotating-wave approximation questionable: {name} < "
                       f"{RWA_RATIO:g} x max(g, kappa_a, kappa_m)")
    dets = {"delta_a": params.delta_a, "delta_m1": params.delta_m[0],
            "delta_m2": params.delta_m[1]}
    for name, value in dets.items():
        if value < 0:
            out.append(f"{name} < 0 (blue-detuned drive): response may be amplifying")
    return out


# --------------------------------------------------------------------------
# configuration documents

_FREQ_KEYS = {
    # key stem -> (field, index or None, mandatory)
    "omega_a": ("omega_a", None, True),
    "omega_b": ("omega_b", None, True),
    "omega_m1": ("omega_m", 0, True),
    "omega_m2": ("omega_m", 1, True),
    "kappa_a": ("kappa_a", None, True),
    "kappa_b": ("kappa_b", None, True),
    "kappa_m1": ("kappa_m", 0, True),
    "kappa_m2": ("kappa_m", 1, True),
    "g1": ("g", 0, True),
    "g2": ("g", 1, True),
    "gmb": ("g_mb", None, True),
    "omega_d": ("omega_d", None, True),
    "omega_probe": ("omega_probe", None, False),
    "G_mb_override": ("G_mb_override", None, False),
}


def _number(value: Any, key: str) -> complex | float:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got a boolean", [key])
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = (_number(v, key) for v in value)
        return complex(re, im)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{key}: cannot interpret {value!r} as a number", [key])


def _angular(doc: Mapping[str, Any], stem: str):
    """Fetch ``stem`` either as ``<stem>_hz`` (x 2pi) or ``<stem>_rad_s``."""
    hz, rad = f"{stem}_hz", f"{stem}_rad_s"
    if hz in doc and rad in doc:
        raise ConfigError(f"both {hz} and {rad} given", [hz, rad])
    if hz in doc:
        value = _number(doc[hz], hz)
        return value * TWO_PI
    if rad in doc:
        return _number(doc[rad], rad)
    return None


def params_from_dict(doc: Mapping[str, Any]) -> SystemParams:
    if not isinstance(doc, Mapping):
        raise ConfigError("configuration must be a key-value mapping")
    values: dict[str, Any] = {"omega_m": [None, None], "kappa_m": [None, None], "g": [None, None]}
    missing = []
    for stem, (name, idx, mandatory) in _FREQ_KEYS.items():
        value = _angular(doc, stem)
        if value is None:
            if mandatory:
                missing.append(f"{stem}_hz")
            continue
        if idx is None:
            values[name] = value
        else:
            values[name][idx] = value
    omega_rabi = doc.get("Omega_d_rad_s")
    if omega_rabi is None:
        missing.append("Omega_d_rad_s")
    if missing:
        raise ConfigError("missing configuration keys: " + ", ".join(missing), missing)

    for name in ("omega_a", "omega_b", "omega_m", "kappa_a", "kappa_b", "kappa_m", "g",
                 "g_mb", "omega_d", "omega_probe"):
        v = values.get(name)
        items = v if isinstance(v, list) else [v]
        for item in items:
            if isinstance(item, complex):
                raise ConfigError(f"{name} must be real")
    eps_p = _number(doc.get("eps_p", 1.0), "eps_p")
    if isinstance(eps_p, complex):
        raise ConfigError("eps_p must be real", ["eps_p"])
    params = SystemParams(
        omega_a=values["omega_a"],
        omega_b=values["omega_b"],
        omega_m=tuple(values["omega_m"]),
        kappa_a=values["kappa_a"],
        kappa_b=values["kappa_b"],
        kappa_m=tuple(values["kappa_m"]),
        g=tuple(values["g"]),
        g_mb=values["g_mb"],
        omega_d=values["omega_d"],
        Omega_d=_number(omega_rabi, "Omega_d_rad_s"),
        eps_p=eps_p,
        G_mb_override=values.get("G_mb_override"),
        omega_probe=values.get("omega_probe"),
    )
    for warning in validate(params):
        warnings.warn(warning, ParamWarning, stacklevel=2)
    return params


def load_config(text: str) -> SystemParams:
    """Parse a JSON configuration document into validated :class:`SystemParams`."""
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    return params_from_dict(doc)


def _encode(value: complex | float) -> float | list[float]:
    if isinstance(value, complex):
        return [value.real, value.imag]
    return float(value)


def _lossless_hz(x: float) -> float | None:
    hz = x / TWO_PI
    return hz if hz * TWO_PI == x else None


def dump_config(params: SystemParams) -> dict[str, Any]:
    """Inverse of :func:`params_from_dict`, exact to the bit.

    Values are written in Hz when the Hz figure maps back onto the same
    double; otherwise the rad/s value is written under a ``_rad_s`` key.
    """
    flat = {
        "omega_a": params.omega_a,
        "omega_b": params.omega_b,
        "omega_m1": params.omega_m[0],
        "omega_m2": params.omega_m[1],
        "kappa_a": params.kappa_a,
        "kappa_b": params.kappa_b,
        "kappa_m1": params.kappa_m[0],
        "kappa_m2": params.kappa_m[1],
        "g1": params.g[0],
        "g2": params.g[1],
        "gmb": params.g_mb,
        "omega_d": params.omega_d,
        "omega_probe": params.omega_probe,
        "G_mb_override": params.G_mb_override,
    }
    doc: dict[str, Any] = {}
    for stem, value in flat.items():
        if value is None:
            continue
        if isinstance(value, complex):
            parts = [_lossless_hz(value.real), _lossless_hz(value.imag)]
            if None in parts:
                doc[f"{stem}_rad_s"] = _encode(value)
            else:
                doc[f"{stem}_hz"] = parts
            continue
        hz = _lossless_hz(value)
        if hz is None:
            doc[f"{stem}_rad_s"] = float(value)
        else:
            doc[f"{stem}_hz"] = hz
    doc["Omega_d_rad_s"] = _encode(params.Omega_d)
    doc["eps_p"] = float(params.eps_p)
    return doc


def serialize(params: SystemParams) -> str:
    return json.dumps(dump_config(params), indent=2)


def baseline_params(**changes) -> SystemParams:
    """Reference parameter set of the multiwindow-transparency study.

    Cavity and magnons at 10 GHz, phonon at 10 MHz, drive 10 MHz below them
    so that every detuning equals omega_b; effective magnomechanical
    coupling fixed at 2pi x 3.5 MHz.
    """
    wb = TWO_PI * 10e6
    wd = TWO_PI * 10e9 - wb
    p = SystemParams(
        omega_a=wd + wb,
        omega_b=wb,
        omega_m=(wd + wb, wd + wb),
        kappa_a=TWO_PI * 2.1e6,
        kappa_b=TWO_PI * 100.0,
        kappa_m=(TWO_PI * 0.1e6, TWO_PI * 0.1e6),
        g=(TWO_PI * 1.5e6, TWO_PI * 1.5e6),
        g_mb=0.0,
        omega_d=wd,
        Omega_d=1.2e12,
        eps_p=1.0,
        G_mb_override=TWO_PI * 3.5e6,
    )
    return replace(p, **changes) if changes else p


__all__ = [
    "TWO_PI", "QUOTED_TOTAL_SPIN", "ConfigError", "ValidationError", "ParamWarning",
    "SystemParams", "SphereSpec", "ProbeGrid", "YIG_SPHERE",
    "spins_from_sphere", "rabi_from_field", "field_from_rabi",
    "probe_amp_from_power", "power_from_amp", "validate",
    "params_from_dict", "load_config", "dump_config", "serialize", "baseline_params",
]
