"""Spectral features and group-delay sweeps."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.constants import hbar
from scipy.signal import find_peaks, peak_widths

from .params import SphereSpec, SystemParams, YIG_SPHERE, rabi_from_field
from .response import Spectrum, group_delay, worker_count
from .steady_state import ConvergenceError, solve_steady_state

DEFAULT_PROMINENCE = 0.01
CLASSIFY_EPS = 1e-9
SWEEP_VARIABLES = ("B0", "P_d", "Omega_d")


class BoundaryError(ValueError):
    pass


class SweepError(RuntimeError):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


@dataclass
class Extremum:
    index: int
    delta: float
    value: float
    prominence: float
    width_at_half_prominence: float


@dataclass
class SpectralFeatures:
    dips: list[Extremum]
    peaks: list[Extremum]
    window_count: int
    asymmetry: list[float | None] = field(default_factory=list)
    channel: str = "absorption"

    def to_dict(self) -> dict:
        return asdict(self)


def _extrema(x, y, threshold):
    idx, props = find_peaks(y, prominence=threshold)
    if idx.size == 0:
        return []
    widths = peak_widths(y, idx, rel_height=0.5, prominence_data=(
        props["prominences"], props["left_bases"], props["right_bases"]))[0]
    step = (x[-1] - x[0]) / (len(x) - 1)
    return [Extremum(int(i), float(x[i]), float(y[i]), float(p), float(w * step))
            for i, p, w in zip(idx, props["prominences"], widths)]


def features_from_curve(x: np.ndarray, y: np.ndarray, channel: str = "absorption",
                        prominence_threshold: float = DEFAULT_PROMINENCE) -> SpectralFeatures:
    """Dips, peaks and transparency windows of a sampled curve.

    Prominence is measured against the higher of the two flanking saddles
    (contour prominence) and widths at half that prominence.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        raise ValueError("need at least three samples to locate extrema")
    peaks = _extrema(x, y, prominence_threshold)
    dips = _extrema(x, -y, prominence_threshold)
    for d in dips:
        d.value = -d.value
    feats = SpectralFeatures(dips=dips, peaks=peaks, window_count=len(dips), channel=channel)
    for d in dips:
        try:
            feats.asymmetry.append(fano_asymmetry(feats, d, y))
        except BoundaryError:
            feats.asymmetry.append(None)
    return feats


def find_extrema(spectrum: Spectrum, channel: str = "absorption",
                 prominence_threshold: float = DEFAULT_PROMINENCE) -> SpectralFeatures:
    """Locate dips and peaks of ``channel`` (``absorption`` = Re eps_out,
    ``transmission`` = |t_p|^2, ``dispersion`` = Im eps_out)."""
    return features_from_curve(spectrum.delta, spectrum.channel(channel), channel,
                               prominence_threshold)


def fano_asymmetry(features: SpectralFeatures, dip: Extremum, y=None) -> float:
    """|h_L - h_R| / (h_L + h_R) from the heights of the neighbouring peaks
    above the dip; 0 for a symmetric window."""
    left = [p for p in features.peaks if p.index < dip.index]
    right = [p for p in features.peaks if p.index > dip.index]
    if not left or not right:
        raise BoundaryError(f"dip at delta={dip.delta:.6g} lacks a flanking peak inside the grid")
    h_l = left[-1].value - dip.value
    h_r = right[0].value - dip.value
    return abs(h_l - h_r) / (h_l + h_r)


def nearest_dip(features: SpectralFeatures, delta: float) -> Extremum:
    """Window (dip) closest to ``delta``."""
    if not features.dips:
        raise ValueError("no windows detected")
    return min(features.dips, key=lambda d: abs(d.delta - delta))


def window_widths(features: SpectralFeatures) -> list[float]:
    return [d.width_at_half_prominence for d in features.dips]


# --------------------------------------------------------------------------
# delay sweeps

@dataclass
class DelayCurve:
    variable: str
    x: np.ndarray
    tau_g: np.ndarray
    mode: str
    delta_eval: float

    @property
    def extremum(self) -> tuple[float, float]:
        """Sample of largest |tau_g|."""
        i = int(np.argmax(np.abs(self.tau_g)))
        return float(self.x[i]), float(self.tau_g[i])

    def to_dict(self) -> dict:
        x_star, tau_star = self.extremum
        return {"variable": self.variable, "mode": self.mode, "delta_eval": self.delta_eval,
                "x": self.x.tolist(), "tau_g": self.tau_g.tolist(),
                "extremum": {"x": x_star, "tau_g": tau_star}}


def rabi_from_power(P_d: float, params: SystemParams) -> complex:
    """Magnon drive amplitude sqrt(2 P_d kappa_m2 / (hbar omega_d)) for power ``P_d``."""
    if P_d < 0:
        raise ValueError("power must be non-negative")
    return complex(math.sqrt(2.0 * P_d * params.kappa_m[1] / (hbar * params.omega_d)))


def power_from_rabi(Omega_d: complex, params: SystemParams) -> float:
    """Inverse of :func:`rabi_from_power`."""
    return abs(Omega_d) ** 2 * hbar * params.omega_d / (2.0 * params.kappa_m[1])


def drive_for(variable: str, x: float, params: SystemParams,
              sphere: SphereSpec = YIG_SPHERE) -> complex:
    if variable == "B0":
        return rabi_from_field(x, sphere)
    if variable == "P_d":
        return rabi_from_power(x, params)
    if variable == "Omega_d":
        return complex(x)
    raise ValueError(f"unknown sweep variable {variable!r}")


@dataclass(frozen=True)
class Sweep:
    """Drive sweep: ``variable`` is ``B0`` (tesla), ``P_d`` (watt) or ``Omega_d`` (rad/s)."""

    variable: str
    lo: float
    hi: float
    n: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.n == 1:
            return np.array([float(self.lo)])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


def delay_sweep(params: SystemParams, sweep: Sweep, mode: str = "self-consistent",
                delta_eval: float | None = None, sphere: SphereSpec = YIG_SPHERE,
                h: float | None = None, workers: int | None = None) -> DelayCurve:
    """Group delay at ``delta_eval`` (default omega_b) while sweeping the drive.

    Each sample rebuilds the steady state for its drive amplitude.  In
    ``override`` mode the effective coupling stays at ``params.G_mb_override``
    and only the steady state (hence the detuning shift) follows the drive.
    """
    variable = sweep.variable
    values = sweep.values()
    if np.any(values < 0):
        raise ValueError("sweep range must be non-negative")
    if mode == "self-consistent":
        base = params.replace(G_mb_override=None)
    elif mode == "override":
        if params.G_mb_override is None:
            raise ValueError("override mode needs G_mb_override")
        base = params
    else:
        raise ValueError(f"unknown mode {mode!r}")
    d_eval = params.omega_b if delta_eval is None else delta_eval

    def one(x):
        p = base.replace(Omega_d=drive_for(variable, x, base, sphere))
        try:
            ss = solve_steady_state(p)
        except ConvergenceError as exc:
            raise SweepError(f"steady state failed at {variable}={x!r}: {exc}", x) from exc
        return group_delay(p, ss, d_eval, h)

    workers = worker_count() if workers is None else max(1, workers)
    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            taus = list(pool.map(one, values))
    else:
        taus = [one(x) for x in values]
    return DelayCurve(variable, values, np.array(taus), mode, d_eval)


def classify(tau_g: float, eps: float = CLASSIFY_EPS) -> str:
    """'slow' for tau_g > eps, 'fast' for tau_g < -eps, otherwise 'none'."""
    if not math.isfinite(tau_g):
        raise ValueError("group delay must be finite")
    if tau_g > eps:
        return "slow"
    if tau_g < -eps:
        return "fast"
    return "none"
