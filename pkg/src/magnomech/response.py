"""First-order probe response: sideband amplitude, output field, transmission,
phase and group delay.

The cavity sideband a_- oscillating as exp(-i delta t) follows from
eliminating the magnon, phonon and conjugate (+delta) sidebands of the
linearised equations of motion::

    a_- = eps_p / [A' + C1' + g2^2/beta' - alpha* alpha' / (beta* beta' (A* + C1* + g2^2/beta*))]

with the coefficient set built in :func:`coefficients`.  Here C2, C2' are the
inverse magnon-2 susceptibilities and B, B' the phonon-mediated self-energies
of magnon 2 at +delta and -delta.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .params import ProbeGrid, SystemParams
from .steady_state import SteadyState, effective_coupling


class SingularityError(ZeroDivisionError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PhaseUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class SidebandCoefficients:
    A: Any
    B: Any
    C1: Any
    C2: Any
    A_p: Any
    B_p: Any
    C1_p: Any
    C2_p: Any
    alpha: Any
    alpha_p: Any
    beta: Any
    beta_p: Any


@dataclass(frozen=True)
class ResponsePoint:
    delta: float
    a_minus: complex
    eps_out: complex
    t_p: complex
    phi_t: float


@dataclass
class Spectrum:
    """Probe response on a detuning grid (arrays, ordered by increasing delta)."""

    delta: np.ndarray
    a_minus: np.ndarray
    eps_out: np.ndarray
    t_p: np.ndarray
    phi_t: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.delta)

    def __getitem__(self, i) -> ResponsePoint:
        return ResponsePoint(float(self.delta[i]), complex(self.a_minus[i]),
                             complex(self.eps_out[i]), complex(self.t_p[i]),
                             float(self.phi_t[i]))

    @property
    def points(self) -> list[ResponsePoint]:
        return [self[i] for i in range(len(self))]

    @property
    def absorption(self) -> np.ndarray:
        return self.eps_out.real

    @property
    def dispersion(self) -> np.ndarray:
        return self.eps_out.imag

    @property
    def transmission(self) -> np.ndarray:
        return np.abs(self.t_p) ** 2

    def channel(self, name: str) -> np.ndarray:
        try:
            return {
                "absorption": self.absorption,
                "dispersion": self.dispersion,
                "transmission": self.transmission,
                "phase": self.phi_t,
            }[name]
        except KeyError:
            raise ValueError(f"unknown channel {name!r}") from None


def _check(name, value):
    bad = ~np.isfinite(value)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))
        raise SingularityError(f"coefficient {name} is singular", idx[0] if idx.size else None)
    return value


def _safe_div(num, den, name):
    den = np.asarray(den)
    if np.any(den == 0):
        idx = np.flatnonzero(np.atleast_1d(den == 0))
        raise SingularityError(f"vanishing denominator in {name}", int(idx[0]))
    return num / den


def coefficients(params: SystemParams, ss: SteadyState, delta) -> SidebandCoefficients:
    """Auxiliary coefficients of the sideband solution at probe detuning ``delta``.

    Unprimed quantities belong to the +delta sideband, primed ones to -delta.
    ``delta`` may be a scalar or an array.
    """
    d = np.asarray(delta, dtype=float)
    ka, kb, wb = params.kappa_a, params.kappa_b, params.omega_b
    k1, k2 = params.kappa_m
    g1, g2 = params.g
    da, d1 = params.delta_a, params.delta_m[0]
    dt = ss.delta_tilde_m2
    G2 = abs(effective_coupling(ss, params)) ** 2

    A = ka + 1j * (da + d)
    A_p = ka + 1j * (da - d)
    B = _safe_div(G2 * wb, wb ** 2 - d ** 2 + kb ** 2 + 2j * d * kb, "B")
    B_p = _safe_div(G2 * wb, wb ** 2 - d ** 2 + kb ** 2 - 2j * d * kb, "B'")
    C1 = _safe_div(g1 ** 2, k1 + 1j * (d1 + d), "C1")
    C1_p = _safe_div(g1 ** 2, k1 + 1j * (d1 - d), "C1'")
    C2 = k2 + 1j * (dt + d)
    C2_p = k2 + 1j * (dt - d)
    alpha = _safe_div(g2 ** 2 * B, np.conj(C2_p) + 1j * B, "alpha")
    alpha_p = _safe_div(g2 ** 2 * B_p, np.conj(C2) + 1j * B_p, "alpha'")
    beta = C2 - 1j * _safe_div(np.conj(C2_p) * B, np.conj(C2_p) + 1j * B, "beta")
    beta_p = C2_p - 1j * _safe_div(np.conj(C2) * B_p, np.conj(C2) + 1j * B_p, "beta'")
    return SidebandCoefficients(A, B, C1, C2, A_p, B_p, C1_p, C2_p, alpha, alpha_p, beta, beta_p)


def cavity_sideband(params: SystemParams, ss: SteadyState, delta) -> np.ndarray | complex:
    """Cavity sideband amplitude a_- at probe detuning ``delta``."""
    c = coefficients(params, ss, delta)
    g2sq = params.g[1] ** 2
    if g2sq == 0:
        bracket = c.A_p + c.C1_p
    else:
        conj_branch = np.conj(c.A) + np.conj(c.C1) + _safe_div(g2sq, np.conj(c.beta), "g2^2/beta*")
        cross = _safe_div(np.conj(c.alpha) * c.alpha_p,
                          np.conj(c.beta) * c.beta_p * conj_branch, "cross term")
        bracket = c.A_p + c.C1_p + _safe_div(g2sq, c.beta_p, "g2^2/beta'") - cross
    a = _safe_div(params.eps_p, bracket, "sideband bracket")
    _check("a_minus", a)
    return a if np.ndim(a) else complex(a)


def output_field(a_minus, eps_p: float, kappa_a: float):
    """eps_out = 2 kappa_a a_- / eps_p.  Re: absorption, Im: dispersion."""
    if not eps_p > 0:
        raise ValueError("eps_p must be positive")
    return 2.0 * kappa_a * np.asarray(a_minus) / eps_p


def transmission(a_minus, eps_p: float, kappa_a: float):
    """t_p = (eps_p - 2 kappa_a a_-) / eps_p."""
    if not eps_p > 0:
        raise ValueError("eps_p must be positive")
    return (eps_p - 2.0 * kappa_a * np.asarray(a_minus)) / eps_p


def unwrapped_phase(t_p, delta=None) -> np.ndarray:
    """arg t_p unwrapped along increasing detuning."""
    t_p = np.asarray(t_p)
    zero = np.flatnonzero(t_p == 0)
    if zero.size:
        where = zero[0] if delta is None else np.asarray(delta)[zero[0]]
        raise PhaseUndefinedError(f"t_p vanishes at grid point {where}; phase undefined")
    return np.unwrap(np.angle(t_p))


def phase(spectrum: Spectrum) -> np.ndarray:
    if len(spectrum) == 0:
        raise ValueError("empty spectrum")
    return unwrapped_phase(spectrum.t_p, spectrum.delta)


def default_step(params: SystemParams) -> float:
    return params.kappa_b / 10.0


def group_delay(params: SystemParams, ss: SteadyState, delta: float,
                h: float | None = None) -> float:
    """tau_g = d phi_t / d omega_p by a central difference of step ``h`` (rad/s).

    At fixed drive frequency d/d omega_p = d/d delta.  The default step is
    kappa_b/10 so the narrowest (phonon) feature is resolved.
    """
    if h is None:
        h = default_step(params)
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    pts = np.array([delta - h, delta, delta + h])
    a = cavity_sideband(params, ss, pts)
    t = transmission(a, params.eps_p, params.kappa_a)
    if np.any(t == 0):
        raise PhaseUndefinedError(
            f"t_p vanishes near delta={delta!r}; retry at delta + h/2")
    ph = np.unwrap(np.angle(t))
    return float((ph[2] - ph[0]) / (2.0 * h))


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("MAGNOMECH_THREADS", default)))
    except ValueError:
        return default


def spectrum(params: SystemParams, ss: SteadyState, grid: ProbeGrid,
             workers: int | None = None) -> Spectrum:
    """Evaluate the response on every grid node.

    With ``workers > 1`` the grid is split in contiguous chunks evaluated on a
    thread pool and reassembled in order; each node is computed by the same
    element-wise arithmetic, so the output does not depend on the split.
    """
    deltas = grid.deltas()
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1:
        a = _sideband_indexed(params, ss, deltas, 0)
    else:
        chunks = np.array_split(np.arange(len(deltas)), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda idx: _sideband_indexed(params, ss, deltas[idx], int(idx[0]) if len(idx) else 0),
                chunks))
        a = np.concatenate(parts)
    eps_out = output_field(a, params.eps_p, params.kappa_a)
    t = transmission(a, params.eps_p, params.kappa_a)
    phi = unwrapped_phase(t, deltas)
    meta = {"params": params.digest(), "mode": params.mode,
            "delta_tilde_m2": ss.delta_tilde_m2,
            "G_mb": [effective_coupling(ss, params).real, effective_coupling(ss, params).imag]}
    return Spectrum(deltas, a, eps_out, t, phi, meta)


def _sideband_indexed(params, ss, deltas, offset):
    try:
        return np.asarray(cavity_sideband(params, ss, deltas), dtype=complex)
    except SingularityError as exc:
        idx = None if exc.index is None else exc.index + offset
        raise SingularityError(f"{exc} (grid index {idx})", idx) from exc


def is_amplifying(spec: Spectrum) -> bool:
    """True when any |t_p|^2 exceeds unity (gain, e.g. blue-detuned drive)."""
    return bool(np.max(spec.transmission) > 1.0)
