"""Independent ground truths for the probe response.

Two routes that share nothing with the closed-form elimination:

* ``sideband_matrix_solve``: the three-frequency ansatz O = O_s + O_- e^{-i delta t}
  + O_+ e^{i delta t} substituted into the linearised mean-field equations
  gives an 8x8 complex system in (a_-, a_+*, b_-, b_+*, m1_-, m1_+*, m2_-, m2_+*),
  solved by LU with partial pivoting.
* ``time_domain_response``: the same linearised equations integrated in time
  with a fixed-step classical Runge-Kutta scheme, followed by projection of the
  cavity fluctuation onto e^{-i delta t}.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .params import ProbeGrid, SystemParams
from .response import SingularityError, cavity_sideband
from .steady_state import SteadyState, effective_coupling, solve_steady_state

#: order of the unknowns in the sideband vector
COMPONENTS = ("a_minus", "a_plus_conj", "b_minus", "b_plus_conj",
              "m1_minus", "m1_plus_conj", "m2_minus", "m2_plus_conj")


class ProjectionError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SidebandVector:
    a_minus: complex
    a_plus_conj: complex
    b_minus: complex
    b_plus_conj: complex
    m1_minus: complex
    m1_plus_conj: complex
    m2_minus: complex
    m2_plus_conj: complex

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in COMPONENTS])


def _magnomech_amplitude(params: SystemParams, ss: SteadyState) -> complex:
    # g_mb * m_2s written through the effective coupling, G = i sqrt(2) g_mb m_2s
    return -1j * effective_coupling(ss, params) / math.sqrt(2.0)


def base_matrix(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """Detuning-independent part M0; the full matrix is M0 - i delta I."""
    ka, kb, wb = params.kappa_a, params.kappa_b, params.omega_b
    k1, k2 = params.kappa_m
    g1, g2 = params.g
    da, d1 = params.delta_a, params.delta_m[0]
    dt = ss.delta_tilde_m2
    mu = _magnomech_amplitude(params, ss)
    muc = np.conj(mu)

    M = np.zeros((8, 8), dtype=complex)
    a, ac, b, bc, m1, m1c, m2, m2c = range(8)
    # cavity
    M[a, a] = ka + 1j * da
    M[a, m1] = 1j * g1
    M[a, m2] = 1j * g2
    M[ac, ac] = ka - 1j * da
    M[ac, m1c] = -1j * g1
    M[ac, m2c] = -1j * g2
    # phonon, driven by |m2|^2 fluctuations  m2s* m2_- + m2s m2_+*
    M[b, b] = kb + 1j * wb
    M[b, m2] = 1j * muc
    M[b, m2c] = 1j * mu
    M[bc, bc] = kb - 1j * wb
    M[bc, m2] = -1j * muc
    M[bc, m2c] = -1j * mu
    # magnon 1
    M[m1, m1] = k1 + 1j * d1
    M[m1, a] = 1j * g1
    M[m1c, m1c] = k1 - 1j * d1
    M[m1c, ac] = -1j * g1
    # magnon 2, shifted detuning plus radiation-pressure-like term m2s (b + b*)
    M[m2, m2] = k2 + 1j * dt
    M[m2, a] = 1j * g2
    M[m2, b] = 1j * mu
    M[m2, bc] = 1j * mu
    M[m2c, m2c] = k2 - 1j * dt
    M[m2c, ac] = -1j * g2
    M[m2c, b] = -1j * muc
    M[m2c, bc] = -1j * muc
    return M


def sideband_matrix(params: SystemParams, ss: SteadyState, delta: float) -> np.ndarray:
    return base_matrix(params, ss) - 1j * delta * np.eye(8)


def _lu_solve(M: np.ndarray, rhs: np.ndarray, delta) -> np.ndarray:
    with np.errstate(all="ignore"):
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    if np.any(np.abs(np.diag(lu)) == 0):
        cond = np.linalg.cond(M)
        raise SingularityError(f"sideband matrix singular at delta={delta!r} (cond ~ {cond:.3g})")
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    if not np.all(np.isfinite(x)):
        cond = np.linalg.cond(M)
        raise SingularityError(f"sideband matrix singular at delta={delta!r} (cond ~ {cond:.3g})")
    return x


def sideband_matrix_solve(params: SystemParams, ss: SteadyState, delta: float) -> SidebandVector:
    """All eight first-order sideband amplitudes at probe detuning ``delta``."""
    rhs = np.zeros(8, dtype=complex)
    rhs[0] = params.eps_p
    x = _lu_solve(sideband_matrix(params, ss, delta), rhs, delta)
    return SidebandVector(*(complex(v) for v in x))


def matrix_cavity_sideband(params: SystemParams, ss: SteadyState, deltas) -> np.ndarray:
    """a_- from the matrix route over many detunings (matrix assembled once)."""
    M0 = base_matrix(params, ss)
    eye = np.eye(8)
    rhs = np.zeros(8, dtype=complex)
    rhs[0] = params.eps_p
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    out = np.empty(len(deltas), dtype=complex)
    for i, d in enumerate(deltas):
        out[i] = _lu_solve(M0 - 1j * d * eye, rhs, d)[0]
    return out


# --------------------------------------------------------------------------
# time domain

def linearized_rhs_matrix(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """Generator L of d/dt z = L z + f(t) for z = (da, db, dm1, dm2, conj...).

    Written directly from the fluctuation equations in the drive frame::

        da'  = -(ka + i Da) da - i g1 dm1 - i g2 dm2 + eps e^{-i delta t}
        db'  = -(kb + i wb) db - i (mu* dm2 + mu dm2*)
        dm1' = -(k1 + i D1) dm1 - i g1 da
        dm2' = -(k2 + i D2~) dm2 - i g2 da - i mu (db + db*)

    with mu = g_mb m_2s; the last four rows are the complex conjugates.
    """
    ka, kb, wb = params.kappa_a, params.kappa_b, params.omega_b
    k1, k2 = params.kappa_m
    g1, g2 = params.g
    da, d1 = params.delta_a, params.delta_m[0]
    dt = ss.delta_tilde_m2
    mu = _magnomech_amplitude(params, ss)

    L = np.zeros((8, 8), dtype=complex)
    A, B, M1, M2 = 0, 1, 2, 3
    L[A, A] = -(ka + 1j * da)
    L[A, M1] = -1j * g1
    L[A, M2] = -1j * g2
    L[B, B] = -(kb + 1j * wb)
    L[B, M2] = -1j * np.conj(mu)
    L[B, M2 + 4] = -1j * mu
    L[M1, M1] = -(k1 + 1j * d1)
    L[M1, A] = -1j * g1
    L[M2, M2] = -(k2 + 1j * dt)
    L[M2, A] = -1j * g2
    L[M2, B] = -1j * mu
    L[M2, B + 4] = -1j * mu
    # conjugate equations
    L[4:, 4:] = np.conj(L[:4, :4])
    L[4:, :4] = np.conj(L[:4, 4:])
    return L


def rk4_step(rhs: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagator(L: np.ndarray, forcing: np.ndarray, delta: float, h: float):
    """Exact one-step RK4 map for z' = L z + forcing * exp(-i delta t).

    For a linear system one RK4 step is z_{n+1} = P z_n + exp(-i delta t_n) q;
    P and q are obtained by running :func:`rk4_step` on the basis vectors and on
    the zero state, so the map is the Runge-Kutta scheme itself, not an
    approximation of it.
    """
    n = L.shape[0]

    def homog(_t, y):
        return L @ y

    P = rk4_step(homog, 0.0, np.eye(n, dtype=complex), h)

    def forced(t, y):
        return L @ y + forcing * np.exp(-1j * delta * t)

    q = rk4_step(forced, 0.0, np.zeros(n, dtype=complex), h)
    return P, q


def time_domain_response(params: SystemParams, ss: SteadyState, delta: float,
                         horizon: float | None = None, dt: float | None = None,
                         window_periods: int = 20, check: bool = True) -> complex:
    """Estimate a_- by integrating the linearised mean-field equations in time.

    The state starts at zero, is integrated over ``horizon`` seconds to let
    transients decay, then <a>(t) e^{i delta t} is averaged over
    ``window_periods`` whole beat periods 2 pi/delta.  ``dt`` is reduced to the
    nearest value that divides the beat period, so the projection is exact for
    the two harmonics +-delta present in the stationary response.
    """
    kappas = (params.kappa_a, params.kappa_b, *params.kappa_m)
    if horizon is None:
        horizon = 20.0 / min(kappas)
    fmax = max(abs(params.delta_a), *(abs(x) for x in params.delta_m),
               abs(ss.delta_tilde_m2), params.omega_b, abs(delta)) \
        + max(params.g) + abs(effective_coupling(ss, params))
    dt_max = 2 * math.pi / (50 * fmax)
    if dt is None:
        dt = dt_max
    if check and dt > dt_max * (1 + 1e-12):
        raise ValueError(f"dt={dt:.3g} s exceeds 2pi/(50 f_max)={dt_max:.3g} s")
    if check and horizon < 10.0 / min(kappas):
        raise ProjectionError(
            f"horizon {horizon:.3g} s shorter than the transient time 10/min(kappa)"
            f" = {10.0 / min(kappas):.3g} s",
            residual=math.exp(-min(kappas) * horizon))
    if delta == 0:
        raise ValueError("projection needs a non-zero beat frequency")

    period = 2 * math.pi / abs(delta)
    per = max(1, math.ceil(period / dt))
    h = period / per
    n_transient = math.ceil(horizon / period) * per
    n_window = window_periods * per

    L = linearized_rhs_matrix(params, ss)
    forcing = np.zeros(8, dtype=complex)
    forcing[0] = params.eps_p
    # the conjugate row carries e^{+i delta t}; fold it into the same step
    # by integrating the two forcing harmonics separately (linearity)
    P, q_minus = rk4_propagator(L, forcing, delta, h)
    forcing_c = np.zeros(8, dtype=complex)
    forcing_c[4] = np.conj(params.eps_p)
    _, q_plus = rk4_propagator(L, forcing_c, -delta, h)

    # One beat period is an integer number of steps, so the forcing phase
    # repeats and whole periods compose into z -> Phi z + c.
    w_minus = np.exp(-1j * delta * h)
    Phi = np.eye(8, dtype=complex)
    c = np.zeros(8, dtype=complex)
    for j in range(per):
        ph = w_minus ** j
        Phi = P @ Phi
        c = P @ c + ph * q_minus + np.conj(ph) * q_plus
    z = np.zeros(8, dtype=complex)
    for _ in range(n_transient // per):
        z = Phi @ z + c
    # projection window, stepped explicitly
    acc = 0j
    for k in range(n_window):
        ph = w_minus ** (k % per)
        acc += z[0] * np.conj(ph)
        z = P @ z + ph * q_minus + np.conj(ph) * q_plus
    return complex(acc / n_window)


# --------------------------------------------------------------------------
# cross validation

@dataclass
class ValidationReport:
    max_rel_err: float
    mean_rel_err: float
    argmax_delta: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def cross_validate(params: SystemParams, grid: ProbeGrid, tol: float = 1e-10,
                   ss: SteadyState | None = None,
                   closed_form: Callable | None = None) -> ValidationReport:
    """Compare the closed-form a_- with the matrix solve on every grid node."""
    if ss is None:
        ss = solve_steady_state(params)
    closed_form = closed_form or cavity_sideband
    deltas = grid.deltas()
    a_cf = np.asarray(closed_form(params, ss, deltas), dtype=complex)
    a_mx = matrix_cavity_sideband(params, ss, deltas)
    scale = np.abs(a_mx)
    scale = np.where(scale > 0, scale, 1.0)
    err = np.abs(a_cf - a_mx) / scale
    i = int(np.argmax(err))
    return ValidationReport(max_rel_err=float(err[i]), mean_rel_err=float(np.mean(err)),
                            argmax_delta=float(deltas[i]), tol=tol,
                            passed=bool(err[i] <= tol))
