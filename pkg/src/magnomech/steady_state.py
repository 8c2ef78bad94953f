"""Zero-order (mean-field) steady state of the driven system.

For a fixed effective magnon detuning the amplitudes (a_s, m_1s, m_2s) obey
a linear system that is solved in closed form.  The only nonlinearity is the
magnomechanical shift of the second magnon, which depends on the state solely
through x = |m_2s|^2.  The outer problem is therefore a real scalar fixed
point, iterated with damping and bracketed by bisection when needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import SystemParams

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
DAMPING = 0.5


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history or [])


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SteadyState:
    a_s: complex
    b_s: complex
    m_s: tuple[complex, complex]
    delta_tilde_m2: float
    G_mb: complex
    residual: float
    iterations: int
    method: str = "closed-form"
    history: tuple[float, ...] = field(default=(), repr=False)


def _linear_amplitudes(params: SystemParams, delta_tilde: float):
    """Closed-form (a_s, m_1s, m_2s) at a fixed effective detuning of magnon 2."""
    g1, g2 = params.g
    k1, k2 = params.kappa_m
    d1 = params.delta_m[0]
    # cavity dressed by magnon 1
    cav = params.kappa_a + 1j * params.delta_a + g1 ** 2 / (k1 + 1j * d1)
    m2 = params.Omega_d / (k2 + 1j * delta_tilde + g2 ** 2 / cav)
    a = -1j * g2 * m2 / cav
    m1 = -1j * g1 * a / (k1 + 1j * d1)
    return a, m1, m2


def _shift_coefficient(params: SystemParams) -> float:
    # delta_tilde = delta_m2 - shift * |m2|^2
    wb, kb = params.omega_b, params.kappa_b
    return 2.0 * params.g_mb ** 2 * wb / (kb ** 2 + wb ** 2)


def phonon_amplitude(params: SystemParams, m2: complex) -> complex:
    return -1j * params.g_mb * abs(m2) ** 2 / (params.kappa_b + 1j * params.omega_b)


def fixed_point_map(params: SystemParams, x: float) -> float:
    """x -> |m_2s|^2 evaluated at the detuning implied by x."""
    shift = _shift_coefficient(params)
    _, _, m2 = _linear_amplitudes(params, params.delta_m[1] - shift * x)
    return abs(m2) ** 2


def residual(params: SystemParams, a, b, m1, m2, delta_tilde) -> float:
    """Largest relative mismatch when the amplitudes are fed back through the
    four steady-state relations."""
    g1, g2 = params.g
    k1, k2 = params.kappa_m
    rhs = [
        (a, -1j * (g1 * m1 + g2 * m2) / (params.kappa_a + 1j * params.delta_a)),
        (b, phonon_amplitude(params, m2)),
        (m1, -1j * g1 * a / (k1 + 1j * params.delta_m[0])),
        (m2, (params.Omega_d - 1j * g2 * a) / (k2 + 1j * delta_tilde)),
    ]
    worst = 0.0
    for lhs, r in rhs:
        scale = max(abs(lhs), abs(r))
        if scale > 0:
            worst = max(worst, abs(lhs - r) / scale)
    # the detuning relation itself
    dt_check = params.delta_m[1] + params.g_mb * 2.0 * b.real
    scale = max(abs(delta_tilde), abs(params.delta_m[1]), 1.0)
    return max(worst, abs(dt_check - delta_tilde) / scale)


def _bisect(params: SystemParams, tol: float, max_iter: int, history: list[float]):
    lo, hi = 0.0, (abs(params.Omega_d) / params.kappa_m[1]) ** 2
    f_lo = fixed_point_map(params, lo) - lo
    if f_lo == 0.0:
        return lo, 0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = fixed_point_map(params, mid) - mid
        history.append(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= tol * max(lo, 1.0):
            return 0.5 * (lo + hi), it
    raise ConvergenceError("bisection did not converge", hi - lo, history)


def solve_steady_state(params: SystemParams, tol: float = DEFAULT_TOL,
                       max_iter: int = DEFAULT_MAX_ITER) -> SteadyState:
    """Solve the mean-field steady state, including the magnomechanical shift.

    The scalar x = |m_2s|^2 is iterated as x <- (1-d) x + d F(x) with d = 0.5.
    If the update stops shrinking (oscillation or divergence) the root is
    bracketed on [0, (|Omega_d|/kappa_m2)^2] and bisected instead.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    shift = _shift_coefficient(params)
    history: list[float] = []
    method = "closed-form"

    if params.Omega_d == 0 or shift == 0.0:
        x, iterations = None, 1
        delta_tilde = params.delta_m[1]
    else:
        method = "damped"
        x = fixed_point_map(params, 0.0)
        history.append(x)
        prev_step = math.inf
        stalls = 0
        iterations = 0
        converged = False
        for iterations in range(1, max_iter + 1):
            fx = fixed_point_map(params, x)
            x_new = (1.0 - DAMPING) * x + DAMPING * fx
            if not math.isfinite(x_new):
                raise NumericalError(f"non-finite iterate at step {iterations}")
            step = abs(x_new - x)
            history.append(x_new)
            x = x_new
            if step <= tol * max(x, 1.0):
                converged = True
                break
            stalls = stalls + 1 if step >= prev_step else 0
            prev_step = step
            if stalls >= 5:
                break
        if not converged:
            method = "bisection"
            x, extra = _bisect(params, tol, max_iter, history)
            iterations += extra
        delta_tilde = params.delta_m[1] - shift * x

    a, m1, m2 = _linear_amplitudes(params, delta_tilde)
    b = phonon_amplitude(params, m2)
    if shift != 0.0:
        # report the detuning consistent with the returned phonon amplitude
        delta_tilde = params.delta_m[1] + params.g_mb * 2.0 * b.real
    for name, v in (("a_s", a), ("b_s", b), ("m_1s", m1), ("m_2s", m2)):
        if not np.isfinite(v):
            raise NumericalError(f"{name} is not finite")
    res = residual(params, a, b, m1, m2, delta_tilde)
    G = 1j * math.sqrt(2.0) * params.g_mb * m2
    return SteadyState(a_s=complex(a), b_s=complex(b), m_s=(complex(m1), complex(m2)),
                       delta_tilde_m2=float(delta_tilde), G_mb=complex(G), residual=res,
                       iterations=iterations, method=method, history=tuple(history))


def effective_coupling(ss: SteadyState, params: SystemParams) -> complex:
    """Magnon-phonon coupling entering the sideband response.

    Returns the override when the parameter set carries one (see
    ``params.mode``), otherwise i*sqrt(2)*g_mb*m_2s.
    """
    if params.G_mb_override is not None:
        return params.G_mb_override
    return ss.G_mb


def kerr_validity_ratio(ss: SteadyState, K: float, Omega_d: complex) -> float:
    """K |m_2s|^3 / |Omega_d|; the Kerr term is negligible when this is << 1
    (below ~0.01 in practice)."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if K == 0:
        return 0.0
    if Omega_d == 0:
        raise ZeroDivisionError("Kerr ratio undefined for an undriven magnon")
    return K * abs(ss.m_s[1]) ** 3 / abs(Omega_d)


def calibrate_gmb(params: SystemParams, target_G: float, tol: float = DEFAULT_TOL) -> float:
    """Single-magnon coupling g_mb for which the self-consistent |G_mb| equals
    ``target_G`` at the drive in ``params``.

    |G_mb| = sqrt(2) g_mb |m_2s| with the shift included; solved by bracketing
    in g_mb (|G_mb| is increasing in g_mb on the stable branch used here).
    """
    from scipy.optimize import brentq

    if params.Omega_d == 0:
        raise ValueError("cannot calibrate against an undriven magnon")
    base = params.replace(G_mb_override=None)

    def err(gmb):
        ss = solve_steady_state(base.replace(g_mb=gmb), tol=tol)
        return abs(ss.G_mb) - target_G

    _, _, m2 = _linear_amplitudes(base, base.delta_m[1])
    guess = target_G / (math.sqrt(2.0) * abs(m2))
    lo, hi = 0.0, guess
    while err(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6 * guess:
            raise ConvergenceError("target coupling not reachable")
    return brentq(err, lo, hi, xtol=1e-14 * guess, rtol=1e-14)
