"""Pure-NumPy integration kernels.

Implements the same Dormand-Prince 5(4) embedded pair as the compiled core
(slapsim._backend._core), vectorized across spatial points: one adaptive
step sequence is shared by the whole batch and controlled by the largest
per-system error norm, so every system meets the requested tolerance.

These kernels are the import-time fallback when the compiled extension is
unavailable; the benchmark script compares the two directly.
"""

from __future__ import annotations

import numpy as np

from ._common import IntegrationError, MAX_STEPS

# Dormand-Prince 5(4) tableau (FSAL: the 7th stage of an accepted step is
# the first stage of the next one).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _dp45(rhs, t0, t1, y0, rtol, atol, max_step):
    """Integrate dy/dt = rhs(t, y) from t0 to t1 for a batch y0 of shape (n, d).

    Returns the batch of final states.  Raises IntegrationError on step-size
    underflow or step-budget exhaustion.
    """
    span = t1 - t0
    if span <= 0:
        raise ValueError(f"integration window must have t1 > t0 (got {t0}..{t1})")
    y = np.array(y0, dtype=float)
    t = t0
    h = min(max_step, span / 100.0)
    min_step = 1e-13 * span

    k = np.empty((7,) + y.shape)
    k[0] = rhs(t, y)
    for _ in range(MAX_STEPS):
        if t >= t1:
            return y
        last = (t1 - t) <= h
        h_step = (t1 - t) if last else h
        if h_step < min_step:
            raise IntegrationError("step size underflow", t)

        for i in range(1, 7):
            yi = y + h_step * np.tensordot(_A[i], k[:i], axes=(0, 0))
            k[i] = rhs(t + _C[i] * h_step, yi)
        y_new = y + h_step * np.tensordot(_B5, k, axes=(0, 0))
        # k[6] was evaluated at (t + h, y_new) because A[6] == B5[:6]
        err_vec = h_step * np.tensordot(_E, k, axes=(0, 0))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2, axis=-1)).max()

        if err <= 1.0:
            t = t1 if last else t + h_step
            y = y_new
            k[0] = k[6]  # FSAL
            factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err ** -0.2)
            h = min(h_step * factor, max_step)
        else:
            h = h_step * max(_MIN_FACTOR, _SAFETY * err ** -0.2)
    raise IntegrationError("step budget exhausted", t)


# ---------------------------------------------------------------------------
# Three-level Lambda system, Hermitian density matrix packed as 9 reals:
# [p1, p2, p3, Re r12, Im r12, Re r13, Im r13, Re r23, Im r23]
# in the basis (|1>, |2>, |3>).
# ---------------------------------------------------------------------------

def lambda_rhs_packed(y, omega_p, omega_s, detuning, gamma_21, gamma_23):
    """Master-equation right-hand side on the packed real representation.

    omega_p/omega_s may be scalars or arrays broadcasting against the batch.
    """
    hp = 0.5 * omega_p
    hs = 0.5 * omega_s
    gam = gamma_21 + gamma_23
    hg = 0.5 * gam
    p1, p2, p3 = y[..., 0], y[..., 1], y[..., 2]
    ar, ai = y[..., 3], y[..., 4]
    br, bi = y[..., 5], y[..., 6]
    cr, ci = y[..., 7], y[..., 8]
    dy = np.empty_like(y)
    dy[..., 0] = -2.0 * hp * ai + gamma_21 * p2
    dy[..., 1] = 2.0 * hp * ai - 2.0 * hs * ci - gam * p2
    dy[..., 2] = 2.0 * hs * ci + gamma_23 * p2
    dy[..., 3] = -detuning * ai - hs * bi - hg * ar
    dy[..., 4] = detuning * ar + hs * br - hp * (p2 - p1) - hg * ai
    dy[..., 5] = hp * ci - hs * ai
    dy[..., 6] = -hp * cr + hs * ar
    dy[..., 7] = hp * bi + detuning * ci - hg * cr
    dy[..., 8] = -hp * br - detuning * cr - hs * (p3 - p2) - hg * ci
    return dy


def lambda_final_states(y0, pump_sp, stokes_sp, sigma_ps, t_p_ps, t_s_ps,
                        detuning, gamma_21, gamma_23,
                        t0, t1, rtol, atol, max_step):
    """Batched Gaussian-pulse evolution; y0 shape (n, 9), spatial factors (n,)."""
    pump_sp = np.asarray(pump_sp, dtype=float)
    stokes_sp = np.asarray(stokes_sp, dtype=float)

    def rhs(t, y):
        omega_p = pump_sp * np.exp(-((t - t_p_ps) / sigma_ps) ** 2)
        omega_s = stokes_sp * np.exp(-((t - t_s_ps) / sigma_ps) ** 2)
        return lambda_rhs_packed(y, omega_p, omega_s, detuning, gamma_21, gamma_23)

    return _dp45(rhs, t0, t1, y0, rtol, atol, max_step)


def lambda_final_state_callable(y0, drive, detuning, gamma_21, gamma_23,
                                t0, t1, rtol, atol, max_step):
    """Single-system evolution with an arbitrary drive callable t -> (P, S)."""

    def rhs(t, y):
        omega_p, omega_s = drive(t)
        return lambda_rhs_packed(y, omega_p, omega_s, detuning, gamma_21, gamma_23)

    return _dp45(rhs, t0, t1, np.asarray(y0, dtype=float)[None, :],
                 rtol, atol, max_step)[0]


# ---------------------------------------------------------------------------
# Four-level dye rate equations: [n0, n0_vib, n1, n1_vib]
# ---------------------------------------------------------------------------

def sted_final_states(y0, exc_sp, depl_sp, sigma_ps, t_e_ps, t_d_ps,
                      inv_tau_vib, inv_tau_fl, back_transfer,
                      t0, t1, rtol, atol, max_step):
    """Batched rate-equation evolution; y0 shape (n, 4), rate factors (n,)."""
    exc_sp = np.asarray(exc_sp, dtype=float)
    depl_sp = np.asarray(depl_sp, dtype=float)
    back = 1.0 if back_transfer else 0.0

    def rhs(t, y):
        ke = exc_sp * np.exp(-((t - t_e_ps) / sigma_ps) ** 2)
        kd = depl_sp * np.exp(-((t - t_d_ps) / sigma_ps) ** 2)
        n0, n0v, n1, n1v = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
        dy = np.empty_like(y)
        dy[..., 0] = -ke * n0 + inv_tau_vib * n0v + inv_tau_fl * n1
        dy[..., 1] = kd * n1 - inv_tau_vib * n0v - back * kd * n0v
        dy[..., 2] = inv_tau_vib * n1v - kd * n1 - inv_tau_fl * n1 + back * kd * n0v
        dy[..., 3] = ke * n0 - inv_tau_vib * n1v
        return dy

    return _dp45(rhs, t0, t1, y0, rtol, atol, max_step)
