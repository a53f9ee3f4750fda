# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels (Dormand-Prince 5(4), FSAL).

Scalar per-point counterparts of slapsim._backend._fallback: identical
tableau, error norm and step-size controller, hand-unrolled for the two
small systems that dominate runtime (9-component packed density matrix,
4-component dye populations).  All inner loops run without the GIL, so
grid scans parallelize with ordinary Python threads.
"""

from libc.math cimport exp, sqrt, fabs, fmin, fmax, pow

import numpy as np

from ._common import IntegrationError, MAX_STEPS

cdef long _MAX_STEPS = MAX_STEPS

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0

# Dormand-Prince nodes and weights.
cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0

cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0

cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

ctypedef void (*rhs_t)(double t, double* y, double* dy, double* pars) noexcept nogil


cdef void lambda_rhs(double t, double* y, double* dy, double* pars) noexcept nogil:
    # pars: [pump_sp, stokes_sp, sigma, t_p, t_s, detuning, gamma_21, gamma_23]
    cdef double ep = (t - pars[3]) / pars[2]
    cdef double es = (t - pars[4]) / pars[2]
    cdef double hp = 0.5 * pars[0] * exp(-ep * ep)
    cdef double hs = 0.5 * pars[1] * exp(-es * es)
    cdef double det = pars[5]
    cdef double g21 = pars[6]
    cdef double g23 = pars[7]
    cdef double gam = g21 + g23
    cdef double hg = 0.5 * gam
    cdef double p1 = y[0], p2 = y[1], p3 = y[2]
    cdef double ar = y[3], ai = y[4]
    cdef double br = y[5], bi = y[6]
    cdef double cr = y[7], ci = y[8]
    dy[0] = -2.0 * hp * ai + g21 * p2
    dy[1] = 2.0 * hp * ai - 2.0 * hs * ci - gam * p2
    dy[2] = 2.0 * hs * ci + g23 * p2
    dy[3] = -det * ai - hs * bi - hg * ar
    dy[4] = det * ar + hs * br - hp * (p2 - p1) - hg * ai
    dy[5] = hp * ci - hs * ai
    dy[6] = -hp * cr + hs * ar
    dy[7] = hp * bi + det * ci - hg * cr
    dy[8] = -hp * br - det * cr - hs * (p3 - p2) - hg * ci


cdef void sted_rhs(double t, double* y, double* dy, double* pars) noexcept nogil:
    # pars: [exc_sp, depl_sp, sigma, t_e, t_d, inv_tau_vib, inv_tau_fl, back]
    cdef double ee = (t - pars[3]) / pars[2]
    cdef double ed = (t - pars[4]) / pars[2]
    cdef double ke = pars[0] * exp(-ee * ee)
    cdef double kd = pars[1] * exp(-ed * ed)
    cdef double inv_tau = pars[5]
    cdef double inv_tfl = pars[6]
    cdef double back = pars[7]
    cdef double n0 = y[0], n0v = y[1], n1 = y[2], n1v = y[3]
    dy[0] = -ke * n0 + inv_tau * n0v + inv_tfl * n1
    dy[1] = kd * n1 - inv_tau * n0v - back * kd * n0v
    dy[2] = inv_tau * n1v - kd * n1 - inv_tfl * n1 + back * kd * n0v
    dy[3] = ke * n0 - inv_tau * n1v


cdef int dp45(rhs_t rhs, double* pars, int d, double* y,
              double t0, double t1, double rtol, double atol,
              double max_step, double* t_fail) noexcept nogil:
    """Advance y in place from t0 to t1.  Returns 0 on success, 1 on
    step-size underflow, 2 on step-budget exhaustion."""
    cdef double k[7][9]
    cdef double ytmp[9]
    cdef double ynew[9]
    cdef double span = t1 - t0
    cdef double t = t0
    cdef double h = fmin(max_step, span / 100.0)
    cdef double min_step = 1e-13 * span
    cdef double h_step, errv, scale, err, factor
    cdef int j
    cdef bint last
    cdef long n

    rhs(t, y, k[0], pars)
    for n in range(_MAX_STEPS):
        if t >= t1:
            return 0
        last = (t1 - t) <= h
        h_step = (t1 - t) if last else h
        if h_step < min_step:
            t_fail[0] = t
            return 1

        for j in range(d):
            ytmp[j] = y[j] + h_step * (A21 * k[0][j])
        rhs(t + C2 * h_step, ytmp, k[1], pars)
        for j in range(d):
            ytmp[j] = y[j] + h_step * (A31 * k[0][j] + A32 * k[1][j])
        rhs(t + C3 * h_step, ytmp, k[2], pars)
        for j in range(d):
            ytmp[j] = y[j] + h_step * (A41 * k[0][j] + A42 * k[1][j] + A43 * k[2][j])
        rhs(t + C4 * h_step, ytmp, k[3], pars)
        for j in range(d):
            ytmp[j] = y[j] + h_step * (A51 * k[0][j] + A52 * k[1][j]
                                       + A53 * k[2][j] + A54 * k[3][j])
        rhs(t + C5 * h_step, ytmp, k[4], pars)
        for j in range(d):
            ytmp[j] = y[j] + h_step * (A61 * k[0][j] + A62 * k[1][j] + A63 * k[2][j]
                                       + A64 * k[3][j] + A65 * k[4][j])
        rhs(t + h_step, ytmp, k[5], pars)
        for j in range(d):
            ynew[j] = y[j] + h_step * (B1 * k[0][j] + B3 * k[2][j] + B4 * k[3][j]
                                       + B5 * k[4][j] + B6 * k[5][j])
        rhs(t + h_step, ynew, k[6], pars)

        err = 0.0
        for j in range(d):
            errv = h_step * (E1 * k[0][j] + E3 * k[2][j] + E4 * k[3][j]
                             + E5 * k[4][j] + E6 * k[5][j] + E7 * k[6][j])
            scale = atol + rtol * fmax(fabs(y[j]), fabs(ynew[j]))
            errv = errv / scale
            err += errv * errv
        err = sqrt(err / d)

        if err <= 1.0:
            t = t1 if last else t + h_step
            for j in range(d):
                y[j] = ynew[j]
                k[0][j] = k[6][j]
            factor = MAX_FACTOR if err == 0.0 else fmin(MAX_FACTOR, SAFETY * pow(err, -0.2))
            h = fmin(h_step * factor, max_step)
        else:
            h = h_step * fmax(MIN_FACTOR, SAFETY * pow(err, -0.2))
    t_fail[0] = t
    return 2


def _raise(int status, double t_fail, Py_ssize_t index):
    if status == 1:
        raise IntegrationError("step size underflow", t_fail, index)
    if status == 2:
        raise IntegrationError("step budget exhausted", t_fail, index)


def lambda_final_states(y0, pump_sp, stokes_sp, double sigma_ps, double t_p_ps,
                        double t_s_ps, double detuning, double gamma_21,
                        double gamma_23, double t0, double t1,
                        double rtol, double atol, double max_step):
    """Batched Gaussian-pulse evolution; y0 (n, 9), spatial factors (n,)."""
    cdef double[:, ::1] y = np.array(y0, dtype=float, order="C")
    cdef double[::1] psp = np.ascontiguousarray(pump_sp, dtype=float)
    cdef double[::1] ssp = np.ascontiguousarray(stokes_sp, dtype=float)
    cdef Py_ssize_t n = y.shape[0]
    if y.shape[1] != 9 or psp.shape[0] != n or ssp.shape[0] != n:
        raise ValueError("shape mismatch between states and spatial factors")
    cdef double pars[8]
    cdef double t_fail = 0.0
    cdef int status = 0
    cdef Py_ssize_t i
    pars[2] = sigma_ps
    pars[3] = t_p_ps
    pars[4] = t_s_ps
    pars[5] = detuning
    pars[6] = gamma_21
    pars[7] = gamma_23
    with nogil:
        for i in range(n):
            pars[0] = psp[i]
            pars[1] = ssp[i]
            status = dp45(lambda_rhs, pars, 9, &y[i, 0], t0, t1,
                          rtol, atol, max_step, &t_fail)
            if status != 0:
                break
    if status != 0:
        _raise(status, t_fail, i)
    return np.asarray(y)


def sted_final_states(y0, exc_sp, depl_sp, double sigma_ps, double t_e_ps,
                      double t_d_ps, double inv_tau_vib, double inv_tau_fl,
                      bint back_transfer, double t0, double t1,
                      double rtol, double atol, double max_step):
    """Batched rate-equation evolution; y0 (n, 4), rate factors (n,)."""
    cdef double[:, ::1] y = np.array(y0, dtype=float, order="C")
    cdef double[::1] esp = np.ascontiguousarray(exc_sp, dtype=float)
    cdef double[::1] dsp = np.ascontiguousarray(depl_sp, dtype=float)
    cdef Py_ssize_t n = y.shape[0]
    if y.shape[1] != 4 or esp.shape[0] != n or dsp.shape[0] != n:
        raise ValueError("shape mismatch between states and rate factors")
    cdef double pars[8]
    cdef double t_fail = 0.0
    cdef int status = 0
    cdef Py_ssize_t i
    pars[2] = sigma_ps
    pars[3] = t_e_ps
    pars[4] = t_d_ps
    pars[5] = inv_tau_vib
    pars[6] = inv_tau_fl
    pars[7] = 1.0 if back_transfer else 0.0
    with nogil:
        for i in range(n):
            pars[0] = esp[i]
            pars[1] = dsp[i]
            status = dp45(sted_rhs, pars, 4, &y[i, 0], t0, t1,
                          rtol, atol, max_step, &t_fail)
            if status != 0:
                break
    if status != 0:
        _raise(status, t_fail, i)
    return np.asarray(y)
