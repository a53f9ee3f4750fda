"""Integration backend selection.

The hot kernels (per-point master-equation and dye rate-equation
integrations) exist twice: a compiled Cython core and a pure-NumPy
fallback implementing the same Dormand-Prince 5(4) scheme.  The compiled
core is preferred when importable; set SLAPSIM_BACKEND=python (or
=compiled) to force a choice, e.g. for the backend benchmark.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._common import IntegrationError, MAX_STEPS  # noqa: F401  (re-export)
from . import _fallback
from ._fallback import lambda_final_state_callable, lambda_rhs_packed  # noqa: F401

_choice = os.environ.get("SLAPSIM_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(
        f"SLAPSIM_BACKEND must be auto, compiled or python, got {_choice!r}"
    )

_core = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None
        if _choice == "compiled":
            raise ImportError(
                "SLAPSIM_BACKEND=compiled but the slapsim._backend._core "
                "extension is not built"
            )

BACKEND = "compiled" if _core is not None else "python"


def _split(n, threads):
    """Contiguous chunk bounds covering range(n)."""
    threads = max(1, min(threads, n))
    bounds = np.linspace(0, n, threads + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run_chunked(kernel, y0, factor_a, factor_b, args, threads):
    """Dispatch a batched kernel, optionally across a thread pool.

    Points are independent, so the result is bitwise identical for any
    thread count; chunks are reassembled by index.
    """
    n = y0.shape[0]
    if threads <= 1 or n < 2:
        return kernel(y0, factor_a, factor_b, *args)
    out = np.empty_like(y0)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {
            pool.submit(kernel, y0[a:b], factor_a[a:b], factor_b[a:b], *args): (a, b)
            for a, b in _split(n, threads)
        }
        for fut, (a, b) in futures.items():
            out[a:b] = fut.result()
    return out


def lambda_final_states(y0, pump_sp, stokes_sp, sigma_ps, t_p_ps, t_s_ps,
                        detuning, gamma_21, gamma_23, t0, t1,
                        rtol, atol, max_step, threads=1):
    """Evolve a batch of packed density matrices under Gaussian pulses."""
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    pump_sp = np.asarray(pump_sp, dtype=float)
    stokes_sp = np.asarray(stokes_sp, dtype=float)
    args = (sigma_ps, t_p_ps, t_s_ps, detuning, gamma_21, gamma_23,
            t0, t1, rtol, atol, max_step)
    if _core is not None:
        return _run_chunked(_core.lambda_final_states, y0, pump_sp, stokes_sp,
                            args, threads)
    return _fallback.lambda_final_states(y0, pump_sp, stokes_sp, *args)


def sted_final_states(y0, exc_sp, depl_sp, sigma_ps, t_e_ps, t_d_ps,
                      inv_tau_vib, inv_tau_fl, back_transfer, t0, t1,
                      rtol, atol, max_step, threads=1):
    """Evolve a batch of dye level populations under Gaussian pulses."""
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    exc_sp = np.asarray(exc_sp, dtype=float)
    depl_sp = np.asarray(depl_sp, dtype=float)
    args = (sigma_ps, t_e_ps, t_d_ps, inv_tau_vib, inv_tau_fl, back_transfer,
            t0, t1, rtol, atol, max_step)
    if _core is not None:
        return _run_chunked(_core.sted_final_states, y0, exc_sp, depl_sp,
                            args, threads)
    return _fallback.sted_final_states(y0, exc_sp, depl_sp, *args)
