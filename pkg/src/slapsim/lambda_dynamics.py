"""Density-matrix dynamics of the driven three-level Lambda system.

Basis ordering is (|1>, |2>, |3>): two degenerate ground states coupled to
the excited state |2> by the pump (1<->2) and Stokes (3<->2) fields.  On
two-photon resonance the rotating-wave Hamiltonian is

    H/hbar = Delta |2><2| + (1/2) (Omega_P |2><1| + Omega_S |2><3| + h.c.)

and spontaneous emission from |2> enters as two Lindblad jump channels
|1><2| (rate gamma_21) and |3><2| (rate gamma_23).  The evolution is a
plain adaptive Runge-Kutta integration; Hermiticity is exact by
construction because the state is propagated in a packed real
representation (populations plus independent coherences).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend, beams
from ._backend import IntegrationError  # noqa: F401  (re-export)


@dataclass(frozen=True)
class LambdaMedium:
    """Decay rates (rad/ps) out of the excited state, and one-photon detuning."""

    gamma_21: float
    gamma_23: float
    detuning: float = 0.0

    def __post_init__(self):
        if self.gamma_21 < 0 or self.gamma_23 < 0:
            raise ValueError("decay rates must be >= 0")

    @property
    def total_decay(self):
        return self.gamma_21 + self.gamma_23


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive-integration tolerances and (optional) explicit time window.

    When the window is omitted it is derived from the drive: Gaussian pulse
    pairs integrate over [t_S - 3 sigma, t_P + 3 sigma], where both
    envelopes are below e^-9 of peak, with max step sigma/50.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step_ps: float | None = None
    t_start_ps: float | None = None
    t_end_ps: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.max_step_ps is not None and self.max_step_ps <= 0:
            raise ValueError("max_step_ps must be > 0")
        if (self.t_start_ps is not None and self.t_end_ps is not None
                and not self.t_end_ps > self.t_start_ps):
            raise ValueError("t_end_ps must exceed t_start_ps")


# Tolerated numerical drift on the physical invariants of a density matrix.
TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-9
POSITIVITY_TOL = 1e-8


class DensityMatrix:
    """3x3 Hermitian, unit-trace state of the Lambda system."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check=True):
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.shape != (3, 3):
            raise ValueError(f"density matrix must be 3x3, got {self.matrix.shape}")
        if check:
            self.validate()

    @classmethod
    def ground_state(cls, level=1):
        """Pure population in |1> or |3>."""
        if level not in (1, 2, 3):
            raise ValueError(f"level must be 1, 2 or 3, got {level}")
        rho = np.zeros((3, 3), dtype=complex)
        rho[level - 1, level - 1] = 1.0
        return cls(rho)

    @classmethod
    def from_pure(cls, amplitudes):
        """Projector onto a (normalized) pure state."""
        psi = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("zero state vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @property
    def populations(self):
        """(p1, p2, p3) as real floats."""
        return tuple(float(p) for p in self.matrix.diagonal().real)

    @property
    def trace(self):
        return float(self.matrix.trace().real)

    def validate(self, trace_tol=TRACE_TOL, herm_tol=HERMITICITY_TOL,
                 psd_tol=POSITIVITY_TOL):
        """Raise ValueError if Hermiticity, trace or positivity are violated."""
        herm = np.abs(self.matrix - self.matrix.conj().T).max()
        if herm > herm_tol:
            raise ValueError(f"density matrix not Hermitian (deviation {herm:.2e})")
        tr = self.matrix.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr:.12g} != 1")
        lam_min = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min()
        if lam_min < -psd_tol:
            raise ValueError(f"density matrix not positive (min eigenvalue {lam_min:.2e})")
        return self

    def __repr__(self):
        p1, p2, p3 = self.populations
        return f"DensityMatrix(p1={p1:.6g}, p2={p2:.6g}, p3={p3:.6g})"


def _pack(rho):
    """3x3 Hermitian matrix -> 9 reals [p1 p2 p3 Re12 Im12 Re13 Im13 Re23 Im23]."""
    return np.array([
        rho[0, 0].real, rho[1, 1].real, rho[2, 2].real,
        rho[0, 1].real, rho[0, 1].imag,
        rho[0, 2].real, rho[0, 2].imag,
        rho[1, 2].real, rho[1, 2].imag,
    ])


def _unpack(y):
    """Inverse of :func:`_pack`; result is exactly Hermitian."""
    p1, p2, p3, ar, ai, br, bi, cr, ci = y
    a = ar + 1j * ai
    b = br + 1j * bi
    c = cr + 1j * ci
    return np.array([
        [p1, a, b],
        [np.conj(a), p2, c],
        [np.conj(b), np.conj(c), p3],
    ])


@dataclass(frozen=True)
class GaussianRabiPair:
    """Time-dependent Rabi pair with Gaussian envelopes and fixed peaks.

    This is the drive shape the compiled kernel understands; it is also
    callable, returning (Omega_P, Omega_S) at time t, so it can be handed
    to any code expecting a plain drive function.
    """

    pump_peak: float
    stokes_peak: float
    sigma_ps: float
    t_p_ps: float
    t_s_ps: float

    def __call__(self, t):
        env_p = math.exp(-((t - self.t_p_ps) / self.sigma_ps) ** 2)
        env_s = math.exp(-((t - self.t_s_ps) / self.sigma_ps) ** 2)
        return self.pump_peak * env_p, self.stokes_peak * env_s

    @classmethod
    def at_position(cls, upsilon, drive: beams.BeamDrive):
        """Drive seen by an emitter at lateral position upsilon."""
        return cls(
            pump_peak=drive.omega_p0 * beams.doughnut_amplitude(upsilon, drive.delta),
            stokes_peak=drive.omega_s0 * beams.airy_amplitude(upsilon, 0.0),
            sigma_ps=drive.sigma_ps,
            t_p_ps=drive.t_p_ps,
            t_s_ps=drive.t_s_ps,
        )


def hamiltonian(omega_p, omega_s, medium: LambdaMedium):
    """Rotating-wave Hamiltonian (units of rad/ps) for given instantaneous drives."""
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = medium.detuning
    h[1, 0] = 0.5 * omega_p
    h[0, 1] = 0.5 * np.conj(omega_p)
    h[1, 2] = 0.5 * omega_s
    h[2, 1] = 0.5 * np.conj(omega_s)
    return h


_L1 = np.zeros((3, 3), dtype=complex)
_L1[0, 1] = 1.0  # |1><2|
_L3 = np.zeros((3, 3), dtype=complex)
_L3[2, 1] = 1.0  # |3><2|


def lindblad_rhs(rho, h, medium: LambdaMedium):
    """d(rho)/dt = -i[H, rho] + sum_j gamma_2j D[L_j](rho); traceless Hermitian."""
    rho = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    out = -1j * (h @ rho - rho @ h)
    for gamma, op in ((medium.gamma_21, _L1), (medium.gamma_23, _L3)):
        if gamma == 0.0:
            continue
        op_dag_op = op.conj().T @ op
        out += gamma * (op @ rho @ op.conj().T
                        - 0.5 * (op_dag_op @ rho + rho @ op_dag_op))
    return out


def _resolve_window(drive, cfg: IntegratorConfig):
    t0, t1 = cfg.t_start_ps, cfg.t_end_ps
    if t0 is None or t1 is None:
        if not isinstance(drive, GaussianRabiPair):
            raise ValueError(
                "IntegratorConfig needs an explicit time window for a "
                "general drive callable"
            )
        if t0 is None:
            t0 = drive.t_s_ps - 3.0 * drive.sigma_ps
        if t1 is None:
            t1 = drive.t_p_ps + 3.0 * drive.sigma_ps
    max_step = cfg.max_step_ps
    if max_step is None:
        if isinstance(drive, GaussianRabiPair):
            max_step = drive.sigma_ps / 50.0
        else:
            max_step = (t1 - t0) / 50.0
    return t0, t1, max_step


def evolve(rho0: DensityMatrix, drive, medium: LambdaMedium,
           cfg: IntegratorConfig | None = None) -> DensityMatrix:
    """Propagate rho0 through the pulse sequence, returning the final state.

    ``drive`` is either a :class:`GaussianRabiPair` (dispatched to the fast
    backend kernel) or any callable t -> (Omega_P, Omega_S).  The output is
    re-symmetrized exactly and trace-renormalized; trace drift beyond the
    1e-8 budget raises IntegrationError.
    """
    cfg = cfg or IntegratorConfig()
    t0, t1, max_step = _resolve_window(drive, cfg)
    y0 = _pack(rho0.matrix)
    if isinstance(drive, GaussianRabiPair):
        y = _backend.lambda_final_states(
            y0[None, :], [drive.pump_peak], [drive.stokes_peak],
            drive.sigma_ps, drive.t_p_ps, drive.t_s_ps,
            medium.detuning, medium.gamma_21, medium.gamma_23,
            t0, t1, cfg.rel_tol, cfg.abs_tol, max_step,
        )[0]
    else:
        y = _backend.lambda_final_state_callable(
            y0, drive, medium.detuning, medium.gamma_21, medium.gamma_23,
            t0, t1, cfg.rel_tol, cfg.abs_tol, max_step,
        )
    tr = y[0] + y[1] + y[2]
    if abs(tr - 1.0) > TRACE_TOL:
        raise IntegrationError(
            f"trace drifted to {tr:.12g}, beyond the {TRACE_TOL:g} budget", t1
        )
    return DensityMatrix(_unpack(y / tr))


def slap_point(upsilon, drive: beams.BeamDrive, medium: LambdaMedium,
               cfg: IntegratorConfig | None = None) -> float:
    """Final |1> population at lateral position upsilon (optical units).

    The emitter starts in |1> and undergoes the counterintuitive
    Stokes-then-pump sequence; away from the pump node the population is
    adiabatically transferred to |3>, at the node it stays put.
    """
    point_drive = GaussianRabiPair.at_position(upsilon, drive)
    rho = evolve(DensityMatrix.ground_state(1), point_drive, medium, cfg)
    p1 = rho.populations[0]
    return min(max(p1, 0.0), 1.0)
