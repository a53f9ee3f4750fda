"""Stimulated-emission-depletion baseline on a four-level dye.

Rate-equation photophysics of Rhodamine B: ground level n0, its upper
vibrational level n0_vib (target of stimulated emission), the fluorescent
excited level n1 and the vibrationally hot n1_vib reached by absorption.

    excitation        n0 -> n1_vib   at sigma_cs h_E(x,t) / E_photon(lambda_E)
    vibrational decay n1_vib -> n1, n0_vib -> n0   at 1/tau_vib
    stimulated        n1 -> n0_vib   at sigma_cs h_D(x,t) / E_photon(lambda_D)
    fluorescence      n1 -> n0       at 1/tau_fl

Stimulated re-absorption n0_vib -> n1 is negligible while vibrational
relaxation (1/ps) outruns the depletion rate (~0.04/ps at the default
intensity); it can be switched on via ``back_transfer`` to check that.

The depletion beam is a doughnut.  Two spatial models are provided:

* ``offset_airy`` (default): the coherent superposition of two Airy
  amplitudes displaced by +/- delta, squared - the same doughnut the
  localization pump uses.  Its intensity node is quartic in x.
* ``psf_complement``: the idealized parabolic-node doughnut
  1 - F(u_E, 0)^2 often used in depletion modeling.

Positions are expressed in excitation-wavelength optical units; each
beam's diffraction argument is rescaled to its own wavelength internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend, beams
from ._backend import IntegrationError
from .beams import DEFAULT_DOUGHNUT_OFFSET, OpticalGeometry
from .lambda_dynamics import IntegratorConfig
from .localization import LocalizationProfile, SpatialGrid

PLANCK_H = 6.62607015e-34       # J s
SPEED_OF_LIGHT = 2.99792458e8   # m/s

DOUGHNUT_MODELS = ("offset_airy", "psf_complement")

# Peak absorbed-photon number that counts as saturating excitation.
SATURATION_PHOTONS = 5.0


def photon_rate(intensity_w_cm2, cross_section_cm2, wavelength_nm):
    """Absorption/stimulated-emission rate (ps^-1) = sigma * I / (hc/lambda)."""
    if intensity_w_cm2 < 0 or cross_section_cm2 < 0 or wavelength_nm <= 0:
        raise ValueError("intensity and cross section must be >= 0, wavelength > 0")
    photon_energy_j = PLANCK_H * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
    return cross_section_cm2 * intensity_w_cm2 / photon_energy_j * 1e-12


@dataclass(frozen=True)
class StedDye:
    """Photophysics constants of the fluorophore (Rhodamine B defaults)."""

    cross_section_cm2: float = 1e-17
    tau_vib_ps: float = 1.0
    tau_fl_ps: float = 2000.0

    def __post_init__(self):
        if min(self.cross_section_cm2, self.tau_vib_ps, self.tau_fl_ps) <= 0:
            raise ValueError("dye constants must all be > 0")


@dataclass(frozen=True)
class StedBeams:
    """Excitation/depletion pulse pair: intensities, wavelengths, timing.

    ``h_e_peak_mw_cm2=None`` resolves to the saturating default (peak
    absorbed-photon integral of SATURATION_PHOTONS).  The excitation pulse
    is centered at t = 0 and the depletion pulse at t = delta_t_ps; the
    readout defaults to the end of depletion, delta_t + 3 sigma.
    """

    h_e_peak_mw_cm2: float | None = None
    h_d_peak_mw_cm2: float = 1300.0
    lambda_e_nm: float = 490.0
    lambda_d_nm: float = 600.0
    sigma_ps: float = 100.0
    delta_t_ps: float = 90.0
    numerical_aperture: float = 1.4
    doughnut_offset: float = DEFAULT_DOUGHNUT_OFFSET
    doughnut: str = "offset_airy"
    t_read_ps: float | None = None
    back_transfer: bool = False

    def __post_init__(self):
        if self.h_e_peak_mw_cm2 is not None and self.h_e_peak_mw_cm2 < 0:
            raise ValueError("excitation intensity must be >= 0")
        if self.h_d_peak_mw_cm2 < 0:
            raise ValueError("depletion intensity must be >= 0")
        if self.lambda_e_nm <= 0 or self.lambda_d_nm <= 0:
            raise ValueError("wavelengths must be > 0")
        if self.sigma_ps <= 0:
            raise ValueError("sigma_ps must be > 0")
        if not 0 < self.numerical_aperture <= 1.7:
            raise ValueError("numerical aperture must lie in (0, 1.7]")
        if self.doughnut not in DOUGHNUT_MODELS:
            raise ValueError(
                f"doughnut must be one of {DOUGHNUT_MODELS}, got {self.doughnut!r}"
            )

    @property
    def t_e_ps(self):
        return 0.0

    @property
    def t_d_ps(self):
        return self.delta_t_ps

    def resolved_t_read_ps(self):
        if self.t_read_ps is not None:
            return self.t_read_ps
        return self.delta_t_ps + 3.0 * self.sigma_ps

    def resolved_h_e_mw_cm2(self, dye: StedDye):
        if self.h_e_peak_mw_cm2 is not None:
            return self.h_e_peak_mw_cm2
        return saturating_excitation_mw_cm2(dye, self.sigma_ps, self.lambda_e_nm)

    def geometry_e(self):
        return OpticalGeometry(self.lambda_e_nm, self.numerical_aperture)


def saturating_excitation_mw_cm2(dye: StedDye, sigma_ps, lambda_e_nm,
                                 photons=SATURATION_PHOTONS):
    """Peak intensity making the pulse-integrated absorption ``photons``."""
    peak_rate = photons / (math.sqrt(math.pi) * sigma_ps)  # ps^-1
    photon_energy_j = PLANCK_H * SPEED_OF_LIGHT / (lambda_e_nm * 1e-9)
    intensity_w_cm2 = peak_rate * 1e12 * photon_energy_j / dye.cross_section_cm2
    return intensity_w_cm2 / 1e6


@dataclass(frozen=True)
class StedState:
    """Populations of the four dye levels."""

    n0: float
    n0_vib: float
    n1: float
    n1_vib: float

    @classmethod
    def ground(cls):
        return cls(1.0, 0.0, 0.0, 0.0)

    def as_array(self):
        return np.array([self.n0, self.n0_vib, self.n1, self.n1_vib])

    def validate(self, sum_tol=1e-8, neg_tol=1e-10):
        vals = self.as_array()
        if vals.min() < -neg_tol:
            raise ValueError(f"negative population {vals.min():.3g}")
        if abs(vals.sum() - 1.0) > sum_tol:
            raise ValueError(f"populations sum to {vals.sum():.12g}, not 1")
        return self


def _spatial_factors(upsilon, dye: StedDye, beams_: StedBeams):
    """Per-position peak rates (ps^-1) of excitation and depletion."""
    ups_e = np.asarray(upsilon, dtype=float)
    h_e = beams_.resolved_h_e_mw_cm2(dye) * 1e6
    h_d = beams_.h_d_peak_mw_cm2 * 1e6
    k_e = photon_rate(h_e, dye.cross_section_cm2, beams_.lambda_e_nm)
    k_d = photon_rate(h_d, dye.cross_section_cm2, beams_.lambda_d_nm)

    exc = k_e * beams.airy_amplitude(ups_e, 0.0) ** 2
    if beams_.doughnut == "offset_airy":
        ups_d = ups_e * beams_.lambda_e_nm / beams_.lambda_d_nm
        depl = k_d * beams.doughnut_amplitude(ups_d, beams_.doughnut_offset) ** 2
    else:  # psf_complement
        depl = k_d * (1.0 - beams.airy_amplitude(ups_e, 0.0) ** 2)
    return np.atleast_1d(exc), np.atleast_1d(depl)


def _integrate(ups, dye: StedDye, beams_: StedBeams,
               cfg: IntegratorConfig | None, threads=1):
    cfg = cfg or IntegratorConfig()
    exc_sp, depl_sp = _spatial_factors(ups, dye, beams_)
    n = exc_sp.size
    y0 = np.tile(StedState.ground().as_array(), (n, 1))
    t0 = cfg.t_start_ps if cfg.t_start_ps is not None else -3.0 * beams_.sigma_ps
    t1 = cfg.t_end_ps if cfg.t_end_ps is not None else beams_.resolved_t_read_ps()
    max_step = cfg.max_step_ps if cfg.max_step_ps is not None else beams_.sigma_ps / 50.0
    return _backend.sted_final_states(
        y0, exc_sp, depl_sp, beams_.sigma_ps, beams_.t_e_ps, beams_.t_d_ps,
        1.0 / dye.tau_vib_ps, 1.0 / dye.tau_fl_ps, beams_.back_transfer,
        t0, t1, cfg.rel_tol, cfg.abs_tol, max_step, threads=threads,
    )


def sted_final_state(upsilon, dye: StedDye, beams_: StedBeams,
                     cfg: IntegratorConfig | None = None) -> StedState:
    """All four level populations at readout, for one position."""
    y = _integrate(float(upsilon), dye, beams_, cfg)[0]
    return StedState(*(float(v) for v in y))


def sted_point(upsilon, dye: StedDye, beams_: StedBeams,
               cfg: IntegratorConfig | None = None) -> float:
    """Fluorescent-level population n1 at readout, for one position.

    ``upsilon`` is in excitation-wavelength optical units.
    """
    n1 = sted_final_state(upsilon, dye, beams_, cfg).n1
    return min(max(n1, 0.0), 1.0)


def scan_sted(grid: SpatialGrid, dye: StedDye, beams_: StedBeams,
              cfg: IntegratorConfig | None = None,
              threads: int = 1) -> LocalizationProfile:
    """n1 profile across the grid at readout time."""
    geom = beams_.geometry_e()
    ups = geom.optical_unit(grid.positions)
    try:
        y = _integrate(ups, dye, beams_, cfg, threads=threads)
    except IntegrationError as exc:
        if exc.fail_index is not None:
            x_bad = grid.positions[exc.fail_index]
            raise IntegrationError(
                f"scan failed at x = {x_bad:.6g} nm: {exc}", exc.t_fail_ps
            ) from exc
        raise
    return LocalizationProfile(grid, np.clip(y[:, 2], 0.0, 1.0), "STED")
