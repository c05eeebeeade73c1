"""Synthetic Raman spectra and power scans through the avoided crossing.

Detunings in :class:`Spectrum` are Delta_omega/2pi in Hz; internally every
frequency is angular. Scan areas are reported per Hz of detuning, i.e. the
rad/s areas of :mod:`raman_lattice.raman` divided by 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import TWO_PI
from .lattice import LatticeConfig, eigensystem, omega2_from_power
from .raman import (
    RamanDrive,
    ThermalState,
    lamb_dicke,
    pulse_area_sideband,
    rabi_transfer_probability,
    sideband_area,
)

__all__ = [
    "DEFAULT_BACKGROUND",
    "NOISE_CLIP",
    "DetuningGrid",
    "Spectrum",
    "CrossingScan",
    "resonance_positions",
    "sideband_channels",
    "synthesize_spectrum",
    "crossing_scan",
    "add_noise",
]

DEFAULT_BACKGROUND = 0.06
NOISE_CLIP = (-0.05, 1.05)

MODES = ("+", "-")


@dataclass(frozen=True)
class DetuningGrid:
    """Uniform grid of Delta_omega/2pi in Hz, both ends included."""

    start: float = -600e3
    stop: float = 600e3
    step: float = 1e3

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if not self.stop > self.start:
            raise ValueError("grid must have stop > start")

    @classmethod
    def inset(cls, center, half_width):
        return cls(center - half_width, center + half_width, 200.0)

    def values(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step))
        return self.start + self.step * np.arange(n + 1)


@dataclass
class Spectrum:
    detunings: np.ndarray
    transfer: np.ndarray
    metadata: dict = field(default_factory=dict)
    clipped: bool = False

    def __post_init__(self):
        self.detunings = np.asarray(self.detunings, dtype=float)
        self.transfer = np.asarray(self.transfer, dtype=float)
        if self.detunings.ndim != 1 or self.detunings.size == 0:
            raise ValueError("detunings must be a non-empty 1D array")
        if self.transfer.shape != self.detunings.shape:
            raise ValueError("transfer and detunings differ in length")
        if np.any(np.diff(self.detunings) <= 0):
            raise ValueError("detunings must be strictly increasing")

    def window(self, lo, hi):
        m = (self.detunings >= lo) & (self.detunings <= hi)
        return self.detunings[m], self.transfer[m]


@dataclass
class CrossingScan:
    powers: np.ndarray
    frequencies_plus: np.ndarray
    frequencies_minus: np.ndarray
    areas_plus: np.ndarray
    areas_minus: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("powers", "frequencies_plus", "frequencies_minus", "areas_plus", "areas_minus"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(self.frequencies_plus < self.frequencies_minus):
            raise ValueError("frequencies_plus must not lie below frequencies_minus")


def resonance_positions(eig, orders):
    """Two-photon detunings omega_+ dn_+ + omega_- dn_- (rad/s) for each (dn_+, dn_-)."""
    return [eig.omega_plus * dp + eig.omega_minus * dm for dp, dm in orders]


def _thermal_for(thermal, mode, omega):
    if thermal is None:
        return ThermalState(0.0, omega)
    st = thermal[mode] if isinstance(thermal, dict) else thermal[MODES.index(mode)]
    if st is None:
        return ThermalState(0.0, omega)
    if not isinstance(st, ThermalState):
        raise TypeError("thermal entries must be ThermalState or None")
    return st


def sideband_channels(cfg: LatticeConfig, drive: RamanDrive, thermal, delta):
    """Thermally averaged first-order sideband transfer, one array per channel.

    Returns a dict keyed by (mode, "blue"|"red"). ``delta`` is angular.
    """
    es = eigensystem(cfg)
    delta = np.asarray(delta, dtype=float)
    out = {}
    for mode in MODES:
        w = es.omega(mode)
        proj = es.projection(mode)
        st = _thermal_for(thermal, mode, w)
        if w <= 0 or proj == 0:
            out[(mode, "blue")] = np.zeros_like(delta)
            out[(mode, "red")] = np.zeros_like(delta)
            continue
        eta = lamb_dicke(proj, w, cfg.k2, cfg.mass)
        p = st.populations()
        n = np.arange(p.size)
        rabi_blue = drive.omega0 * eta * np.sqrt(n + 1.0)
        rabi_red = drive.omega0 * eta * np.sqrt(n)
        d = delta - drive.delta_omega
        blue = rabi_transfer_probability(rabi_blue[:, None], (d - w)[None, :], drive.t_pulse)
        red = rabi_transfer_probability(rabi_red[:, None], (d + w)[None, :], drive.t_pulse)
        out[(mode, "blue")] = p @ blue
        out[(mode, "red")] = p @ red
    return out


def synthesize_spectrum(cfg: LatticeConfig, drive: RamanDrive, thermal=None, grid=None,
                        background=DEFAULT_BACKGROUND) -> Spectrum:
    """Population transfer on the first-order sidebands of both modes.

    The carrier is absent at a node of the standing-wave Raman beam. Channels
    are combined as independent events, P = 1 - prod(1 - P_i); the constant
    ``background`` is then added and the result clipped at 1.
    """
    if drive.geometry != "node":
        raise ValueError("only the node geometry (no carrier) is synthesized")
    if not 0.0 <= background < 1.0:
        raise ValueError("background must lie in [0, 1)")
    grid = grid or DetuningGrid()
    nu = grid.values() if isinstance(grid, DetuningGrid) else np.asarray(grid, dtype=float)
    if nu.size == 0:
        raise ValueError("empty detuning grid")
    chans = sideband_channels(cfg, drive, thermal, TWO_PI * nu)
    dark = np.ones_like(nu)
    for p in chans.values():
        dark *= 1.0 - p
    total = 1.0 - dark + background
    clipped = bool(np.any(total > 1.0))
    meta = {
        "lattice": cfg.summary(),
        "drive": {"omega0": drive.omega0, "t_pulse": drive.t_pulse,
                  "delta_omega": drive.delta_omega, "geometry": drive.geometry},
        "thermal": {m: _thermal_for(thermal, m, 1.0).q for m in MODES},
        "background": background,
        "noise_seed": None,
    }
    return Spectrum(nu, np.minimum(total, 1.0), meta, clipped)


def crossing_scan(cfg: LatticeConfig, powers, P0, P1, t) -> CrossingScan:
    """omega_+/-(P_z) and the blue-sideband areas A_{1,0,+/-} while tuning the cavity lattice."""
    powers = np.asarray(powers, dtype=float)
    if np.any(powers <= 0):
        raise ValueError("powers must be positive")
    fp, fm, ap, am = [], [], [], []
    for P_z in powers:
        c = cfg.with_kappa2(cfg.mass * omega2_from_power(P_z, P0, cfg.omega1) ** 2)
        es = eigensystem(c)
        fp.append(es.omega_plus / TWO_PI)
        fm.append(es.omega_minus / TWO_PI)
        ap.append(sideband_area(pulse_area_sideband(c, P_z, P1, "+"), t) / TWO_PI)
        am.append(sideband_area(pulse_area_sideband(c, P_z, P1, "-"), t) / TWO_PI)
    meta = {"lattice": cfg.summary(), "P0": P0, "P1": P1, "t": t}
    return CrossingScan(powers, np.array(fp), np.array(fm), np.array(ap), np.array(am), meta)


def add_noise(spectrum: Spectrum, sigma, seed) -> Spectrum:
    """I.i.d. Gaussian noise on the transfer values, clipped to NOISE_CLIP."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    meta = dict(spectrum.metadata, noise_seed=seed, noise_sigma=sigma)
    if sigma == 0:
        return Spectrum(spectrum.detunings.copy(), spectrum.transfer.copy(), meta, spectrum.clipped)
    rng = np.random.default_rng(seed)
    noisy = spectrum.transfer + rng.normal(0.0, sigma, spectrum.transfer.size)
    lo, hi = NOISE_CLIP
    clipped = spectrum.clipped or bool(np.any((noisy < lo) | (noisy > hi)))
    return Spectrum(spectrum.detunings.copy(), np.clip(noisy, lo, hi), meta, clipped)
