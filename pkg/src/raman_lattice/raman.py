"""Raman sideband transitions of a trapped atom.

Lamb-Dicke factors, the two-level Rabi lineshape, pulse areas and integrated
sideband areas, thermal occupation and sideband thermometry, and the
node/antinode selection rule for the standing-wave Raman beam.

Areas are integrals of the transfer probability over the angular detuning, so
they carry units of rad/s. Divide by 2*pi for areas over Delta_omega/2pi in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from .constants import hbar, k_B
from .lattice import LatticeConfig, eigensystem
from .specfun import ConvergenceError, chi

__all__ = [
    "SINC2_FWHM",
    "RamanDrive",
    "ThermalState",
    "UnphysicalAreasError",
    "recoil_frequency",
    "lamb_dicke",
    "mode_lamb_dicke",
    "ladder_matrix_element",
    "rabi_transfer_probability",
    "small_area_lineshape",
    "lineshape_fwhm",
    "pulse_area_sideband",
    "pulse_area_from_drive",
    "omega0_from_p1",
    "p1_from_omega0",
    "sideband_area",
    "thermal_q",
    "thermal_populations",
    "thermal_sideband_areas",
    "thermometry_invert",
    "extract_omega0",
    "oscillator_length",
    "selection_rule_overlap",
]

# FWHM of sin^2(x/2)/x^2 in units of 2*pi (x = Delta * t).
SINC2_FWHM = 0.886

THERMAL_TAIL = 1e-15


class UnphysicalAreasError(ValueError):
    """Red sideband at least as large as the blue one (negative temperature)."""


@dataclass(frozen=True)
class RamanDrive:
    """A rectangular Raman pulse.

    ``delta_omega`` is the two-photon detuning relative to the free-space
    hyperfine splitting. ``geometry`` is the parity of the standing-wave Raman
    field at the atom: ``"node"`` (sin) or ``"antinode"`` (cos).
    """

    omega0: float
    t_pulse: float
    delta_omega: float = 0.0
    geometry: str = "node"

    def __post_init__(self):
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")
        if not self.t_pulse > 0:
            raise ValueError("t_pulse must be positive")
        if self.geometry not in ("node", "antinode"):
            raise ValueError(f"unknown geometry {self.geometry!r}")


@dataclass(frozen=True)
class ThermalState:
    """Thermal occupation of one mode, parameterised by the Boltzmann factor q."""

    q: float
    omega: float

    def __post_init__(self):
        if not 0.0 <= self.q < 1.0:
            raise ValueError(f"q={self.q!r} outside [0, 1)")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @classmethod
    def from_temperature(cls, omega, temperature):
        return cls(thermal_q(omega, temperature), omega)

    @classmethod
    def from_nbar(cls, omega, nbar):
        if nbar < 0:
            raise ValueError("nbar must be non-negative")
        return cls(nbar / (1.0 + nbar), omega)

    @property
    def nbar(self) -> float:
        return self.q / (1.0 - self.q)

    @property
    def temperature(self) -> float:
        if self.q == 0:
            return 0.0
        return hbar * self.omega / (k_B * -math.log(self.q))

    def populations(self, tail=THERMAL_TAIL):
        return thermal_populations(self.q, tail)


def recoil_frequency(k, mass):
    """Recoil angular frequency hbar k^2 / 2m."""
    return hbar * k * k / (2.0 * mass)


def lamb_dicke(projection_sq, omega_mode, k2, mass):
    """eta = |k_mode/k2| sqrt(omega_rec / omega_mode) for a mode with squared projection onto k2."""
    if omega_mode <= 0:
        raise ValueError("mode frequency must be positive")
    return math.sqrt(projection_sq) * math.sqrt(recoil_frequency(k2, mass) / omega_mode)


def mode_lamb_dicke(cfg: LatticeConfig, mode: str) -> float:
    es = eigensystem(cfg)
    return lamb_dicke(es.projection(mode), es.omega(mode), cfg.k2, cfg.mass)


def ladder_matrix_element(n, eta):
    """First-order blue-sideband element <n+1| k.x |n> = eta sqrt(n+1)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return eta * np.sqrt(np.asarray(n) + 1.0) if np.ndim(n) else eta * math.sqrt(n + 1.0)


def rabi_transfer_probability(omega_nn, delta_R, t):
    """Two-level transfer probability after a rectangular pulse of length ``t``."""
    if np.any(np.asarray(t) <= 0):
        raise ValueError("t must be positive")
    w2 = np.square(omega_nn)
    gen2 = w2 + np.square(delta_R)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(gen2 > 0, w2 / gen2 * np.sin(0.5 * t * np.sqrt(gen2)) ** 2, 0.0)
    return p if np.ndim(p) else float(p)


def small_area_lineshape(omega_nn, delta_R, t):
    """Weak-drive limit omega^2/Delta^2 sin^2(Delta t / 2)."""
    x = 0.5 * np.asarray(delta_R, dtype=float) * t
    # sin(x)/x written through np.sinc, which is sin(pi y)/(pi y)
    p = (0.5 * omega_nn * t) ** 2 * np.sinc(x / math.pi) ** 2
    return p if np.ndim(p) else float(p)


def lineshape_fwhm(t):
    """FWHM (rad/s) of the interaction-time broadened line for pulse length ``t``."""
    if t <= 0:
        raise ValueError("t must be positive")
    return 2.0 * math.pi * SINC2_FWHM / t


def pulse_area_sideband(cfg: LatticeConfig, P_z, P1, mode):
    """Blue-sideband pulse area theta_{1,0,mode} when the Raman field power tracks the lattice.

    theta^2 = (omega1/omega_mode) (P_z/P1) (e_mode . k2/k2)^2
    """
    if P1 <= 0:
        raise ValueError("P1 must be positive")
    es = eigensystem(cfg)
    w = es.omega(mode)
    if w <= 0:
        raise ValueError(f"mode {mode} has zero frequency")
    return math.sqrt(cfg.omega1 / w * P_z / P1 * es.projection(mode))


def pulse_area_from_drive(omega0, t, eta):
    return omega0 * t * eta


def omega0_from_p1(P_z, P1, omega1, omega_rec, t):
    """Free-space two-photon Rabi frequency implied by the power scale P1."""
    return math.sqrt(omega1 * P_z / (omega_rec * P1)) / t


def p1_from_omega0(P_z, omega0, omega1, omega_rec, t):
    return omega1 * P_z / (omega_rec * (omega0 * t) ** 2)


def sideband_area(theta, t):
    """Integral of the Rabi lineshape over detuning, (pi/2t) theta^2 chi(theta), in rad/s."""
    if t <= 0:
        raise ValueError("t must be positive")
    theta = np.asarray(theta, dtype=float)
    a = 0.5 * math.pi / t * theta**2 * chi(theta)
    return a if np.ndim(a) else float(a)


def thermal_q(omega, temperature):
    """Boltzmann factor exp(-hbar omega / k_B T); zero at T = 0."""
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if omega <= 0:
        raise ValueError("omega must be positive")
    if temperature == 0:
        return 0.0
    return math.exp(-hbar * omega / (k_B * temperature))


def thermal_populations(q, tail=THERMAL_TAIL):
    """p_n = (1-q) q^n truncated at the first n with p_n < ``tail``."""
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    if q == 0:
        return np.array([1.0])
    n_max = max(0, math.ceil(math.log(tail / (1.0 - q)) / math.log(q)))
    return (1.0 - q) * q ** np.arange(n_max + 1)


def thermal_sideband_areas(q, A_10):
    """Total (blue, red) sideband areas of a thermal state in the weak-drive regime."""
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    blue = A_10 / (1.0 - q)
    return blue, q * blue


def thermometry_invert(A_red, A_blue, omega):
    """Mean excitation and temperature from red and blue sideband areas."""
    if A_red < 0:
        raise ValueError("areas must be non-negative")
    if A_red >= A_blue:
        raise UnphysicalAreasError(f"A_red={A_red!r} >= A_blue={A_blue!r}")
    if A_red == 0:
        return 0.0, 0.0
    ratio = A_blue / A_red
    nbar = 1.0 / (ratio - 1.0)
    temperature = hbar * omega / (k_B * math.log(ratio))
    return nbar, temperature


def extract_omega0(A_red, A_blue, eta, t):
    """Free-space Rabi frequency from the blue-minus-red area (weak drive)."""
    if eta <= 0 or t <= 0:
        raise ValueError("eta and t must be positive")
    diff = A_blue - A_red
    if diff < 0 or A_red < 0:
        raise ValueError("need A_blue >= A_red >= 0")
    return math.sqrt(2.0 * diff / (math.pi * t)) / eta


def oscillator_length(omega, mass):
    """sqrt(hbar / m omega); eta = k * length / sqrt(2)."""
    return math.sqrt(hbar / (mass * omega))


@lru_cache(maxsize=8)
def _gauss_hermite(n):
    return roots_hermite(n)


def _hermite_table(n_max, xi):
    """Orthonormal Hermite polynomials h_0..h_n_max at xi, weight exp(-xi^2)."""
    h = np.empty((n_max + 1, xi.size))
    h[0] = math.pi ** -0.25
    if n_max >= 1:
        h[1] = math.sqrt(2.0) * xi * h[0]
    for n in range(1, n_max):
        h[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * h[n] - math.sqrt(n / (n + 1)) * h[n - 1]
    return h


def _overlap(n, m, kl, parity, nodes):
    xi, w = _gauss_hermite(nodes)
    h = _hermite_table(max(n, m), xi)
    f = np.sin(kl * xi) if parity == "node" else np.cos(kl * xi)
    return float(np.sum(w * h[n] * h[m] * f))


def selection_rule_overlap(n2, n2p, k2, oscillator_length, parity="node", nodes=200, tol=1e-12):
    """<n2'| sin(k2 z) |n2> (node) or <n2'| cos(k2 z) |n2> (antinode).

    Evaluated by Gauss-Hermite quadrature and checked against a run with twice
    the nodes. Matrix elements that vanish by parity are returned as exact zeros.
    """
    if n2 < 0 or n2p < 0:
        raise ValueError("vibrational quantum numbers must be non-negative")
    if parity not in ("node", "antinode"):
        raise ValueError(f"unknown parity {parity!r}")
    odd_change = (n2 + n2p) % 2 == 1
    if (parity == "node") != odd_change:
        return 0.0
    kl = k2 * oscillator_length
    v = _overlap(n2, n2p, kl, parity, nodes)
    v2 = _overlap(n2, n2p, kl, parity, 2 * nodes)
    if abs(v - v2) > tol:
        raise ConvergenceError(f"Gauss-Hermite overlap <{n2p}|.|{n2}>", abs(v - v2))
    return v2
