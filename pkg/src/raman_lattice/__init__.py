"""Raman sideband spectroscopy and cooling of an atom in a 2D optical lattice
whose two standing waves are slightly nonorthogonal."""

from .analysis import (
    ThermometryReport,
    fit_area_model,
    fit_avoided_crossing,
    fit_lorentzian_doublet,
    thermometry_from_spectrum,
)
from .cooling import CoolingProtocol, OccupationTrajectory, simulate_cooling
from .fitting import FitError, FitResult, least_squares_fit
from .lattice import LatticeConfig, TrapEigensystem, eigensystem, minimum_splitting, omega2_from_power
from .raman import RamanDrive, ThermalState, rabi_transfer_probability, sideband_area, thermometry_invert
from .specfun import chi, chi_quadrature
from .spectrum import CrossingScan, DetuningGrid, Spectrum, add_noise, crossing_scan, synthesize_spectrum

__version__ = "0.1.0"

__all__ = [
    "CoolingProtocol",
    "CrossingScan",
    "DetuningGrid",
    "FitError",
    "FitResult",
    "LatticeConfig",
    "OccupationTrajectory",
    "RamanDrive",
    "Spectrum",
    "ThermalState",
    "ThermometryReport",
    "TrapEigensystem",
    "add_noise",
    "chi",
    "chi_quadrature",
    "crossing_scan",
    "eigensystem",
    "fit_area_model",
    "fit_avoided_crossing",
    "fit_lorentzian_doublet",
    "least_squares_fit",
    "minimum_splitting",
    "omega2_from_power",
    "rabi_transfer_probability",
    "sideband_area",
    "simulate_cooling",
    "synthesize_spectrum",
    "thermometry_from_spectrum",
    "thermometry_invert",
]
