"""Physical constants and the reference parameters of the 87Rb lattice setup.

Everything is SI. Frequencies named ``*_omega`` are angular (rad/s).
"""

from math import pi

from scipy.constants import atomic_mass, h, hbar, k as k_B

__all__ = [
    "hbar",
    "h",
    "k_B",
    "M_RB87",
    "LAMBDA_1064",
    "LAMBDA_772",
    "K_1064",
    "K_772",
    "TWO_PI",
    "OMEGA_HF",
    "khz",
    "to_khz",
]

TWO_PI = 2.0 * pi

M_RB87 = 86.909180527 * atomic_mass

LAMBDA_1064 = 1064e-9
LAMBDA_772 = 772e-9
K_1064 = TWO_PI / LAMBDA_1064
K_772 = TWO_PI / LAMBDA_772

# Hyperfine splitting of the 87Rb ground state; only an I/O convention, the
# detuning used throughout is measured relative to it.
OMEGA_HF = TWO_PI * 6.834682610904e9


def khz(f):
    """Angular frequency (rad/s) of a frequency given in kHz."""
    return TWO_PI * 1e3 * f


def to_khz(omega):
    return omega / (TWO_PI * 1e3)
