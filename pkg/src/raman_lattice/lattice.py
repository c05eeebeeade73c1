"""Harmonic model of two intersecting standing waves.

The combined potential near a trap minimum is a 2x2 spring-constant tensor in
the xz plane. Vectors are stored in the primed frame, which is the lab frame
rotated about y by phi/2 so that both wave vectors sit symmetrically about the
diagonal. Use :func:`to_lab_frame` / :func:`to_primed_frame` to convert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import K_1064, K_772, M_RB87

__all__ = [
    "LatticeConfig",
    "TrapEigensystem",
    "UndefinedAngleError",
    "spring_constant_from_depth",
    "build_spring_tensor",
    "eigenvalues_kappa_pm",
    "trap_frequency",
    "principal_axis_angle",
    "principal_axes",
    "sideband_projection",
    "eigensystem",
    "omega2_from_power",
    "minimum_splitting",
    "transverse_frequency",
    "wave_vector_directions",
    "to_lab_frame",
    "to_primed_frame",
]


class UndefinedAngleError(ValueError):
    """Raised when the principal-axis angle is asked for with kappa1 = kappa2 = 0."""


@dataclass(frozen=True)
class LatticeConfig:
    """Two standing waves in the xz plane.

    ``phi`` is the deviation of the angle between the wave vectors from 90
    degrees. Spring constants in N/m, wave numbers in rad/m.
    """

    k1: float
    k2: float
    phi: float
    kappa1: float
    kappa2: float
    mass: float = M_RB87

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError("wave numbers must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.kappa1 < 0 or self.kappa2 < 0:
            raise ValueError("spring constants must be non-negative")
        if not 0.0 <= self.phi <= math.pi / 2:
            raise ValueError(f"phi={self.phi!r} outside [0, pi/2]")

    @classmethod
    def from_frequencies(cls, omega1, omega2, phi, k1=K_1064, k2=K_772, mass=M_RB87):
        """Build from the single-beam trap angular frequencies."""
        return cls(k1=k1, k2=k2, phi=phi, kappa1=mass * omega1**2,
                   kappa2=mass * omega2**2, mass=mass)

    @property
    def omega1(self) -> float:
        return trap_frequency(self.kappa1, self.mass)

    @property
    def omega2(self) -> float:
        return trap_frequency(self.kappa2, self.mass)

    def with_kappa2(self, kappa2: float) -> "LatticeConfig":
        return LatticeConfig(self.k1, self.k2, self.phi, self.kappa1, kappa2, self.mass)

    def summary(self) -> dict:
        return {
            "k1": self.k1, "k2": self.k2, "phi": self.phi,
            "kappa1": self.kappa1, "kappa2": self.kappa2, "mass": self.mass,
        }


@dataclass(frozen=True)
class TrapEigensystem:
    kappa_plus: float
    kappa_minus: float
    omega_plus: float
    omega_minus: float
    beta: float
    e_plus: np.ndarray
    e_minus: np.ndarray
    proj_plus: float
    proj_minus: float

    def omega(self, mode: str) -> float:
        return {"+": self.omega_plus, "-": self.omega_minus}[mode]

    def projection(self, mode: str) -> float:
        return {"+": self.proj_plus, "-": self.proj_minus}[mode]


def spring_constant_from_depth(depth, k):
    """Spring constant 2|V0| k^2 of a single standing wave of depth ``depth`` (J)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return 2.0 * abs(depth) * k**2


def build_spring_tensor(cfg: LatticeConfig) -> np.ndarray:
    s = 0.5 * (cfg.kappa1 + cfg.kappa2)
    d = 0.5 * (cfg.kappa1 - cfg.kappa2)
    sin_phi, cos_phi = math.sin(cfg.phi), math.cos(cfg.phi)
    return np.array([
        [s + d * cos_phi, s * sin_phi],
        [s * sin_phi, s - d * cos_phi],
    ])


def _kappa_pm(kappa1, kappa2, phi):
    mean = 0.5 * (kappa1 + kappa2)
    # (k1 - k2)^2 cos^2 + (k1 + k2)^2 sin^2 avoids the cancellation in
    # k1^2 + k2^2 - 2 k1 k2 cos(2 phi) near the crossing.
    half_gap = 0.5 * np.hypot((kappa1 - kappa2) * np.cos(phi), (kappa1 + kappa2) * np.sin(phi))
    return mean + half_gap, mean - half_gap


def eigenvalues_kappa_pm(cfg_or_tensor):
    """Return (kappa_plus, kappa_minus) from a config or a symmetric 2x2 tensor."""
    if isinstance(cfg_or_tensor, LatticeConfig):
        cfg = cfg_or_tensor
        kp, km = _kappa_pm(cfg.kappa1, cfg.kappa2, cfg.phi)
        return float(kp), float(max(km, 0.0))
    t = np.asarray(cfg_or_tensor, dtype=float)
    if t.shape != (2, 2) or not np.isclose(t[0, 1], t[1, 0], rtol=1e-12, atol=0.0):
        raise ValueError("expected a symmetric 2x2 tensor")
    mean = 0.5 * (t[0, 0] + t[1, 1])
    half_gap = math.hypot(0.5 * (t[0, 0] - t[1, 1]), t[0, 1])
    return mean + half_gap, mean - half_gap


def trap_frequency(kappa, mass):
    if mass <= 0:
        raise ValueError("mass must be positive")
    return np.sqrt(kappa / mass) if isinstance(kappa, np.ndarray) else math.sqrt(kappa / mass)


def principal_axis_angle(cfg: LatticeConfig) -> float:
    """Rotation angle beta in [0, pi] of the principal axes, in the primed frame.

    The symmetric point kappa1 = kappa2 with phi = 0 has an undefined argument;
    it is assigned beta = pi/2, the limit phi -> 0+.
    """
    k1, k2 = cfg.kappa1, cfg.kappa2
    if k1 == 0 and k2 == 0:
        raise UndefinedAngleError("beta undefined for kappa1 = kappa2 = 0")
    re = (k1 - k2) * math.cos(cfg.phi)
    im = (k1 + k2) * math.sin(cfg.phi)
    if re == 0 and im == 0:
        return math.pi / 2
    return math.atan2(im, re)


def principal_axes(cfg: LatticeConfig):
    beta = principal_axis_angle(cfg)
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    return np.array([c, s]), np.array([-s, c])


def sideband_projection(cfg: LatticeConfig):
    """Squared projections (e_plus . k2/k2)^2 and (e_minus . k2/k2)^2."""
    beta = principal_axis_angle(cfg)
    c = math.cos(cfg.phi + beta)
    return 0.5 * (1.0 - c), 0.5 * (1.0 + c)


def eigensystem(cfg: LatticeConfig) -> TrapEigensystem:
    kp, km = eigenvalues_kappa_pm(cfg)
    e_plus, e_minus = principal_axes(cfg)
    pp, pm = sideband_projection(cfg)
    return TrapEigensystem(
        kappa_plus=kp,
        kappa_minus=km,
        omega_plus=trap_frequency(kp, cfg.mass),
        omega_minus=trap_frequency(km, cfg.mass),
        beta=principal_axis_angle(cfg),
        e_plus=e_plus,
        e_minus=e_minus,
        proj_plus=pp,
        proj_minus=pm,
    )


def omega2_from_power(P_z, P0, omega1):
    """Trap frequency of the cavity lattice at transmitted power ``P_z``.

    ``P0`` is the power at which omega2 = omega1.
    """
    if P0 <= 0:
        raise ValueError("P0 must be positive")
    if np.any(np.asarray(P_z) < 0):
        raise ValueError("P_z must be non-negative")
    return omega1 * np.sqrt(np.asarray(P_z) / P0) if np.ndim(P_z) else omega1 * math.sqrt(P_z / P0)


def minimum_splitting(omega1, phi):
    """Splitting omega_+ - omega_- at kappa1 = kappa2.

    Returns ``(small_angle, exact)``: omega1*phi, valid for phi << 1, and
    omega1*(sqrt(1 + sin phi) - sqrt(1 - sin phi)).
    """
    s = math.sin(phi)
    return omega1 * phi, omega1 * (math.sqrt(1 + s) - math.sqrt(1 - s))


def transverse_frequency(omega1, k1, waist):
    """Confinement perpendicular to a Gaussian standing wave of 1/e^2 radius ``waist``."""
    if waist <= 0:
        raise ValueError("waist must be positive")
    return math.sqrt(2.0) * omega1 / (k1 * waist)


def wave_vector_directions(phi):
    """Unit wave vectors (k1_hat, k2_hat) in the primed frame."""
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return np.array([c, s]), np.array([s, c])


def _rot(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def to_lab_frame(v, phi):
    """Map (x', z') components to lab (x, z); k2 ends up along z."""
    return _rot(phi / 2) @ np.asarray(v, dtype=float)


def to_primed_frame(v, phi):
    return _rot(-phi / 2) @ np.asarray(v, dtype=float)
