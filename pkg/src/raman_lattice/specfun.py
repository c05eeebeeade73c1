"""Bessel J0/J1, Struve H0/H1 and the sideband-area saturation kernel chi.

All functions accept scalars or arrays and return the same shape. Nothing
here depends on scipy.special; scipy is used only for the adaptive quadrature
in :func:`chi_quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "BESSEL_SERIES_MAX",
    "STRUVE_SERIES_MAX",
    "ConvergenceError",
    "KernelValue",
    "bessel_j",
    "struve_h",
    "chi",
    "chi_quadrature",
    "evaluate_kernel",
]

# Crossovers between power series and the large-argument routes. Chosen with
# scripts/specfun_crossover.py: below these values the series agrees with the
# quadrature oracle to ~1e-14; at x = 20 cancellation already costs ~5e-10.
BESSEL_SERIES_MAX = 8.0
STRUVE_SERIES_MAX = 8.0

_SERIES_TERMS = 60


class ConvergenceError(RuntimeError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (estimated error {error_estimate:.3g})")
        self.error_estimate = error_estimate


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _bessel_series(order, x):
    y = -0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * y / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_miller(x):
    """J0 and J1 for x > 0 by backward recurrence, normalised with J0 + 2 sum J_2k = 1."""
    xmax = float(x.max())
    n_start = int(xmax + 12.0 * xmax ** (1.0 / 3.0) + 40)
    n_start += n_start % 2
    j_next = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    for k in range(n_start, 0, -1):
        j_prev = (2.0 * k / x) * j - j_next
        j_next, j = j, j_prev
        # j now holds J_{k-1}
        if k - 1 == 1:
            j1 = j.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        big = np.abs(j) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j, j_next, norm, j1 = j * scale, j_next * scale, norm * scale, j1 * scale
    norm += j
    return j / norm, j1 / norm


def bessel_j(order, x):
    """Bessel function of the first kind J_order(x) for order 0 or 1."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are implemented")
    arr, scalar = _as_array(x)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= BESSEL_SERIES_MAX
    if np.any(small):
        out[small] = _bessel_series(order, ax[small])
    if np.any(~small):
        j0, j1 = _bessel_miller(ax[~small])
        out[~small] = j0 if order == 0 else j1
    if order == 1:
        out = np.where(arr < 0, -out, out)
    return float(out) if scalar else out


def _struve_series(order, x):
    y = -0.25 * x * x
    if order == 0:
        term = 2.0 * x / math.pi
        a, b = 1.5, 1.5
    else:
        term = 2.0 * x * x / (3.0 * math.pi)
        a, b = 1.5, 2.5
    total = term.copy()
    for k in range(_SERIES_TERMS):
        term = term * y / ((k + a) * (k + b))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


@lru_cache(maxsize=64)
def _quarter_period_nodes(n):
    t, w = np.polynomial.legendre.leggauss(n)
    tau = 0.25 * math.pi * (t + 1.0)
    return tau, 0.25 * math.pi * w


def _struve_integral(order, x):
    # H0 = (2/pi) int_0^{pi/2} sin(x cos t) dt
    # H1 = (2x/pi) int_0^{pi/2} sin^2 t sin(x cos t) dt
    n = int(float(x.max())) // 2 + 40
    tau, w = _quarter_period_nodes(n)
    s = np.sin(np.multiply.outer(x, np.cos(tau)))
    if order == 0:
        return (2.0 / math.pi) * (s @ w)
    return (2.0 * x / math.pi) * (s @ (w * np.sin(tau) ** 2))


def struve_h(order, x):
    """Struve function H_order(x) for order 0 or 1."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are implemented")
    arr, scalar = _as_array(x)
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= STRUVE_SERIES_MAX
    if np.any(small):
        out[small] = _struve_series(order, ax[small])
    if np.any(~small):
        out[~small] = _struve_integral(order, ax[~small])
    if order == 0:
        out = np.where(arr < 0, -out, out)
    return float(out) if scalar else out


def chi(theta):
    """Saturation factor of the integrated Rabi lineshape at pulse area ``theta``.

    chi(0) = 1 and chi(theta) = 1 - theta**2/12 + O(theta**4).
    """
    arr, scalar = _as_array(theta)
    if np.any(arr < 0):
        raise ValueError("theta must be non-negative")
    half_pi = 0.5 * math.pi
    out = (half_pi * bessel_j(1, arr) * struve_h(0, arr)
           + bessel_j(0, arr) * (1.0 - half_pi * struve_h(1, arr)))
    return float(out) if scalar else np.asarray(out)


def chi_quadrature(theta, tol=1e-8):
    """chi from its defining integral over u in [1, inf), by adaptive quadrature.

    The endpoint singularity at u = 1 is removed with u = cosh(s); beyond
    ``u_split`` the oscillatory tail is handled by a Fourier-weighted rule.
    Raises :class:`ConvergenceError` if the estimated error exceeds ``tol``.
    """
    theta = float(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    u_split = max(2.0, 1.0 / theta)
    s_split = math.acosh(u_split)

    def head(s):
        return math.sin(0.5 * theta * math.cosh(s)) ** 2 / math.cosh(s)

    # break the head at the zeros of sin^2 so quad sees single lobes
    n_lobes = int(theta * u_split / (2 * math.pi)) + 1
    pts = [math.acosh(max(1.0, 2 * math.pi * j / theta)) for j in range(1, n_lobes)]
    pts = [p for p in pts if 0 < p < s_split]
    f_head, e_head = integrate.quad(head, 0.0, s_split, points=pts or None,
                                    epsabs=1e-14, epsrel=1e-13, limit=500)

    def g(u):
        return 1.0 / (u * math.sqrt(u * u - 1.0))

    f_cos, e_cos = integrate.quad(g, u_split, np.inf, weight="cos", wvar=theta,
                                  epsabs=1e-13, limlst=200)
    tail = 0.5 * math.asin(1.0 / u_split) - 0.5 * f_cos
    pref = 4.0 / (math.pi * theta)
    err = pref * (e_head + 0.5 * e_cos)
    if err > tol:
        raise ConvergenceError(f"chi quadrature at theta={theta}", err)
    return pref * (f_head + tail)


@dataclass(frozen=True)
class KernelValue:
    theta: float
    chi: float
    method: str


def evaluate_kernel(theta, method="closed-form"):
    if method == "closed-form":
        return KernelValue(float(theta), chi(float(theta)), method)
    if method == "quadrature":
        return KernelValue(float(theta), chi_quadrature(theta), method)
    raise ValueError(f"unknown method {method!r}")
