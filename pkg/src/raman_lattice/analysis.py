"""Spectrum and crossing-scan analyses built on :func:`least_squares_fit`.

Spectra are handled in Hz of Delta_omega/2pi; peak areas are in
Hz x probability, the same units as :class:`CrossingScan` areas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import K_772, M_RB87, TWO_PI
from .fitting import FitError, FitResult, least_squares_fit
from .lattice import LatticeConfig, eigenvalues_kappa_pm, omega2_from_power
from .raman import pulse_area_sideband, sideband_area, thermometry_invert
from .spectrum import Spectrum

__all__ = [
    "BACKGROUND_FRACTION",
    "MIN_RESOLVED_PHI",
    "lorentzian",
    "estimate_background",
    "seed_peaks",
    "fit_lorentzian_doublet",
    "peak_list",
    "crossing_model",
    "fit_avoided_crossing",
    "area_model",
    "fit_area_model",
    "extract_area_raw",
    "ThermometryReport",
    "thermometry_from_spectrum",
]

BACKGROUND_FRACTION = 0.1

# A gap omega1*phi below ~50 Hz at omega1/2pi ~ 0.5 MHz is treated as no gap.
MIN_RESOLVED_PHI = 1e-4


def lorentzian(nu, offset, peaks):
    """offset + sum of area-normalised Lorentzians; ``peaks`` holds (center, fwhm, area)."""
    nu = np.asarray(nu, dtype=float)
    y = np.full_like(nu, offset)
    for c, w, a in peaks:
        hw = 0.5 * w
        y += a / math.pi * hw / ((nu - c) ** 2 + hw * hw)
    return y


def _xy(spectrum):
    if isinstance(spectrum, Spectrum):
        return spectrum.detunings, spectrum.transfer
    x, y = spectrum
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def estimate_background(spectrum, fraction=BACKGROUND_FRACTION):
    """Mean transfer over the outermost ``fraction`` of grid points, split between both ends."""
    _, y = _xy(spectrum)
    k = max(1, int(round(0.5 * fraction * y.size)))
    return float(np.mean(np.concatenate([y[:k], y[-k:]])))


def seed_peaks(x, y, n_peaks, offset):
    """Centers, FWHM and areas from the largest local maxima of a 3-point moving average.

    Maxima closer than half the seed FWHM to a larger one are skipped.
    Returns (centers, fwhm, areas, merged) where ``merged`` signals that fewer
    distinct maxima than requested were found.
    """
    ys = np.convolve(y, np.ones(3) / 3.0, mode="same")
    ys[0], ys[-1] = y[0], y[-1]
    inner = np.arange(1, y.size - 1)
    is_max = (ys[inner] > ys[inner - 1]) & (ys[inner] >= ys[inner + 1])
    idx = inner[is_max]
    if idx.size == 0:
        idx = np.array([int(np.argmax(ys))])
    idx = idx[np.argsort(ys[idx])[::-1]]
    top = idx[0]
    height = ys[top] - offset
    half = offset + 0.5 * height
    lo = top
    while lo > 0 and ys[lo] > half:
        lo -= 1
    hi = top
    while hi < y.size - 1 and ys[hi] > half:
        hi += 1
    dx = float(np.median(np.diff(x)))
    fwhm = max(float(x[hi] - x[lo]), 2.0 * dx)
    # noise ripples on one line are not a second peak
    picked = [top]
    for i in idx[1:]:
        if len(picked) == n_peaks:
            break
        if all(abs(x[i] - x[j]) >= 0.5 * fwhm for j in picked):
            picked.append(i)
    merged = len(picked) < n_peaks
    centers = list(x[picked])
    while len(centers) < n_peaks:
        centers.append(centers[0] + 0.5 * fwhm * (1 if len(centers) % 2 else -1))
    heights = [max(float(np.interp(c, x, ys)) - offset, 1e-3 * abs(height) + 1e-12) for c in centers]
    areas = [0.5 * math.pi * h * fwhm for h in heights]
    order = np.argsort(centers)
    return [centers[i] for i in order], fwhm, [areas[i] for i in order], merged


def fit_lorentzian_doublet(spectrum, n_peaks=2, offset=None, fwhm=None, centers=None,
                           window=None) -> FitResult:
    """Fit ``n_peaks`` Lorentzians plus a constant offset.

    ``offset`` and ``fwhm`` fix those quantities when given (the same width
    for every peak). ``centers`` overrides the peak-picking seeds. The result
    carries ``flags["merged"]`` when two fitted centers sit within half a
    linewidth of each other or the fit is singular.
    """
    if n_peaks not in (1, 2):
        raise ValueError("n_peaks must be 1 or 2")
    x, y = _xy(spectrum)
    if window is not None:
        m = (x >= window[0]) & (x <= window[1])
        x, y = x[m], y[m]
    off0 = estimate_background((x, y)) if offset is None else float(offset)
    c0, w0, a0, merged_seed = seed_peaks(x, y, n_peaks, off0)
    if centers is not None:
        if len(centers) != n_peaks:
            raise ValueError("need one center seed per peak")
        c0 = sorted(float(c) for c in centers)
        a0 = [max(a0[0], 1e-12)] * n_peaks
    if fwhm is not None:
        w0 = float(fwhm)
    x0 = {"offset": off0}
    bounds = {}
    fixed = set()
    if offset is not None:
        fixed.add("offset")
    for i in range(n_peaks):
        j = i + 1
        x0[f"center{j}"] = c0[i]
        x0[f"fwhm{j}"] = w0
        x0[f"area{j}"] = a0[i]
        bounds[f"center{j}"] = (float(x[0]), float(x[-1]))
        bounds[f"fwhm{j}"] = (0.0, float(x[-1] - x[0]))
        bounds[f"area{j}"] = (0.0, np.inf)
        if fwhm is not None:
            fixed.add(f"fwhm{j}")

    def res(p):
        peaks = [(p[f"center{j}"], p[f"fwhm{j}"], p[f"area{j}"]) for j in range(1, n_peaks + 1)]
        return lorentzian(x, p["offset"], peaks) - y

    r = least_squares_fit(res, x0, bounds=bounds, fixed=fixed)
    if n_peaks == 2 and r.params["center1"] > r.params["center2"]:
        for key in ("center", "fwhm", "area"):
            for d in (r.params, r.stderr):
                d[f"{key}1"], d[f"{key}2"] = d[f"{key}2"], d[f"{key}1"]
    merged = merged_seed and centers is None
    if n_peaks == 2:
        sep = abs(r.params["center2"] - r.params["center1"])
        merged = merged or r.singular or sep < 0.5 * max(r.params["fwhm1"], r.params["fwhm2"])
    r.flags["merged"] = bool(merged)
    return r


def peak_list(result: FitResult):
    """[(center, fwhm, area), ...] from a Lorentzian fit result."""
    n = sum(1 for k in result.params if k.startswith("center"))
    return [(result.params[f"center{j}"], result.params[f"fwhm{j}"], result.params[f"area{j}"])
            for j in range(1, n + 1)]


def crossing_model(powers, phi, omega1, P0, mass):
    """Branch frequencies omega_+/-(P_z)/2pi (Hz) with omega2 = omega1 sqrt(P_z/P0)."""
    out_p, out_m = [], []
    for P in np.asarray(powers, dtype=float):
        w2 = omega2_from_power(P, P0, omega1)
        cfg = LatticeConfig(1.0, 1.0, phi, mass * omega1**2, mass * w2**2, mass)
        kp, km = eigenvalues_kappa_pm(cfg)
        out_p.append(math.sqrt(kp / mass) / TWO_PI)
        out_m.append(math.sqrt(km / mass) / TWO_PI)
    return np.array(out_p), np.array(out_m)


def _check_span(powers, P0, what):
    if not powers.min() < P0 < powers.max():
        warnings.warn(f"{what}: scan powers do not straddle the fitted P0 = {P0:.4g} W",
                      RuntimeWarning, stacklevel=3)


def fit_avoided_crossing(powers, freq_plus, freq_minus, x0=None, mass=None,
                         min_phi=MIN_RESOLVED_PHI) -> FitResult:
    """Fit (phi, omega1, P0) to both measured branches (Hz) simultaneously.

    ``flags["degenerate"]`` is set when the fitted phi is below ``min_phi``
    or within three standard errors of zero: the branches cross without a
    resolvable gap.
    """
    mass = M_RB87 if mass is None else mass
    powers = np.asarray(powers, dtype=float)
    fp = np.asarray(freq_plus, dtype=float)
    fm = np.asarray(freq_minus, dtype=float)
    if powers.size < 4:
        raise FitError("need at least 4 scan points")
    if x0 is None:
        i = int(np.argmin(fp - fm))
        f1 = 0.5 * (fp[i] + fm[i])
        x0 = {"phi": max((fp[i] - fm[i]) / f1, 1e-3), "omega1": TWO_PI * f1, "P0": powers[i]}
    x0 = {"phi": x0["phi"], "omega1": x0["omega1"], "P0": x0["P0"]}

    def res(p):
        mp, mm = crossing_model(powers, p["phi"], p["omega1"], p["P0"], mass)
        return np.concatenate([mp - fp, mm - fm])

    r = least_squares_fit(res, x0, bounds={"phi": (0.0, 0.5 * math.pi), "P0": (0.0, np.inf),
                                           "omega1": (0.0, np.inf)})
    phi, dphi = r.params["phi"], r.stderr["phi"]
    r.flags["degenerate"] = bool(r.singular or phi < max(min_phi, 3.0 * dphi))
    _check_span(powers, r.params["P0"], "fit_avoided_crossing")
    return r


def area_model(powers, phi, P0, P1, t, omega1, k2=None, mass=None):
    """Blue-sideband areas A_{1,0,+/-}(P_z) in Hz."""
    k2 = K_772 if k2 is None else k2
    mass = M_RB87 if mass is None else mass
    ap, am = [], []
    for P in np.asarray(powers, dtype=float):
        cfg = LatticeConfig.from_frequencies(omega1, omega2_from_power(P, P0, omega1), phi,
                                             k2=k2, mass=mass)
        ap.append(sideband_area(pulse_area_sideband(cfg, P, P1, "+"), t) / TWO_PI)
        am.append(sideband_area(pulse_area_sideband(cfg, P, P1, "-"), t) / TWO_PI)
    return np.array(ap), np.array(am)


def fit_area_model(powers, area_plus, area_minus, t, omega1, x0=None, k2=None, mass=None) -> FitResult:
    """Fit (phi, P0, P1) to the blue-sideband areas of both branches."""
    powers = np.asarray(powers, dtype=float)
    ap = np.asarray(area_plus, dtype=float)
    am = np.asarray(area_minus, dtype=float)
    if powers.size < 4:
        raise FitError("need at least 4 scan points")
    if t <= 0:
        raise ValueError("t must be positive")
    if x0 is None:
        i = int(np.argmin(np.abs(ap - am)))
        P0 = powers[i]
        # small-area law with projection 1/2 at the crossing
        theta_sq = max((ap[i] + am[i]) * TWO_PI * 2.0 * t / math.pi, 1e-6)
        x0 = {"phi": 0.02, "P0": P0, "P1": P0 / theta_sq}
    x0 = {"phi": x0["phi"], "P0": x0["P0"], "P1": x0["P1"]}

    def res(p):
        mp, mm = area_model(powers, p["phi"], p["P0"], p["P1"], t, omega1, k2, mass)
        return np.concatenate([mp - ap, mm - am])

    r = least_squares_fit(res, x0, bounds={"phi": (0.0, 0.5 * math.pi), "P0": (0.0, np.inf),
                                           "P1": (0.0, np.inf)})
    _check_span(powers, r.params["P0"], "fit_area_model")
    return r


def extract_area_raw(spectrum, window, offset):
    """Trapezoid integral of (transfer - offset) over ``window`` (Hz)."""
    x, y = _xy(spectrum)
    lo, hi = window
    if not hi > lo:
        raise ValueError("window must have hi > lo")
    if lo < x[0] or hi > x[-1]:
        raise ValueError(f"window [{lo}, {hi}] outside the spectrum span [{x[0]}, {x[-1]}]")
    m = (x >= lo) & (x <= hi)
    return float(np.trapezoid(y[m] - offset, x[m]))


@dataclass(frozen=True)
class ThermometryReport:
    method: str
    area_blue: tuple
    area_red: tuple
    nbar: tuple
    temperature: tuple
    offset: float
    nbar_combined: float
    temperature_combined: float


def thermometry_from_spectrum(spectrum, omegas, half_window, method="fit", offset=None):
    """Mean occupation and temperature per mode from blue and red sideband areas.

    ``omegas`` are the mode angular frequencies, one or two. The blue
    sidebands are fitted with one Lorentzian per mode; unless ``offset`` is
    given, the offset is a free parameter of that fit and is then held fixed.
    With ``method="fit"`` the red sidebands are fitted with offset and widths
    fixed to the blue result. With ``method="raw"`` the red area is the
    offset-subtracted data integrated over the red window, and a single
    occupation is reported for every mode. ``nbar_combined`` always comes from
    the summed areas at the mean mode frequency (modes in equilibrium).
    """
    if method not in ("fit", "raw"):
        raise ValueError(f"unknown method {method!r}")
    omegas = [float(w) for w in omegas]
    if len(omegas) not in (1, 2):
        raise ValueError("one or two modes")
    n_peaks = len(omegas)
    f = [w / TWO_PI for w in omegas]
    blue_win = (min(f) - half_window, max(f) + half_window)
    red_win = (-max(f) - half_window, -min(f) + half_window)
    blue = fit_lorentzian_doublet(spectrum, n_peaks, offset=offset, centers=sorted(f), window=blue_win)
    off = blue.params["offset"]
    order = np.argsort(f)
    Ab_sorted = [p[2] for p in peak_list(blue)]
    Ab = [0.0] * n_peaks
    for rank, i in enumerate(order):
        Ab[i] = Ab_sorted[rank]
    if method == "raw":
        Ar_tot = extract_area_raw(spectrum, red_win, off)
        n, T = thermometry_invert(Ar_tot, sum(Ab), float(np.mean(omegas)))
        k = n_peaks
        return ThermometryReport("raw", tuple(Ab), (Ar_tot,), (n,) * k, (T,) * k, off, n, T)
    width = float(np.mean([p[1] for p in peak_list(blue)]))
    red = fit_lorentzian_doublet(spectrum, n_peaks, offset=off, fwhm=width,
                                 centers=sorted(-x for x in f), window=red_win)
    # ascending centers: red peaks follow -f, so their order is reversed
    Ar_sorted = [p[2] for p in peak_list(red)][::-1]
    Ar = [0.0] * n_peaks
    for rank, i in enumerate(order):
        Ar[i] = Ar_sorted[rank]
    res = [thermometry_invert(Ar[i], Ab[i], omegas[i]) for i in range(n_peaks)]
    n_tot, T_tot = thermometry_invert(sum(Ar), sum(Ab), float(np.mean(omegas)))
    return ThermometryReport("fit", tuple(Ab), tuple(Ar), tuple(r[0] for r in res),
                             tuple(r[1] for r in res), off, n_tot, T_tot)
