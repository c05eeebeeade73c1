"""Avoided crossing of the trap eigenfrequencies and its two fits.

Generates a cavity-power scan at phi = 16 mrad, omega1/2pi = 528 kHz,
P0 = 9.5 uW, adds 1 kHz frequency noise and 5% area noise, then fits the
branch frequencies for (phi, omega1, P0) and the blue-sideband areas for
(phi, P0, P1). Writes the scan as CSV next to the printed fit summary.

    python scripts/crossing_fit.py [--seed N] [--out DIR]
"""

import argparse
from pathlib import Path

import numpy as np

from raman_lattice.analysis import fit_area_model, fit_avoided_crossing
from raman_lattice.cli import write_csv
from raman_lattice.constants import TWO_PI, khz
from raman_lattice.lattice import LatticeConfig
from raman_lattice.spectrum import crossing_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("."))
    a = ap.parse_args()

    cfg = LatticeConfig.from_frequencies(khz(528.0), khz(528.0), 0.016)
    powers = np.linspace(2e-6, 20e-6, 21)
    sc = crossing_scan(cfg, powers, 9.5e-6, 0.9e-6, 0.3e-3)
    rng = np.random.default_rng(a.seed)
    fp = sc.frequencies_plus + rng.normal(0, 1e3, powers.size)
    fm = sc.frequencies_minus + rng.normal(0, 1e3, powers.size)
    ap_ = sc.areas_plus * (1 + rng.normal(0, 0.05, powers.size))
    am_ = sc.areas_minus * (1 + rng.normal(0, 0.05, powers.size))

    a.out.mkdir(parents=True, exist_ok=True)
    write_csv(a.out / "crossing_scan.csv",
              ["power_uw", "freq_plus_khz", "freq_minus_khz", "area_plus_khz", "area_minus_khz"],
              zip(powers * 1e6, fp / 1e3, fm / 1e3, ap_ / 1e3, am_ / 1e3))

    r = fit_avoided_crossing(powers, fp, fm)
    print("frequency fit:")
    print(f"  phi    = {r['phi'] * 1e3:.2f} +- {r.stderr['phi'] * 1e3:.2f} mrad   (true 16)")
    print(f"  omega1 = {r['omega1'] / TWO_PI / 1e3:.3f} +- {r.stderr['omega1'] / TWO_PI / 1e3:.3f} kHz (true 528)")
    print(f"  P0     = {r['P0'] * 1e6:.3f} +- {r.stderr['P0'] * 1e6:.3f} uW   (true 9.5)")
    print(f"  minimum splitting omega1*phi/2pi = {r['phi'] * r['omega1'] / TWO_PI / 1e3:.2f} kHz")

    q = fit_area_model(powers, ap_, am_, 0.3e-3, r["omega1"])
    print("area fit (omega1 from the frequency fit):")
    print(f"  phi = {q['phi'] * 1e3:.2f} +- {q.stderr['phi'] * 1e3:.2f} mrad, "
          f"P0 = {q['P0'] * 1e6:.3f} +- {q.stderr['P0'] * 1e6:.3f} uW, "
          f"P1 = {q['P1'] * 1e6:.3f} +- {q.stderr['P1'] * 1e6:.3f} uW   (true 16, 9.5, 0.9)")


if __name__ == "__main__":
    main()
