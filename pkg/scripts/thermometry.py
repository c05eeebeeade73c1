"""Sideband thermometry on synthetic spectra.

1D: an uncooled atom (nbar 3.3 along z, trap 530/430 kHz) with noise at
SNR 20, analysed with a free-offset Lorentzian fit of each sideband.

2D: the degenerate trap (545/545 kHz, phi = 16 mrad) at nbar 0.09, analysed
with the constrained red-doublet fit and with the raw red-window area, for
a range of half-window widths. The Lorentzian model does not match the
sinc^2 wings of the interaction-time lineshape, so narrow windows bias the
fitted offset and with it the small red area.

    python scripts/thermometry.py
"""

import numpy as np

from raman_lattice.analysis import thermometry_from_spectrum
from raman_lattice.constants import khz
from raman_lattice.lattice import LatticeConfig, eigensystem
from raman_lattice.raman import RamanDrive, ThermalState
from raman_lattice.spectrum import DetuningGrid, add_noise, synthesize_spectrum


def one_d(n_shots=40):
    cfg = LatticeConfig.from_frequencies(khz(530.0), khz(430.0), 0.016)
    es = eigensystem(cfg)
    th = {"-": ThermalState.from_nbar(es.omega_minus, 3.3), "+": None}
    s = synthesize_spectrum(cfg, RamanDrive(khz(5.0), 0.3e-3), th, DetuningGrid(-600e3, 600e3, 200.0))
    sigma = (s.transfer.max() - 0.06) / 20
    n = np.array([thermometry_from_spectrum(add_noise(s, sigma, k), [es.omega_minus], 40e3).nbar[0]
                  for k in range(n_shots)])
    print(f"1D, nbar 3.3, SNR 20, {n_shots} shots: mean {n.mean():.3f}, sd {n.std():.3f}, "
          f"range {n.min():.2f}-{n.max():.2f}")


def two_d():
    cfg = LatticeConfig.from_frequencies(khz(545.0), khz(545.0), 0.016)
    es = eigensystem(cfg)
    th = {m: ThermalState.from_nbar(es.omega(m), 0.09) for m in "+-"}
    s = synthesize_spectrum(cfg, RamanDrive(khz(7.0), 0.3e-3), th, DetuningGrid(-700e3, 700e3, 100.0))
    om = [es.omega_plus, es.omega_minus]
    print("2D, nbar 0.09 both modes")
    print(f"{'half window':>12} {'fit nbar':>9} {'raw nbar':>9} {'T fit (uK)':>11}")
    for hw in (15e3, 40e3, 80e3, 150e3):
        f = thermometry_from_spectrum(s, om, hw)
        r = thermometry_from_spectrum(s, om, hw, method="raw")
        print(f"{hw / 1e3:9.0f} kHz {f.nbar_combined:9.4f} {r.nbar_combined:9.4f} "
              f"{f.temperature_combined * 1e6:11.2f}")


if __name__ == "__main__":
    one_d()
    two_d()
