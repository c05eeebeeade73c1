"""Raman sideband cooling runs behind the documented drive and heating choices.

1) 1D cooling from nbar 3.3 (21 cycles, no heating) against the Rabi
   frequency, expressed as its value at 1 uW of travelling-wave power.
2) 2D cooling at the halfway detuning from nbar 1.3 against the per-repump
   heating probability, for both heating placements.

    python scripts/cooling_runs.py [--ensemble N]
"""

import argparse

import numpy as np

from raman_lattice.constants import TWO_PI, khz
from raman_lattice.cooling import CoolingProtocol, cooling_omega0, simulate_cooling
from raman_lattice.lattice import LatticeConfig, eigensystem
from raman_lattice.raman import ThermalState


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ensemble", type=int, default=20_000)
    a = ap.parse_args()

    cfg = LatticeConfig.from_frequencies(khz(530.0), khz(430.0), 0.016)
    es = eigensystem(cfg)
    init = {"+": None, "-": ThermalState.from_nbar(es.omega_minus, 3.3)}
    print("1D, zero heating, 21 cycles")
    print(f"{'omega0 @1uW (kHz)':>18} {'theta(n=1)':>10} {'nbar':>7} {'ground':>7}")
    for f in np.arange(4.0, 9.01, 0.5):
        p = CoolingProtocol(omega0=cooling_omega0(TWO_PI * f * 1e3), recoil_heating_prob=0.0,
                            ensemble=a.ensemble)
        tr = simulate_cooling(p, cfg, init)
        theta = p.omega0 * 0.0946 * p.t_raman
        print(f"{f:18.1f} {theta:10.3f} {tr.nbar_minus[-1]:7.4f} {tr.ground_fraction[-1]:7.4f}")

    cfg2 = LatticeConfig.from_frequencies(khz(545.0), khz(545.0), 0.016)
    es2 = eigensystem(cfg2)
    init2 = {m: ThermalState.from_nbar(es2.omega(m), 1.3) for m in "+-"}
    print("\n2D-halfway, 21 cycles, default drive, worst-mode nbar")
    hs = (0.0, 0.005, 0.01, 0.02, 0.05, 0.1)
    print(f"{'heating on':>10} " + " ".join(f"{h:>7}" for h in hs))
    for where in ("transfer", "every"):
        vals = []
        for h in hs:
            p = CoolingProtocol(recoil_heating_prob=h, heating_on=where, ensemble=a.ensemble)
            vals.append(max(simulate_cooling(p, cfg2, init2, "2D-halfway").final()))
        print(f"{where:>10} " + " ".join(f"{v:7.3f}" for v in vals))


if __name__ == "__main__":
    main()
