"""Pick the series/large-argument crossover for the Bessel and Struve routines.

At a ladder of arguments the power series and the large-argument routes
(Miller recurrence for J, Gauss-Legendre integral for H) are compared with an
adaptive-quadrature oracle. The crossover is placed where the series error is
still at round-off level.

    python scripts/specfun_crossover.py
"""

import math
import warnings

import numpy as np
from scipy import integrate

from raman_lattice import specfun

# the oracle hits round-off at 1e-15, which is the point
warnings.filterwarnings("ignore", category=integrate.IntegrationWarning)


def bessel_oracle(n, x):
    v, _ = integrate.quad(lambda t: math.cos(n * t - x * math.sin(t)), 0, math.pi,
                          epsabs=1e-15, epsrel=1e-14, limit=400)
    return v / math.pi


def struve_oracle(n, x):
    if n == 0:
        v, _ = integrate.quad(lambda t: math.sin(x * math.cos(t)), 0, math.pi / 2,
                              epsabs=1e-15, epsrel=1e-14, limit=400)
        return 2 * v / math.pi
    v, _ = integrate.quad(lambda t: math.sin(t) ** 2 * math.sin(x * math.cos(t)), 0, math.pi / 2,
                          epsabs=1e-15, epsrel=1e-14, limit=400)
    return 2 * x * v / math.pi


def main():
    print(f"{'x':>6} {'J0 series':>11} {'J1 series':>11} {'J0 Miller':>11} "
          f"{'H0 series':>11} {'H1 series':>11} {'H0 GL':>11}")
    for x in [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 25.0]:
        xs = np.array([x])
        errs = [
            abs(specfun._bessel_series(0, xs)[0] - bessel_oracle(0, x)),
            abs(specfun._bessel_series(1, xs)[0] - bessel_oracle(1, x)),
            abs(specfun._bessel_miller(xs)[0][0] - bessel_oracle(0, x)),
            abs(specfun._struve_series(0, xs)[0] - struve_oracle(0, x)),
            abs(specfun._struve_series(1, xs)[0] - struve_oracle(1, x)),
            abs(specfun._struve_integral(0, xs)[0] - struve_oracle(0, x)),
        ]
        print(f"{x:6.1f} " + " ".join(f"{e:11.2e}" for e in errs))
    print(f"chosen: BESSEL_SERIES_MAX={specfun.BESSEL_SERIES_MAX}, "
          f"STRUVE_SERIES_MAX={specfun.STRUVE_SERIES_MAX}")


if __name__ == "__main__":
    main()
