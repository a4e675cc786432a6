"""Fit the t log t coefficient of the shifted-circle r=1/2 kernel across shifts.

Compares the fitted coefficient with +xi/(2 pi) (residue prediction) and with
-xi/(2 pi), and the neighbouring t coefficient with its Bessel-K closed form.
"""

from __future__ import annotations

import argparse
import math

from scipy.special import k1

from fracheat.asym import log_slot_constant, predict_coefficients, predict_exponents
from fracheat.fit import SampleGrid, fit_expansion, geometric_times
from fracheat.heat import heat_kernel_direct
from fracheat.models import SpectralModel
from fracheat.power import RationalPower

EULER = 0.5772156649015329


def bessel_t_coefficient(xi: float) -> float:
    """t coefficient of the shifted circle kernel from its Bessel-K expansion (unit radius)."""
    a = math.sqrt(xi)
    tail = sum(k1(2 * math.pi * m * a) * a / (math.pi * m) for m in range(1, 40))
    return (xi * (EULER - 0.5 + math.log(a / 2)) + 2 * tail) / (2 * math.pi)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--xi", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--t-min", type=float, default=0.01)
    ap.add_argument("--t-max", type=float, default=0.3)
    args = ap.parse_args()

    r = RationalPower.parse("1/2")
    tmpl = predict_exponents(1, r, 4)
    print(f"{'xi':>6} {'fit tlogt':>14} {'+xi/2pi':>14} {'fit t':>14} {'predicted t':>14} {'Bessel-K t':>14}")
    for xi in args.xi:
        m = SpectralModel(1, (1.0,), xi)
        t = geometric_times(args.t_min, args.t_max)
        grid = SampleGrid.from_samples(heat_kernel_direct(m, r, ti, tol=1e-14) for ti in t)
        fit = fit_expansion(grid, tmpl)
        pred = predict_coefficients(m, r, tmpl)
        print(
            f"{xi:6.2f} {fit.coefficient(1, 1):14.9f} {xi / (2 * math.pi):14.9f} "
            f"{fit.coefficient(1):14.9f} {pred.predicted(1):14.9f} {bessel_t_coefficient(xi):14.9f}"
        )
    a, lau = log_slot_constant(SpectralModel(1, (1.0,), 1.0), r, 1)
    print(f"xi=1 constant from finite parts: {a:.12f} (Laurent residue {lau.residue.real:.3e})")


if __name__ == "__main__":
    main()
