"""Profiles of rho^n h / omega0 along rays into the front face of the r=1/2 blow-up."""

from __future__ import annotations

import argparse

import numpy as np

from fracheat.halfpower import front_face_profile
from fracheat.models import SpectralModel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--xi", type=float, default=1.0)
    ap.add_argument("--angles", type=float, nargs="+", default=[0.3, 0.8, 1.2])
    args = ap.parse_args()

    for n in (1, 2, 3):
        m = SpectralModel(n, (1.0,), args.xi if n % 2 else 0.0)
        for ang in args.angles:
            omega = [np.cos(ang), np.sin(ang)] + [0.0] * (n - 1)
            if n % 2 == 0:
                rho = 0.4 * 0.5 ** np.arange(6)
            else:
                rho = np.geomspace(0.01, 0.4, 40)[::-1]
            prof = front_face_profile(m, omega, rho)
            line = f"n={n} angle={ang:.2f} limit={prof.limit:.10f} predicted={prof.predicted_limit:.10f}"
            if prof.log_coefficient is not None:
                line += f" log={prof.log_coefficient:.6f} predicted_log={prof.predicted_log:.6f}"
            print(line + f" [{prof.verdict}]")


if __name__ == "__main__":
    main()
