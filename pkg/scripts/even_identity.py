"""Residuals of the even-dimension q/a identity in the stated and the residue form."""

from __future__ import annotations

import argparse

from fracheat.asym import even_case_identity_check, even_case_identity_residual
from fracheat.models import SpectralModel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 4])
    ap.add_argument("--xi", type=float, default=0.7)
    ap.add_argument("--r", nargs="+", default=["1/2", "1/3", "2/3", "3/5"])
    ap.add_argument("--l-max", type=int, default=2)
    args = ap.parse_args()

    print(f"{'n':>2} {'r':>5} {'l':>2} {'stated':>12} {'residue form':>14}")
    for n in args.n:
        m = SpectralModel(n, (1.0,), args.xi)
        for r in args.r:
            for l in range(1, args.l_max + 1):
                a = even_case_identity_check(m, r, l)
                b = even_case_identity_residual(m, r, l)
                print(f"{n:2d} {r:>5} {l:2d} {a:12.3e} {b:14.3e}")


if __name__ == "__main__":
    main()
