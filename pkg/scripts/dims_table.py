"""Orbit dimension table with per-order timings (k = 6, 7 are slow)."""

import argparse
import time

from prsde.counting import codim_formula, dim_sde, orbit_dimension, orbit_dimension_formula


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("k  dim_sde  dim_orbit  formula  codim  codim_formula  seconds")
    for k in range(args.kmax + 1):
        t0 = time.perf_counter()
        orbit = orbit_dimension(k, f"{args.seed}:orbit:{k}")
        dt = time.perf_counter() - t0
        formula = orbit_dimension_formula(k) if k >= 3 else "-"
        cf = codim_formula(k) if k >= 3 else "-"
        print(f"{k}  {dim_sde(k)}  {orbit}  {formula}  {dim_sde(k) - orbit}  {cf}  {dt:.1f}")


if __name__ == "__main__":
    main()
