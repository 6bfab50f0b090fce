"""Run the invariance check for each candidate reading of the I2 cubic."""

import argparse

from prsde.invariants import disambiguate_i2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for reading, ok in disambiguate_i2(args.samples, args.seed).items():
        print(f"{reading}: {'invariant' if ok else 'not invariant'}")


if __name__ == "__main__":
    main()
