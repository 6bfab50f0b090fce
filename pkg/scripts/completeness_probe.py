"""Add monomial generators of higher degree and check the orbit rank does not grow."""

import argparse

from prsde.counting import completeness_probe


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--extra-degree", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for k in range(args.kmax + 1):
        print(completeness_probe(k, f"{args.seed}:probe:{k}", args.extra_degree))


if __name__ == "__main__":
    main()
