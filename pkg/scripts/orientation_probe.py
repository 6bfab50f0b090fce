"""Which half of the Weyl operator vanishes on solutions, and how often the other one does."""

import argparse
import json

from prsde.curvature import derive_sde_and_verify


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    result = derive_sde_and_verify(args.samples, args.seed)
    print(f"vanishing block: {result.orientation}  elapsed {result.report.elapsed:.2f}s")
    print(json.dumps(result.report.details, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
