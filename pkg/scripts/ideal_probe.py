"""Try to express each vanishing-block component as a constant combination of F1, F2, F3.

Exploratory; nothing here is asserted by the test suite.
"""

from prsde.algebra import format_q
from prsde.curvature import probe_linear_in_equations


def main() -> None:
    for name, coeffs in probe_linear_in_equations("W+").items():
        if coeffs is None:
            print(f"{name}: not a constant combination")
        else:
            terms = [f"({format_q(c)})*F{i + 1}" for i, c in enumerate(coeffs) if c]
            print(f"{name}: " + (" + ".join(terms) or "0"))


if __name__ == "__main__":
    main()
