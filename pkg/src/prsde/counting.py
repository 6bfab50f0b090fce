"""Orbit dimensions by exact rank, the dimension table, and closed-form counts."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable

from . import multiindex as mi
from .algebra import BASE_VARS, Var
from .jets import JetGerm
from .linalg import matrix_rank
from .report import CheckReport
from .sde import dim_jet_space, dim_sde_formula, random_germ, sample_sde_germ
from .symmetry import monomial_generator, prolong_eval


@dataclass(frozen=True)
class SpanningSet:
    """Monomial generators spanning the k-th prolongation at points with ``t = z = 0``."""

    k: int
    generators: tuple  # (family, m, n)

    @classmethod
    def for_order(cls, k: int, extra_degree: int = 0) -> "SpanningSet":
        gens = []
        for fam in (1, 2, 3, 4, 5):
            top = (k if fam == 3 else k + 1) + extra_degree
            gens += [(fam, m, s - m) for s in range(top + 1) for m in range(s + 1)]
        return cls(k, tuple(gens))

    def __len__(self) -> int:
        return len(self.generators)

    @staticmethod
    def expected_size(k: int) -> int:
        return 4 * comb(k + 3, 2) + comb(k + 2, 2)


def jet_columns(k: int) -> list[Var]:
    return list(BASE_VARS) + [Var.jet(f, s) for f in range(3) for s in mi.multi_indices_upto(k)]


def orbit_germ(k: int, seed) -> JetGerm:
    """Germ of order ``k + 1`` on the slice ``t = z = 0``; on the equation when ``k >= 2``."""
    if k >= 1:
        return sample_sde_germ(k + 1, seed) if k >= 2 else random_germ(k + 1, random.Random(seed))
    return random_germ(1, random.Random(seed))


def spanning_matrix(k: int, seed, extra_degree: int = 0) -> list[list]:
    germ = orbit_germ(k, seed)
    cols = jet_columns(k)
    rows = []
    for fam, m, n in SpanningSet.for_order(k, extra_degree).generators:
        vals = prolong_eval(monomial_generator(fam, m, n), k, germ)
        rows.append([vals[c] for c in cols])
    return rows


def orbit_dimension(k: int, seed) -> int:
    """Rank of the prolonged spanning set at a generic point of SDE_k (J^k for k <= 1)."""
    return matrix_rank(spanning_matrix(k, seed))


def orbit_dimension_formula(k: int) -> int:
    return (k + 2) * (5 * k + 13) // 2


def verify_free_action(k: int, seed) -> CheckReport:
    t0 = time.perf_counter()
    rows = spanning_matrix(k, seed)
    rank = matrix_rank(rows)
    expected = SpanningSet.expected_size(k)
    ok = rank == len(rows) == expected
    return CheckReport(
        f"free-action-k{k}",
        "the prolonged symmetry algebra acts freely on SDE_k",
        passed=ok,
        attempted=1,
        succeeded=int(ok),
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=[] if ok else [{"k": k, "seed": str(seed), "rank": rank, "expected": expected}],
        details={"k": k, "rank": rank, "rows": len(rows), "expected_rows": expected},
    )


def completeness_probe(k: int, seed, extra_degree: int = 2) -> dict:
    """Rank with generators of higher monomial degree added (should not grow)."""
    return {
        "k": k,
        "rank": orbit_dimension(k, seed),
        "rank_with_extra": matrix_rank(spanning_matrix(k, seed, extra_degree)),
        "extra_degree": extra_degree,
    }


# ---------------------------------------------------------------------------
# dimension table


@dataclass
class DimensionRow:
    k: int
    dim_jet: int
    dim_sde: int
    dim_orbit: int
    dim_orbit_formula: int | None
    codim: int
    hilbert: int


@dataclass
class DimensionTable:
    rows: list = field(default_factory=list)

    def to_dict(self) -> list[dict]:
        return [asdict(r) for r in self.rows]

    def markdown(self) -> str:
        ks = [r.k for r in self.rows]
        head = "| k | " + " | ".join(str(k) for k in ks) + " |"
        sep = "|---|" + "---|" * len(ks)
        lines = [head, sep]
        for label, attr in (("dim SDE_k", "dim_sde"), ("dim O_k", "dim_orbit"), ("codim O_k", "codim"), ("H(k)", "hilbert")):
            lines.append(f"| {label} | " + " | ".join(str(getattr(r, attr)) for r in self.rows) + " |")
        return "\n".join(lines) + "\n"


def dim_sde(k: int) -> int:
    return dim_jet_space(k) if k < 2 else dim_sde_formula(k)


def codim_formula(k: int) -> int:
    """``k^3 + 2k^2 - 5k - 6`` (valid for ``k >= 3``)."""
    return k ** 3 + 2 * k ** 2 - 5 * k - 6


def dimension_table(kmax: int, seed) -> DimensionTable:
    table = DimensionTable()
    prev = 0
    for k in range(kmax + 1):
        orbit = orbit_dimension(k, f"{seed}:orbit:{k}")
        sde = dim_sde(k)
        codim = sde - orbit
        table.rows.append(
            DimensionRow(k, dim_jet_space(k), sde, orbit, orbit_dimension_formula(k) if k >= 3 else None, codim, codim - prev)
        )
        prev = codim
    return table


def verify_dimension_table(kmax: int, seed) -> CheckReport:
    t0 = time.perf_counter()
    table = dimension_table(kmax, seed)
    failures = []
    for r in table.rows:
        if r.dim_orbit_formula is not None and r.dim_orbit != r.dim_orbit_formula:
            failures.append({"k": r.k, "dim_orbit": r.dim_orbit, "formula": r.dim_orbit_formula})
        if r.k >= 3 and r.codim != codim_formula(r.k):
            failures.append({"k": r.k, "codim": r.codim, "formula": codim_formula(r.k)})
        if r.k >= 2 and r.hilbert != hilbert("sde", r.k):
            failures.append({"k": r.k, "H": r.hilbert, "closed_form": hilbert("sde", r.k)})
    return CheckReport(
        "dims",
        "orbit dimensions, codimensions and pure-order counts of the symmetry action on SDE",
        passed=not failures,
        attempted=len(table.rows),
        succeeded=len(table.rows) - len({f["k"] for f in failures}),
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"table": table.to_dict()},
    )


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class CountingFormulas:
    """Hilbert function with its exceptional low orders and the Poincare function ``N(z)/(1-z)^e``."""

    family: str
    exceptional: dict
    generic: Callable[[int], Fraction]
    generic_from: int
    numerator: tuple  # coefficients of N(z), constant term first
    pole_order: int

    def hilbert(self, k: int) -> int:
        if k in self.exceptional:
            return self.exceptional[k]
        if k < self.generic_from:
            return 0
        v = self.generic(k)
        assert v.denominator == 1
        return int(v)

    def series(self, terms: int) -> list[int]:
        """First ``terms`` Taylor coefficients of ``N(z) / (1 - z)^e`` by long division."""
        den = [comb(self.pole_order, i) * (-1) ** i for i in range(self.pole_order + 1)]
        num = list(self.numerator) + [0] * terms
        out = []
        for n in range(terms):
            c = num[n]  # den[0] == 1
            out.append(c)
            for i, d in enumerate(den[1:], start=1):
                if n + i < len(num):
                    num[n + i] -= c * d
        return out

    def pole_order_at_one(self) -> int:
        """Order of the pole at ``z = 1`` of the stored rational function."""
        num = list(self.numerator)
        order = self.pole_order
        while order > 0 and sum(num) == 0:  # (1 - z) divides N
            quotient, acc = [], 0
            for c in num[:-1]:
                acc += c
                quotient.append(acc)
            num = quotient
            order -= 1
        return order


CLOSED_FORMS = {
    "sde": CountingFormulas(
        "sde",
        {0: 0, 1: 0, 2: 4, 3: 20},
        lambda k: Fraction(3 * k * k + k - 6),
        4,
        (0, 0, 4, 8, -2, -8, 4),  # 2z^2(2 + 4z - z^2 - 4z^3 + 2z^4)
        3,
    ),
    "conformal": CountingFormulas(
        "conformal",
        {0: 0, 1: 0, 2: 1, 3: 13},
        lambda k: Fraction(3 * k * k - 7),
        4,
        (0, 0, 1, 10, 5, -17, 7),
        3,
    ),
    "metric": CountingFormulas(
        "metric",
        {0: 0, 1: 0, 2: 9},
        lambda k: Fraction((k - 1) * (k * k + 25 * k + 36), 6),
        3,
        (0, 0, 9, 4, -30, 24, -6),
        4,
    ),
}
FAMILY_NAMES = tuple(CLOSED_FORMS)


def closed_forms(family: str) -> CountingFormulas:
    try:
        return CLOSED_FORMS[family]
    except KeyError:
        raise ValueError(f"family must be one of {FAMILY_NAMES}") from None


def hilbert(family: str, k: int) -> int:
    return closed_forms(family).hilbert(k)


def series_check(terms: int = 12) -> CheckReport:
    t0 = time.perf_counter()
    failures = []
    details = {}
    for name, cf in CLOSED_FORMS.items():
        coeffs = cf.series(terms + 1)
        hs = [cf.hilbert(k) for k in range(terms + 1)]
        if coeffs != hs:
            failures.append({"family": name, "series": coeffs, "hilbert": hs})
        if cf.pole_order_at_one() != cf.pole_order:
            failures.append({"family": name, "pole_order": cf.pole_order_at_one()})
        details[name] = {"series": coeffs, "pole_order": cf.pole_order_at_one()}
    lead = [hilbert("sde", k) - hilbert("conformal", k) for k in range(4, terms + 1)]
    details["sde_minus_conformal"] = lead
    # same leading term: the difference is at most linear in k
    if any(a - 2 * b + c for a, b, c in zip(lead, lead[1:], lead[2:])):
        failures.append({"leading_terms_differ": lead})
    return CheckReport(
        "poincare-series",
        "Poincare functions expand to the Hilbert functions",
        passed=not failures,
        attempted=len(CLOSED_FORMS),
        succeeded=len(CLOSED_FORMS) - len({f.get("family") for f in failures if "family" in f}),
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details=details,
    )


__all__ = [
    "SpanningSet",
    "DimensionRow",
    "DimensionTable",
    "CountingFormulas",
    "orbit_dimension",
    "verify_free_action",
    "dimension_table",
    "verify_dimension_table",
    "closed_forms",
    "hilbert",
    "series_check",
    "completeness_probe",
]
