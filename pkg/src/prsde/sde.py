"""The self-duality system for the Plebanski-Robinson ansatz and sampling on it.

    F1 = p_xx + 2 q_xy + r_yy
    F2 = D_x m + D_y n
    F3 = D_z m - q D_x m - r D_y m + (q_x + r_y) m
         - (D_t n - p D_x n - q D_y n + (p_x + q_y) n)

with m = p_z - q_t + p q_x - q p_x + q q_y - r p_y and
n = q_z - r_t + q r_y - r q_y + p r_x - q q_x.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from . import multiindex as mi
from .algebra import ZERO, Poly, Var, var
from .errors import DegenerateSample, Inconsistent
from .jets import JetGerm, Series, compose_with_germ, total_derivative
from .linalg import linear_solve

RETRY_BUDGET = 32
SAMPLE_RANGE = 10

T, X, Y, Z = range(4)


@dataclass(frozen=True)
class SDESystem:
    F1: Poly
    F2: Poly
    F3: Poly
    m: Poly
    n: Poly

    @property
    def equations(self) -> tuple[Poly, Poly, Poly]:
        return (self.F1, self.F2, self.F3)


@lru_cache(maxsize=None)
def sde_system() -> SDESystem:
    p, q, r = var("p"), var("q"), var("r")
    p_t, p_x, p_y, p_z = (var(f"p_{d}") for d in "txyz")
    q_t, q_x, q_y, q_z = (var(f"q_{d}") for d in "txyz")
    r_t, r_x, r_y, r_z = (var(f"r_{d}") for d in "txyz")
    m = p_z - q_t + p * q_x - q * p_x + q * q_y - r * p_y
    n = q_z - r_t + q * r_y - r * q_y + p * r_x - q * q_x
    D = total_derivative
    F1 = var("p_xx") + 2 * var("q_xy") + var("r_yy")
    F2 = D(m, X) + D(n, Y)
    lhs = D(m, Z) - q * D(m, X) - r * D(m, Y) + (q_x + r_y) * m
    rhs = D(n, T) - p * D(n, X) - q * D(n, Y) + (p_x + q_y) * n
    return SDESystem(F1, F2, lhs - rhs, m, n)


def residual_series(j: JetGerm, cap: int | None = None) -> tuple[Series, Series, Series]:
    """``F_i`` composed with the germ, computed from the factored form.

    Equivalent to ``compose_with_germ(F_i, j)`` but uses a handful of series
    products instead of expanding every monomial.
    """
    c = j.order if cap is None else cap + 2
    P, Qs, R = (j.series(f, c) for f in range(3))

    def d(s, k):
        return s.derivative(k)

    m = d(P, Z) - d(Qs, T) + P * d(Qs, X) - Qs * d(P, X) + Qs * d(Qs, Y) - R * d(P, Y)
    n = d(Qs, Z) - d(R, T) + Qs * d(R, Y) - R * d(Qs, Y) + P * d(R, X) - Qs * d(Qs, X)
    F1 = d(d(P, X), X) + d(d(Qs, X), Y) * 2 + d(d(R, Y), Y)
    F2 = d(m, X) + d(n, Y)
    lhs = d(m, Z) - Qs * d(m, X) - R * d(m, Y) + (d(Qs, X) + d(R, Y)) * m
    rhs = d(n, T) - P * d(n, X) - Qs * d(n, Y) + (d(P, X) + d(Qs, Y)) * n
    return F1, F2, lhs - rhs


@lru_cache(maxsize=None)
def _symbol_polys() -> tuple[dict, ...]:
    """For each equation: {second-order jet var: coefficient poly in jets of order <= 1}."""
    second = [Var.jet(f, s) for f in range(3) for s in mi.multi_indices(2)]
    out = []
    for F in sde_system().equations:
        coeffs, _ = F.linear_part(second)
        for c in coeffs.values():
            assert c.jet_order() <= 1
        out.append(coeffs)
    return tuple(out)


def equation_residuals(j: JetGerm, max_order: int | None = None) -> dict:
    """``{(i, s): D_s F_i at j}`` for ``|s| <= max_order`` (default ``j.order - 2``)."""
    top = j.order - 2 if max_order is None else max_order
    if top < 0:
        return {}
    series = residual_series(j.truncated(top + 2))
    return {
        (i, s): series[i].derivative_at_zero(s)
        for i in range(3)
        for s in mi.multi_indices_upto(top)
    }


def is_on_equation(j: JetGerm, max_order: int | None = None) -> bool:
    return all(v == 0 for v in equation_residuals(j, max_order).values())


def random_value(rng: random.Random, avoid=()) -> int:
    while True:
        v = rng.randint(-SAMPLE_RANGE, SAMPLE_RANGE)
        if v not in avoid:
            return v


def random_germ(order: int, rng: random.Random, base_point=None) -> JetGerm:
    """Germ with independent random jets (not on the equation)."""
    if base_point is None:
        base_point = (0, random_value(rng, (0,)), random_value(rng, (0,)), 0)
    jets = {}
    for f in range(3):
        for s in mi.multi_indices_upto(order):
            jets[Var.jet(f, s)] = random_value(rng)
    return JetGerm.from_jets(base_point, order, jets)


@dataclass
class LevelStats:
    level: int
    unknowns: int
    equations: int
    rank: int

    @property
    def free(self) -> int:
        return self.unknowns - self.rank


def _solve_level(germ: JetGerm, level: int, rng: random.Random) -> tuple[JetGerm, LevelStats]:
    unknowns = sorted(Var.jet(f, s) for f in range(3) for s in mi.multi_indices(level))
    col = {v: i for i, v in enumerate(unknowns)}
    base = germ.truncated(level)  # level-``level`` coefficients are zero here
    series = residual_series(base, cap=level - 2)
    assignment = base.assignment(1)
    symbols = [{v: c.evaluate(assignment) for v, c in sym.items()} for sym in _symbol_polys()]
    rows, rhs = [], []
    for s in mi.multi_indices(level - 2):
        for i in range(3):
            row = [ZERO] * len(unknowns)
            for v, c in symbols[i].items():
                if c:
                    row[col[Var.jet(v.fiber, mi.add(s, v.sigma))]] += c
            rows.append(row)
            rhs.append(-series[i].derivative_at_zero(s))
    try:
        sol = linear_solve(rows, rhs, lambda c: random_value(rng))
    except Inconsistent as exc:
        raise DegenerateSample(f"inconsistent level {level}") from exc
    if sol.rank < len(rows):
        raise DegenerateSample(f"rank-deficient level {level}")
    jets = dict(zip(unknowns, sol.solution))
    stats = LevelStats(level, len(unknowns), len(rows), sol.rank)
    out = JetGerm(germ.base_point, level, {f: dict(c) for f, c in germ.coeffs.items()})
    return out.with_jets(jets), stats


def _sample_once(k: int, rng: random.Random) -> tuple[JetGerm, list[LevelStats]]:
    germ = random_germ(min(k, 1), rng)
    stats = [LevelStats(0, 3, 0, 0), LevelStats(1, 12, 0, 0)][: min(k, 1) + 1]
    for level in range(2, k + 1):
        germ, st = _solve_level(germ, level, rng)
        stats.append(st)
    return germ, stats


def sample_sde_germ_with_stats(k: int, seed) -> tuple[JetGerm, list[LevelStats]]:
    """Sample a germ on the k-th prolongation, with per-level counts."""
    if k < 2:
        raise ValueError("order must be >= 2")
    rng = random.Random(seed)
    last = None
    for _ in range(RETRY_BUDGET):
        try:
            return _sample_once(k, rng)
        except DegenerateSample as exc:
            last = exc
    raise DegenerateSample(f"retry budget of {RETRY_BUDGET} exhausted: {last}")


def sample_sde_germ(k: int, seed) -> JetGerm:
    """Random germ of order ``k`` with ``D_s F_i = 0`` for ``|s| <= k - 2``.

    Base point is ``(0, x0, y0, 0)`` with random nonzero ``x0, y0``.  Orders 0
    and 1 are random; each higher level is solved from the prolonged equations,
    which are affine in that level's jets.
    """
    return sample_sde_germ_with_stats(k, seed)[0]


def dim_jet_space(k: int) -> int:
    return 4 + 3 * comb(k + 4, 4)


def dim_sde_formula(k: int) -> int:
    """``4 + 3 C(k+4, 4) - 3 C(k+2, 4)``."""
    return 4 + 3 * comb(k + 4, 4) - 3 * comb(k + 2, 4)


def dim_sde_counted(k: int, seed) -> int:
    """Dimension of the k-th prolongation from free coordinates met while sampling."""
    if k < 2:
        return dim_jet_space(k)
    _, stats = sample_sde_germ_with_stats(k, seed)
    return 4 + sum(s.free for s in stats)


def generic_compose_residuals(j: JetGerm) -> tuple[Series, Series, Series]:
    """Residual series through the generic polynomial composition (slow path)."""
    return tuple(compose_with_germ(F, j) for F in sde_system().equations)


def perturb_off_equation(j: JetGerm, rng: random.Random) -> JetGerm:
    """Move a second-order jet so that some ``F_i`` stops vanishing."""
    v = Var.jet(rng.randrange(3), rng.choice(mi.multi_indices(2)))
    return j.with_jets({v: j.value(v) + random_value(rng, (0,))})

