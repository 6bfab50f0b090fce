"""Second-order differential invariants, the Tresse frame and the G-matrix.

``I1 = K1/K``, ``I2 = K2/K^3``, ``I3 = K3/K^3``, ``I4 = K4/K^2`` where ``K`` is
a relative invariant.  ``K2`` and ``K3`` are squares of cubics; we keep the
cubics ``L2``, ``L3`` too.

The Tresse frame uses ``J[m][i] = D_m I_i`` and ``B = J^-1`` so that
``sum_m B[j][m] J[m][i] = delta_ji``: the invariant derivation dual to
``dI_j`` is ``sum_m B[j][m] D_m``.  ``G = B g B^T`` with ``g`` the PR matrix.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from .algebra import Poly, Q, RatExpr, Var, var
from .errors import SingularJacobian, ZeroDenominator, ZeroG44
from .jets import DualScalar, JetGerm
from .linalg import determinant, inverse, matmul, matrix_rank, transpose
from .report import CheckReport

WEIGHTS = {"I1": 1, "I2": 3, "I3": 3, "I4": 2}
NAMES = ("I1", "I2", "I3", "I4")
RATIO_PAIRS = ((0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3))
RATIO_NAMES = tuple(f"G{i + 1}{j + 1}/G44" for i, j in RATIO_PAIRS)
I2_CANDIDATES = ("q_yy", "q_zz", "r_yy")
DEFAULT_I2_READING = "q_yy"
CORE_VARIABLES = frozenset(Var.parse(n) for n in ("p_xy", "p_yy", "q_xx", "q_xy", "q_yy", "r_xx", "r_xy", "r_yy"))


def _jets():
    names = ("p_xy", "p_yy", "q_xx", "q_xy", "q_yy", "r_xx", "r_xy", "r_yy")
    return tuple(var(n) for n in names)


def relative_invariant_K() -> Poly:
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    return 2 * pxy * rxy - pyy * rxx + 2 * qxx * qyy - 2 * qxy ** 2 + 2 * qxy * ryy + ryy ** 2


def numerator_K1() -> Poly:
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    return 2 * pxy * qxx + pyy * rxx + 4 * qxy ** 2 + 2 * qxy * ryy + 2 * qyy * rxy + ryy ** 2


def cubic_L2(reading: str = DEFAULT_I2_READING) -> Poly:
    """The cubic whose square is ``K2``; ``reading`` is the variable in its last term."""
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    q33 = var(reading)
    return (
        pxy * qxx * ryy - pxy * qyy * rxx - pyy * qxx * rxy + pyy * qxy * rxx
        + 2 * qxy ** 2 * ryy - 2 * qxy * qyy * rxy + qxy * ryy ** 2 - q33 * rxy * ryy
    )


def cubic_L3() -> Poly:
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    inner = (2 * rxy - 2 * qxx) * pxy + 4 * pyy * rxx + 2 * qyy * (qxx - rxy)
    return (
        inner * qxy - 4 * qxy ** 3 + pxy ** 2 * rxx - 2 * pxy * qyy * rxx
        + (qxx - rxy) ** 2 * pyy + qyy ** 2 * rxx
    )


def numerator_K4() -> Poly:
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    return (
        (-12 * pxy * rxy - 6 * pyy * rxx - 12 * qyy * qxx + 12 * qxy ** 2) * ryy ** 2
        - 3 * ryy ** 4
        + (
            (24 * pxy * (qxx - rxy) - 12 * pyy * rxx - 24 * qyy * (qxx + rxy)) * qxy
            + 48 * qxy ** 3
            + 12 * (rxy ** 2 - qxx ** 2) * pyy
            + 12 * (qyy ** 2 - pxy ** 2) * rxx
        ) * ryy
        + 24 * (rxy * (qxx + rxy) * pyy + qyy * rxx * (pxy + qyy)) * qxy
        - 12 * qxy * ryy ** 3
        + 3 * (4 * pxy * rxy - pyy * rxx) * (pyy * rxx - 4 * qyy * qxx)
        - 24 * (pyy * rxx + 2 * qyy * rxy) * qxy ** 2
    )


def singular_matrix() -> list[list[Poly]]:
    """The 8x4 matrix whose rank drops below 4 on the singular set."""
    pxy, pyy, qxx, qxy, qyy, rxx, rxy, ryy = _jets()
    z = Poly.const(0)
    return [
        [z, -2 * qxy - 2 * ryy, pxy + qyy, z],
        [z, 2 * pxy - 2 * qyy, 2 * pyy, pyy],
        [4 * qxy + ryy, -rxx, -2 * qxx, -2 * qxx],
        [-pxy + qyy, qxx - rxy, z, -qxy],
        [-pyy, 2 * qxy - ryy, qyy, z],
        [-2 * qxx + 2 * rxy, z, -2 * rxx, -3 * rxx],
        [-2 * qxy + ryy, rxx, -rxy, -2 * rxy],
        [-2 * qyy, 2 * rxy, z, -ryy],
    ]


@dataclass(frozen=True)
class InvariantCatalog:
    K: Poly
    numerators: dict  # name -> Poly (K1..K4)
    invariants: dict  # name -> RatExpr
    A_matrix: list
    i2_reading: str

    def variables(self) -> frozenset:
        out = set(self.K.variables())
        for n in self.numerators.values():
            out |= n.variables()
        return frozenset(out)


@lru_cache(maxsize=None)
def catalog(i2_reading: str = DEFAULT_I2_READING) -> InvariantCatalog:
    if i2_reading not in I2_CANDIDATES:
        raise ValueError(f"I2 reading must be one of {I2_CANDIDATES}")
    K = relative_invariant_K()
    nums = {
        "I1": numerator_K1(),
        "I2": cubic_L2(i2_reading) ** 2,
        "I3": cubic_L3() ** 2,
        "I4": numerator_K4(),
    }
    invs = {n: RatExpr(nums[n], K ** WEIGHTS[n]) for n in NAMES}
    return InvariantCatalog(K, nums, invs, singular_matrix(), i2_reading)


def _value(v):
    return v.value if isinstance(v, DualScalar) else v


def invariant_values(assignment: dict, reading: str = DEFAULT_I2_READING) -> dict:
    """``K`` and ``I1..I4`` from an assignment of (possibly dual) jet values."""
    cat = catalog(reading)
    zero = Q(0)
    K = cat.K.evaluate(assignment, zero)
    if _value(K) == 0:
        raise ZeroDenominator("K vanishes at the germ")
    out = {"K": K}
    for n in NAMES:
        w = WEIGHTS[n]
        Kw = K
        for _ in range(w - 1):
            Kw = Kw * K
        out[n] = cat.numerators[n].evaluate(assignment, zero) / Kw
    return out


def _germ_assignment(j: JetGerm, variables) -> dict:
    return {v: j.value(v) for v in variables}


def evaluate_invariant(which: str, j: JetGerm, reading: str = DEFAULT_I2_READING) -> mpq:
    """Exact value of ``K`` or ``I1..I4`` at a germ of order >= 2."""
    cat = catalog(reading)
    a = _germ_assignment(j, cat.variables())
    if which == "K":
        return cat.K.evaluate(a)
    if which not in NAMES:
        raise ValueError(f"unknown invariant {which!r}")
    return invariant_values(a, reading)[which]


def singularity_rank(j: JetGerm) -> int:
    a = _germ_assignment(j, CORE_VARIABLES)
    return matrix_rank([[e.evaluate(a) for e in row] for row in singular_matrix()])


# ---------------------------------------------------------------------------
# invariance under the prolonged symmetry algebra


def invariance_epsilons(field_, j: JetGerm, reading: str = DEFAULT_I2_READING) -> dict:
    """Directional derivatives of ``I1..I4`` along ``X^(2)`` at a germ of order >= 3."""
    from .symmetry import prolong_eval

    pert = prolong_eval(field_, 2, j)
    cat = catalog(reading)
    a = {v: DualScalar(j.value(v), pert.get(v, Q(0))) for v in cat.variables()}
    vals = invariant_values(a, reading)
    return {n: vals[n].epsilon for n in NAMES}


def sample_nonsingular(order: int, seed, accept, budget: int = 32):
    """On-equation germ passing ``accept``; returns ``(germ, rejected_count)``."""
    from .sde import sample_sde_germ

    for attempt in range(budget):
        germ = sample_sde_germ(order, f"{seed}:{attempt}")
        try:
            if accept(germ):
                return germ, attempt
        except (ZeroDenominator, SingularJacobian, ZeroG44):
            pass
    from .errors import DegenerateSample

    raise DegenerateSample(f"no admissible germ after {budget} attempts")


def _k_nonzero(germ) -> bool:
    return evaluate_invariant("K", germ) != 0


def invariance_check(which, samples: int, seed, max_degree: int = 4, reading: str = DEFAULT_I2_READING) -> CheckReport:
    """Epsilon parts of ``which`` (subset of I1..I4) vanish under all monomial generators."""
    from .symmetry import NEGATIVE_CONTROL, monomial_generator, monomial_generators

    t0 = time.perf_counter()
    which = tuple(which)
    gens = monomial_generators(max_degree)
    fields = [monomial_generator(*g) for g in gens]
    attempted = succeeded = rejected = control = 0
    failures = []
    for i in range(samples):
        germ, rej = sample_nonsingular(3, f"{seed}:inv:{i}", _k_nonzero)
        rejected += rej
        for g, fld in zip(gens, fields):
            attempted += 1
            eps = invariance_epsilons(fld, germ, reading)
            if all(eps[n] == 0 for n in which):
                succeeded += 1
            elif len(failures) < 10:
                failures.append({"generator": list(g), "germ": germ.to_dict(), "epsilon": {n: str(eps[n]) for n in which}})
        ctrl = invariance_epsilons(NEGATIVE_CONTROL, germ, reading)
        control += any(ctrl[n] != 0 for n in which)
    return CheckReport(
        "verify-invariants",
        "I1..I4 are invariant under the prolonged symmetry algebra on SDE",
        passed=succeeded == attempted,
        attempted=attempted,
        succeeded=succeeded,
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"invariants": list(which), "germs": samples, "generators": len(gens), "resampled": rejected,
                 "negative_control_nonzero": control, "i2_reading": reading},
    )


def disambiguate_i2(samples: int, seed, max_degree: int = 4) -> dict:
    """Which reading of the ambiguous token makes ``I2`` invariant: ``{candidate: passed}``."""
    return {c: invariance_check(("I2",), samples, seed, max_degree, reading=c).passed for c in I2_CANDIDATES}


# ---------------------------------------------------------------------------
# Tresse frame and the G-matrix


@lru_cache(maxsize=None)
def _partials(reading: str = DEFAULT_I2_READING):
    cat = catalog(reading)
    core = sorted(CORE_VARIABLES | (cat.variables() - CORE_VARIABLES))
    return (
        tuple(core),
        {v: cat.K.diff(v) for v in core},
        {n: {v: cat.numerators[n].diff(v) for v in core} for n in NAMES},
    )


def invariant_gradients(assignment: dict, reading: str = DEFAULT_I2_READING) -> dict:
    """``{name: {u: dI/du}}`` over the second-order jets ``u`` used by the catalog."""
    core, dK, dN = _partials(reading)
    cat = catalog(reading)
    zero = Q(0)
    K = cat.K.evaluate(assignment, zero)
    if _value(K) == 0:
        raise ZeroDenominator("K vanishes at the germ")
    dKv = {v: dK[v].evaluate(assignment, zero) for v in core}
    out = {}
    for n in NAMES:
        w = WEIGHTS[n]
        N = cat.numerators[n].evaluate(assignment, zero)
        Kw1 = K
        for _ in range(w):
            Kw1 = Kw1 * K  # K^(w+1)
        out[n] = {v: (dN[n][v].evaluate(assignment, zero) * K - N * dKv[v] * w) / Kw1 for v in core}
    return out


def _jacobian(values: dict, reading: str) -> list[list]:
    """``J[m][i] = D_m I_i`` from (possibly dual) values of jets of order <= 3."""
    grads = invariant_gradients(values, reading)
    J = []
    for m in range(4):
        row = []
        for n in NAMES:
            acc = None
            for u, gu in grads[n].items():
                term = gu * values[u.shifted(m)]
                acc = term if acc is None else acc + term
            row.append(acc)
        J.append(row)
    return J


def frame_variables(reading: str = DEFAULT_I2_READING) -> tuple:
    """Jet variables the Tresse frame and ``G`` depend on (second-order jets, their shifts, p, q, r)."""
    core = _partials(reading)[0]
    third = sorted({u.shifted(m) for u in core for m in range(4)})
    return tuple(core) + tuple(third) + tuple(Var.jet(f) for f in range(3))


@dataclass
class TresseFrame:
    jacobian: list
    B: list

    def check_duality(self) -> bool:
        return matmul(self.B, self.jacobian) == [[Q(int(i == j)) for j in range(4)] for i in range(4)]


def _frame_from_values(values: dict, reading: str) -> TresseFrame:
    J = _jacobian(values, reading)
    sample = J[0][0]
    one = DualScalar(Q(1), Q(0)) if isinstance(sample, DualScalar) else Q(1)
    return TresseFrame(J, inverse(J, one))


def tresse_frame(j: JetGerm, reading: str = DEFAULT_I2_READING) -> TresseFrame:
    if j.order < 3:
        from .errors import OrderTooLow

        raise OrderTooLow("the Tresse frame needs a germ of order >= 3")
    values = {v: j.value(v) for v in frame_variables(reading)}
    try:
        return _frame_from_values(values, reading)
    except ZeroDenominator as exc:
        raise SingularJacobian("invariants undefined at the germ (K = 0)") from exc


def _metric_at(values: dict) -> list[list]:
    p, q, r = (values[Var.jet(f)] for f in range(3))
    h, z = Q(1) / 2, Q(0)
    return [[p, h, z, q], [h, z, z, z], [z, z, z, h], [q, z, h, r]]


@dataclass
class GMatrix:
    G: list

    def ratios(self) -> dict:
        g44 = self.G[3][3]
        if _value(g44) == 0:
            raise ZeroG44("G44 vanishes at the germ")
        return {name: self.G[i][j] / g44 for name, (i, j) in zip(RATIO_NAMES, RATIO_PAIRS)}

    def is_symmetric(self) -> bool:
        return all(self.G[i][j] == self.G[j][i] for i in range(4) for j in range(4))


def _g_from_values(values: dict, reading: str) -> GMatrix:
    frame = _frame_from_values(values, reading)
    B = frame.B
    return GMatrix(matmul(matmul(B, _metric_at(values)), transpose(B)))


def g_matrix(j: JetGerm, reading: str = DEFAULT_I2_READING) -> GMatrix:
    values = {v: j.value(v) for v in frame_variables(reading)}
    try:
        return _g_from_values(values, reading)
    except ZeroDenominator as exc:
        raise SingularJacobian("invariants undefined at the germ (K = 0)") from exc


def ratio_epsilons(field_, j: JetGerm, reading: str = DEFAULT_I2_READING) -> dict:
    """Directional derivatives of the nine ``G_ij/G44`` along ``X^(3)`` (germ order >= 4)."""
    from .symmetry import prolong_eval

    pert = prolong_eval(field_, 3, j)
    values = {v: DualScalar(j.value(v), pert.get(v, Q(0))) for v in frame_variables(reading)}
    return {k: v.epsilon for k, v in _g_from_values(values, reading).ratios().items()}


def _frame_ok(germ) -> bool:
    G = g_matrix(germ)
    G.ratios()
    return True


def g_ratio_invariance_check(samples: int, seed, max_degree: int = 4) -> CheckReport:
    from .symmetry import NEGATIVE_CONTROL, monomial_generator, monomial_generators

    t0 = time.perf_counter()
    gens = monomial_generators(max_degree)
    fields = [monomial_generator(*g) for g in gens]
    attempted = succeeded = rejected = control = 0
    failures = []
    for i in range(samples):
        germ, rej = sample_nonsingular(4, f"{seed}:g:{i}", _frame_ok)
        rejected += rej
        for g, fld in zip(gens, fields):
            attempted += 1
            eps = ratio_epsilons(fld, germ)
            if all(e == 0 for e in eps.values()):
                succeeded += 1
            elif len(failures) < 10:
                failures.append({"generator": list(g), "germ": germ.to_dict(), "epsilon": {k: str(v) for k, v in eps.items()}})
        control += any(e != 0 for e in ratio_epsilons(NEGATIVE_CONTROL, germ).values())
    return CheckReport(
        "verify-g-ratios",
        "the nine ratios G_ij/G44 are invariant under the prolonged symmetry algebra",
        passed=succeeded == attempted,
        attempted=attempted,
        succeeded=succeeded,
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"germs": samples, "generators": len(gens), "resampled": rejected, "negative_control_nonzero": control},
    )


# ---------------------------------------------------------------------------
# independence


def jacobian_determinant(j: JetGerm) -> mpq:
    """``det(D_m I_i)``; zero when ``K = 0``."""
    values = {v: j.value(v) for v in frame_variables()}
    try:
        return determinant(_jacobian(values, DEFAULT_I2_READING))
    except ZeroDenominator:
        return Q(0)


def differential_rows(j: JetGerm) -> tuple[list[list], list]:
    """Differentials of ``I1..I4`` and the nine ratios, one row per function.

    Columns are base variables plus every jet of order <= 3; the functions do
    not involve base variables or jets outside :func:`frame_variables`, so
    those columns are zero.
    """
    from . import multiindex as mi
    from .algebra import BASE_VARS

    cols = list(BASE_VARS) + [Var.jet(f, s) for f in range(3) for s in mi.multi_indices_upto(3)]
    used = frame_variables()
    base = {v: j.value(v) for v in used}
    rows = [[Q(0)] * len(cols) for _ in range(13)]
    col = {v: i for i, v in enumerate(cols)}
    for v in used:
        values = {u: DualScalar(x, Q(int(u == v))) for u, x in base.items()}
        inv = invariant_values(values)
        ratios = _g_from_values(values, DEFAULT_I2_READING).ratios()
        derivs = [inv[n].epsilon for n in NAMES] + [ratios[n].epsilon for n in RATIO_NAMES]
        for r, d in enumerate(derivs):
            rows[r][col[v]] = d
    return rows, cols


def independence_check(samples: int, seed, det_samples: int = 100) -> CheckReport:
    """``det J != 0`` at >= 95% of germs; joint rank 13 at >= 90% of germs."""
    from .sde import sample_sde_germ

    t0 = time.perf_counter()
    det_nonzero = 0
    for i in range(det_samples):
        det_nonzero += jacobian_determinant(sample_sde_germ(3, f"{seed}:det:{i}")) != 0
    full_rank = four_rank = skipped = 0
    misses = []
    for i in range(samples):
        germ, rej = sample_nonsingular(3, f"{seed}:rank:{i}", _frame_ok)
        skipped += rej
        rows, _ = differential_rows(germ)
        rank = matrix_rank(rows)
        full_rank += rank == 13
        four_rank += matrix_rank(rows[:4]) == 4
        if rank != 13:
            misses.append({"germ": germ.to_dict(), "rank": rank})
    ok = det_nonzero * 100 >= 95 * det_samples and full_rank * 100 >= 90 * samples
    failures = [] if ok else misses[:5]
    return CheckReport(
        "verify-independence",
        "the four second-order invariants and the nine ratios are functionally independent",
        passed=ok,
        attempted=det_samples + samples,
        succeeded=det_nonzero + full_rank,
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"det_nonzero": det_nonzero, "det_samples": det_samples, "rank13": full_rank,
                 "rank_samples": samples, "rank4_of_I": four_rank, "singular_skipped": skipped,
                 "rank_deficient_germs": misses[:5]},
    )


def evaluation_summary(j: JetGerm) -> dict:
    """Everything ``invariants eval`` prints, as exact values (``None`` where undefined)."""
    out: dict = {"K": evaluate_invariant("K", j)}
    for n in NAMES:
        try:
            out[n] = evaluate_invariant(n, j)
        except ZeroDenominator:
            out[n] = None
    out["rank_A"] = singularity_rank(j)
    if j.order >= 3:
        out["det_J"] = jacobian_determinant(j)
        try:
            out["G_ratios"] = g_matrix(j).ratios()
        except (SingularJacobian, ZeroG44, ZeroDenominator):
            out["G_ratios"] = None
    return out
