"""Point symmetries of the system: the five generator families and their checks.

Coordinates on J^0 are ``(t, x, y, z, p, q, r)``.  A generator family takes a
polynomial parameter in ``(t, z)``:

* ``X1(a) = a dt - x a_t dx - x a_z dy + (x a_tt - 2p a_t) dp + (x a_tz - q a_t - p a_z) dq + (x a_zz - 2q a_z) dr``
* ``X2(b) = b dz - y b_t dx - y b_z dy + (y b_tt - 2q b_t) dp + (y b_tz - q b_z - r b_t) dq + (y b_zz - 2r b_z) dr``
* ``X3(c) = c x dx + c y dy + (c p - x c_t) dp + (c q - x c_z/2 - y c_t/2) dq + (c r - y c_z) dr``
* ``X4(d) = d dx - d_t dp - d_z/2 dq``
* ``X5(e) = e dy - e_t/2 dq - e_z dr``

(``dv`` stands for the coordinate vector field along ``v``.)
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from gmpy2 import mpq

from . import multiindex as mi
from .algebra import BASE_VARS, Poly, Q, Var
from .errors import BadParameter, OrderTooLow, SingularJacobian
from .jets import DualScalar, JetGerm, compose_with_germ, dual_evaluate
from .linalg import matrix_rank, nullspace
from .report import CheckReport

T, X, Y, Z = range(4)
FIBER_VARS = tuple(Var.jet(f) for f in range(3))
COORDS = BASE_VARS + FIBER_VARS  # t, x, y, z, p, q, r
COORD_NAMES = ("t", "x", "y", "z", "p", "q", "r")
HALF = mpq(1, 2)
FAMILIES = (1, 2, 3, 4, 5)


def _zero() -> Poly:
    return Poly.const(0)


@dataclass(frozen=True)
class PointField:
    """Vector field on J^0: ``components[i]`` multiplies the i-th coordinate field."""

    components: tuple  # 7 Polys in t, x, y, z, p, q, r

    def __post_init__(self):
        comps = tuple(Poly._coerce(c) for c in self.components)
        if len(comps) != 7:
            raise ValueError("a point field has 7 components")
        for c in comps:
            if any(v not in COORDS for v in c.variables()):
                raise ValueError("point field components may only involve t, x, y, z, p, q, r")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_dict(cls, comps: dict) -> "PointField":
        return cls(tuple(Poly._coerce(comps.get(n, 0)) for n in COORD_NAMES))

    @property
    def horizontal(self) -> tuple:
        return self.components[:4]

    @property
    def vertical(self) -> tuple:
        return self.components[4:]

    def __add__(self, o: "PointField") -> "PointField":
        return PointField(tuple(a + b for a, b in zip(self.components, o.components)))

    def __sub__(self, o: "PointField") -> "PointField":
        return PointField(tuple(a - b for a, b in zip(self.components, o.components)))

    def __neg__(self) -> "PointField":
        return PointField(tuple(-a for a in self.components))

    def scaled(self, c) -> "PointField":
        return PointField(tuple(a * Q(c) for a in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, f: Poly) -> Poly:
        """Derivative of ``f`` along the field."""
        out = _zero()
        for v, c in zip(COORDS, self.components):
            if not c.is_zero():
                d = f.diff(v)
                if not d.is_zero():
                    out = out + c * d
        return out

    def at(self, point) -> tuple:
        assignment = dict(zip(COORDS, point))
        return tuple(c.evaluate(assignment) for c in self.components)

    def __repr__(self) -> str:
        parts = [f"({c!r})d{n}" for c, n in zip(self.components, COORD_NAMES) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


ZERO_FIELD = PointField((0,) * 7)

t_, x_, y_, z_ = (Poly.var(v) for v in BASE_VARS)
p_, q_, r_ = (Poly.var(v) for v in FIBER_VARS)


def _check_param(param) -> Poly:
    param = Poly._coerce(param)
    bad = [v for v in param.variables() if v not in (BASE_VARS[T], BASE_VARS[Z])]
    if bad:
        raise BadParameter(f"generator parameter must depend on t and z only, got {sorted(bad)}")
    return param


def _d(f: Poly, *dirs: int) -> Poly:
    for d in dirs:
        f = f.diff(BASE_VARS[d])
    return f


def make_generator(family: int, param) -> PointField:
    """``X_family(param)`` with ``param`` a polynomial in ``t, z``."""
    f = _check_param(param)
    ft, fz = _d(f, T), _d(f, Z)
    if family == 1:
        comps = (f, -x_ * ft, -x_ * fz, 0,
                 x_ * _d(f, T, T) - 2 * p_ * ft,
                 x_ * _d(f, T, Z) - q_ * ft - p_ * fz,
                 x_ * _d(f, Z, Z) - 2 * q_ * fz)
    elif family == 2:
        comps = (0, -y_ * ft, -y_ * fz, f,
                 y_ * _d(f, T, T) - 2 * q_ * ft,
                 y_ * _d(f, T, Z) - q_ * fz - r_ * ft,
                 y_ * _d(f, Z, Z) - 2 * r_ * fz)
    elif family == 3:
        comps = (0, f * x_, f * y_, 0,
                 f * p_ - x_ * ft,
                 f * q_ - x_ * fz * HALF - y_ * ft * HALF,
                 f * r_ - y_ * fz)
    elif family == 4:
        comps = (0, f, 0, 0, -ft, -fz * HALF, 0)
    elif family == 5:
        comps = (0, 0, f, 0, 0, -ft * HALF, -fz)
    else:
        raise ValueError(f"family must be 1..5, got {family}")
    return PointField(comps)


def monomial(m: int, n: int) -> Poly:
    """``z^m t^n``."""
    return z_ ** m * t_ ** n


def monomial_generator(family: int, m: int, n: int) -> PointField:
    return make_generator(family, monomial(m, n))


def monomial_generators(max_degree: int) -> list[tuple[int, int, int]]:
    """All ``(family, m, n)`` with ``m + n <= max_degree``."""
    return [(fam, m, s - m) for fam in FAMILIES for s in range(max_degree + 1) for m in range(s + 1)]


def lie_bracket(a: PointField, b: PointField) -> PointField:
    return PointField(tuple(a.apply(bc) - b.apply(ac) for ac, bc in zip(a.components, b.components)))


def combination(terms: Iterable[tuple[int, Poly]]) -> PointField:
    out = ZERO_FIELD
    for fam, param in terms:
        out = out + make_generator(fam, param)
    return out


def decompose(field_: PointField) -> dict[int, Poly] | None:
    """Write a field as ``sum_i X_i(param_i)``; ``None`` if it is not of that form."""
    a = field_.components[T]
    b = field_.components[Z]
    try:
        a, b = _check_param(a), _check_param(b)
    except BadParameter:
        return None
    rest = field_ - make_generator(1, a) - make_generator(2, b)
    cx = rest.components[X]
    c = cx.diff(BASE_VARS[X])
    try:
        c = _check_param(c)
        d = _check_param(cx - c * x_)
        e = _check_param(rest.components[Y] - c * y_)
    except BadParameter:
        return None
    params = {1: a, 2: b, 3: c, 4: d, 5: e}
    if not (combination(params.items()) - field_).is_zero():
        return None
    return {k: v for k, v in params.items() if not v.is_zero()}


# ---------------------------------------------------------------------------
# commutator table


def _dt(f):
    return _d(f, T)


def _dz(f):
    return _d(f, Z)


# [X_i(f), X_j(g)] for i <= j as a list of (family, parameter)
TABLE: dict[tuple[int, int], Callable[[Poly, Poly], list]] = {
    (1, 1): lambda f, g: [(1, f * _dt(g) - _dt(f) * g)],
    (1, 2): lambda f, g: [(2, f * _dt(g)), (1, -(_dz(f) * g))],
    (1, 3): lambda f, g: [(3, f * _dt(g))],
    (1, 4): lambda f, g: [(4, _dt(f * g)), (5, _dz(f) * g)],
    (1, 5): lambda f, g: [(5, f * _dt(g))],
    (2, 2): lambda f, g: [(2, f * _dz(g) - _dz(f) * g)],
    (2, 3): lambda f, g: [(3, f * _dz(g))],
    (2, 4): lambda f, g: [(4, f * _dz(g))],
    (2, 5): lambda f, g: [(4, _dt(f) * g), (5, _dz(f * g))],
    (3, 3): lambda f, g: [],
    (3, 4): lambda f, g: [(4, -(f * g))],
    (3, 5): lambda f, g: [(5, -(f * g))],
    (4, 4): lambda f, g: [],
    (4, 5): lambda f, g: [],
    (5, 5): lambda f, g: [],
}


def table_bracket(i: int, f: Poly, j: int, g: Poly) -> PointField:
    """Right-hand side of the table for ``[X_i(f), X_j(g)]`` (lower half by antisymmetry)."""
    if i <= j:
        return combination(TABLE[i, j](f, g))
    return -combination(TABLE[j, i](g, f))


# bi-grading: (i, j) with j = None standing for infinity
GRADE = {1: (0, 0), 2: (0, 0), 3: (0, 1), 4: (1, None), 5: (1, None)}
PIECES = {(0, 0): {1, 2}, (0, 1): {3}, (1, None): {4, 5}}


def _grade_sum(a, b):
    return (a[0] + b[0], None if a[1] is None or b[1] is None else a[1] + b[1])


def verify_commutator_table(max_degree: int = 3) -> CheckReport:
    t0 = time.perf_counter()
    params = [monomial(m, s - m) for s in range(max_degree + 1) for m in range(s + 1)]
    attempted = succeeded = 0
    failures = []
    grading_ok = True
    for i, j in itertools.product(FAMILIES, FAMILIES):
        for f, g in itertools.product(params, params):
            attempted += 1
            got = lie_bracket(make_generator(i, f), make_generator(j, g))
            want = table_bracket(i, f, j, g)
            if (got - want).is_zero():
                succeeded += 1
            else:
                failures.append({"pair": [i, j], "f": repr(f), "g": repr(g), "difference": repr(got - want)})
            parts = decompose(got)
            allowed = PIECES.get(_grade_sum(GRADE[i], GRADE[j]), set())
            if parts is None or not set(parts) <= allowed:
                grading_ok = False
                failures.append({"pair": [i, j], "f": repr(f), "g": repr(g), "grading": sorted(parts or {})})
    return CheckReport(
        "verify-brackets",
        "commutator table and bi-grading of the symmetry algebra",
        passed=not failures and grading_ok,
        attempted=attempted,
        succeeded=succeeded,
        elapsed=time.perf_counter() - t0,
        failures=failures[:10],
        details={"max_degree": max_degree, "pairs": 25, "bigrading_closed": grading_ok},
    )


# ---------------------------------------------------------------------------
# generating functions and prolongation


@dataclass(frozen=True)
class GeneratingTriple:
    phi: tuple  # (phi_p, phi_q, phi_r)
    horizontal: tuple  # (a_t, a_x, a_y, a_z)


def generating_functions(field_: PointField) -> GeneratingTriple:
    """``phi_u = X^u - sum_i a_i u_i`` (contact forms paired with the field)."""
    phis = []
    for f in range(3):
        phi = field_.vertical[f]
        for i in range(4):
            a = field_.horizontal[i]
            if not a.is_zero():
                phi = phi - a * Poly.var(Var.jet(f, mi.unit(i)))
        phis.append(phi)
    return GeneratingTriple(tuple(phis), field_.horizontal)


def prolong_eval(field_: PointField, k: int, j: JetGerm) -> dict[Var, mpq]:
    """Components of ``X^(k)`` at the germ: base variables and all jets of order <= k.

    The coefficient on ``u_s`` is ``D_s phi_u + sum_i a_i u_{s+1_i}``; both
    pieces use jets of order ``k + 1`` (they cancel in the sum), so the germ
    must have order at least ``k + 1``.
    """
    if j.order < k + 1:
        raise OrderTooLow(f"prolongation to order {k} needs a germ of order >= {k + 1}")
    gen = generating_functions(field_)
    point = j.base_point + tuple(j.value(v) for v in FIBER_VARS)
    a = field_.at(point)[:4]
    out: dict[Var, mpq] = {BASE_VARS[i]: a[i] for i in range(4)}
    trunc = j.truncated(k + 1)
    for f in range(3):
        series = compose_with_germ(gen.phi[f], trunc)
        for s in mi.multi_indices_upto(k):
            val = series.derivative_at_zero(s)
            for i in range(4):
                if a[i]:
                    val += a[i] * trunc.value(Var.jet(f, mi.add(s, mi.unit(i))))
            out[Var.jet(f, s)] = val
    return out


def tangency_epsilons(field_: PointField, j: JetGerm) -> tuple:
    """Directional derivatives of ``F1, F2, F3`` along ``X^(2)`` at the germ."""
    from .sde import sde_system

    pert = prolong_eval(field_, 2, j)
    return tuple(dual_evaluate(F, j, pert).epsilon for F in sde_system().equations)


def pad_germ(j: JetGerm, order: int, rng: random.Random) -> JetGerm:
    """Extend a germ by random jets up to ``order`` (keeps all existing jets)."""
    from .sde import random_value

    extra = {
        Var.jet(f, s): random_value(rng)
        for f in range(3)
        for lvl in range(j.order + 1, order + 1)
        for s in mi.multi_indices(lvl)
    }
    return JetGerm(j.base_point, order, {f: dict(c) for f, c in j.coeffs.items()}).with_jets(extra)


NEGATIVE_CONTROL = PointField.from_dict({"t": x_})  # x d/dt, not a symmetry


def verify_tangency(samples: int, seed, max_degree: int = 4) -> CheckReport:
    """``X^(2)(F_i) = 0`` on SDE_2 for every monomial generator, plus the ``x d/dt`` control."""
    from .sde import random_germ, sample_sde_germ

    t0 = time.perf_counter()
    gens = monomial_generators(max_degree)
    fields = [monomial_generator(*g) for g in gens]
    attempted = succeeded = 0
    failures = []
    control_fail = 0
    off_nonzero: dict[str, int] = {}
    for i in range(samples):
        rng = random.Random(f"{seed}:tangency:{i}")
        germ = pad_germ(sample_sde_germ(2, f"{seed}:tangency:{i}"), 3, rng)
        for g, fld in zip(gens, fields):
            attempted += 1
            eps = tangency_epsilons(fld, germ)
            if all(e == 0 for e in eps):
                succeeded += 1
            elif len(failures) < 10:
                failures.append({"generator": list(g), "germ": germ.to_dict(), "epsilon": [str(e) for e in eps]})
        control_fail += any(e != 0 for e in tangency_epsilons(NEGATIVE_CONTROL, germ))
    # off-equation behaviour is recorded, never asserted
    for i in range(min(samples, 10)):
        germ = random_germ(3, random.Random(f"{seed}:tangency-off:{i}"))
        for g, fld in zip(gens, fields):
            if any(e != 0 for e in tangency_epsilons(fld, germ)):
                key = "X{}(z^{} t^{})".format(*g)
                off_nonzero[key] = off_nonzero.get(key, 0) + 1
    control_rate_ok = control_fail * 100 >= 90 * samples
    if not control_rate_ok:
        failures.append({"negative_control": "x d/dt", "nonzero_germs": control_fail, "germs": samples})
    return CheckReport(
        "verify-symmetries",
        "prolonged generators are tangent to the second-order equation",
        passed=succeeded == attempted and control_rate_ok,
        attempted=attempted,
        succeeded=succeeded,
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={
            "max_degree": max_degree,
            "generators": len(gens),
            "germs": samples,
            "negative_control_nonzero": control_fail,
            "off_equation_generators_nonzero": len(off_nonzero),
        },
    )


# ---------------------------------------------------------------------------
# PR shape and its lift


@lru_cache(maxsize=None)
def _metric():
    from .curvature import pr_metric_matrix

    return pr_metric_matrix()


def lie_derivative_metric(field_: PointField, vertical: bool) -> list[list[Poly]]:
    """``L_X g`` for the PR metric, with ``p, q, r`` as coordinates on J^0.

    With ``vertical=False`` only the horizontal part of ``X`` acts and
    ``p, q, r`` are held fixed (the metric coefficients are then constants).
    """
    g = _metric()
    h = field_.horizontal
    L = [[_zero() for _ in range(4)] for _ in range(4)]
    for a, b in itertools.product(range(4), range(4)):
        s = _zero()
        if vertical:
            for u in range(3):
                d = g[a][b].diff(FIBER_VARS[u])
                if not d.is_zero():
                    s = s + d * field_.vertical[u]
        for c in range(4):
            if not g[c][b].is_zero():
                s = s + g[c][b] * h[c].diff(BASE_VARS[a])
            if not g[a][c].is_zero():
                s = s + g[a][c] * h[c].diff(BASE_VARS[b])
        L[a][b] = s
    return L


SLOTS = {"tt": (T, T), "tx": (T, X), "ty": (T, Y), "tz": (T, Z), "xx": (X, X), "xy": (X, Y),
         "xz": (X, Z), "yy": (Y, Y), "zy": (Z, Y), "zz": (Z, Z)}
FORBIDDEN_SLOTS = ("xx", "yy", "xy", "ty", "xz")


def slot_coefficients(L) -> dict[str, Poly]:
    """Coefficients of the quadratic form ``sum L_ab da db`` on ``dadb`` (off-diagonal doubled)."""
    return {name: (L[a][b] if a == b else L[a][b] * 2) for name, (a, b) in SLOTS.items()}


def shape_field(family: int, param) -> PointField:
    """Horizontal part of ``X_family(param)``."""
    full = make_generator(family, param)
    return PointField(full.horizontal + (0, 0, 0))


def shape_conditions(field_: PointField) -> dict[str, Poly]:
    """Residuals that must vanish for the field to preserve the PR shape."""
    c = slot_coefficients(lie_derivative_metric(field_, vertical=False))
    out = {s: c[s] for s in FORBIDDEN_SLOTS}
    out["tx-zy"] = c["tx"] - c["zy"]
    return out


def shape_lie_derivative_check(max_degree: int = 3) -> CheckReport:
    t0 = time.perf_counter()
    attempted = succeeded = 0
    failures = []
    for fam, m, n in monomial_generators(max_degree):
        attempted += 1
        res = shape_conditions(shape_field(fam, monomial(m, n)))
        bad = {k: repr(v) for k, v in res.items() if not v.is_zero()}
        if bad:
            failures.append({"generator": [fam, m, n], "nonzero": bad})
        else:
            succeeded += 1
    return CheckReport(
        "verify-shape",
        "horizontal fields of the five families preserve the PR shape",
        passed=not failures,
        attempted=attempted,
        succeeded=succeeded,
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"max_degree": max_degree, "forbidden_slots": list(FORBIDDEN_SLOTS), "equal_slots": ["tx", "zy"]},
    )


def conformal_factor(field_: PointField) -> tuple[bool, Poly | None]:
    """Whether ``L_X g = lam g`` (cross-multiplied), and ``lam`` read off the ``tx`` slot."""
    L = lie_derivative_metric(field_, vertical=True)
    g = _metric()
    idx = [(a, b) for a in range(4) for b in range(a, 4)]
    for (a, b), (c, d) in itertools.combinations(idx, 2):
        if not (L[a][b] * g[c][d] - L[c][d] * g[a][b]).is_zero():
            return False, None
    return True, L[T][X] * 2  # g_tx = 1/2


def lifted_invariance_check(max_degree: int = 3) -> CheckReport:
    t0 = time.perf_counter()
    attempted = succeeded = 0
    failures = []
    factors = {}
    for fam, m, n in monomial_generators(max_degree):
        attempted += 1
        ok, lam = conformal_factor(monomial_generator(fam, m, n))
        if ok:
            succeeded += 1
            if m + n == 0:
                factors[f"X{fam}(1)"] = repr(lam)
        else:
            failures.append({"generator": [fam, m, n]})
    # a wrong vertical part must break proportionality
    control_ok, _ = conformal_factor(make_generator(4, 1) + PointField.from_dict({"p": 1}))
    if control_ok:
        failures.append({"control": "X4(1) + d/dp", "accepted": True})
    return CheckReport(
        "verify-lift",
        "the lifted generators preserve the conformal class of the PR metric",
        passed=not failures and not control_ok,
        attempted=attempted,
        succeeded=succeeded,
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"max_degree": max_degree, "factors_at_constant_parameters": factors, "control_rejected": not control_ok},
    )


# ---------------------------------------------------------------------------
# the pseudo-group


@dataclass(frozen=True)
class PseudoGroupElement:
    """Functions ``A, B, C, D, E`` of ``(t, z)``; may contain an auxiliary ``eps``."""

    A: Poly
    B: Poly
    C: Poly
    D: Poly
    E: Poly

    @classmethod
    def identity(cls) -> "PseudoGroupElement":
        return cls(t_, z_, Poly.const(1), _zero(), _zero())


def _eval(f: Poly, env: dict):
    return f.evaluate(env, zero=env.get("__zero__", Q(0)))


def pseudo_group_apply(el: PseudoGroupElement, point, extra: dict | None = None) -> tuple:
    """Image of ``(t, x, y, z, p, q, r)``.  ``extra`` assigns auxiliary variables (e.g. ``eps``)."""
    t, x, y, z, p, q, r = point
    env = dict(zip(COORDS, point))
    if extra:
        env.update(extra)
    A, B, C, D, E = el.A, el.B, el.C, el.D, el.E

    def ev(f, *dirs):
        return f.evaluate(env) if not dirs else _d(f, *dirs).evaluate(env)

    At, Bz = ev(A, T), ev(B, Z)
    for name, v in (("A_t", At), ("B_z", Bz)):
        real = v.value if isinstance(v, DualScalar) else v
        if real == 0:
            raise SingularJacobian(f"{name} vanishes at the point")
    Cv = ev(C)
    half = HALF
    T_ = ev(A)
    Z_ = ev(B)
    X_ = x * Cv / At - y * ev(B, T) + ev(D)
    Y_ = y * Cv / Bz - x * ev(A, Z) + ev(E)
    P_ = p * Cv / (At * At) - ev(D, T) - x * ev(C, T) + y * ev(B, T, T) - 2 * q * ev(B, T) + x * ev(A, T, T)
    Q_ = (
        q * Cv / (Bz * At)
        - (ev(E, T) + ev(D, Z) + x * ev(C, Z) + y * ev(C, T)) * half
        + y * ev(B, T, Z)
        - r * ev(B, T)
        + x * ev(A, T, Z)
        - p * ev(A, Z)
    )
    R_ = r * Cv / (Bz * Bz) - ev(E, Z) - y * ev(C, Z) + y * ev(B, Z, Z) + x * ev(A, Z, Z) - 2 * q * ev(A, Z)
    return (T_, X_, Y_, Z_, P_, Q_, R_)


EPS = Var.aux("eps")


def infinitesimal_element(params: tuple) -> PseudoGroupElement:
    """``(t + eps a, z + eps b, 1 + eps c, eps d, eps e)``."""
    eps = Poly.var(EPS)
    a, b, c, d, e = (Poly._coerce(v) for v in params)
    return PseudoGroupElement(t_ + eps * a, z_ + eps * b, 1 + eps * c, eps * d, eps * e)


def infinitesimal_epsilon(params: tuple, point) -> tuple:
    """First-order part in ``eps`` of the group action at ``point``."""
    el = infinitesimal_element(params)
    dual_point = tuple(DualScalar(Q(v), Q(0)) for v in point)
    image = pseudo_group_apply(el, dual_point, {EPS: DualScalar(Q(0), Q(1))})
    return tuple(v.epsilon if isinstance(v, DualScalar) else Q(0) for v in image)


def random_tz_poly(rng: random.Random, degree: int = 2) -> Poly:
    from .sde import random_value

    return sum((random_value(rng) * monomial(m, s - m) for s in range(degree + 1) for m in range(s + 1)), _zero())


def infinitesimal_consistency(n_params: int, n_points: int, seed) -> CheckReport:
    from .sde import random_value

    t0 = time.perf_counter()
    rng = random.Random(f"{seed}:pseudogroup")
    attempted = succeeded = 0
    failures = []
    for _ in range(n_params):
        params = tuple(random_tz_poly(rng) for _ in range(5))
        expected_field = combination(zip(FAMILIES, params))
        for _ in range(n_points):
            point = tuple(Q(random_value(rng)) for _ in range(7))
            attempted += 1
            got = infinitesimal_epsilon(params, point)
            want = expected_field.at(point)
            if tuple(got) == tuple(want):
                succeeded += 1
            elif len(failures) < 10:
                failures.append({"params": [repr(p) for p in params], "point": [str(v) for v in point],
                                 "got": [str(v) for v in got], "want": [str(v) for v in want]})
    identity_ok = True
    for _ in range(n_points):
        point = tuple(Q(random_value(rng)) for _ in range(7))
        image = tuple(pseudo_group_apply(PseudoGroupElement.identity(), point))
        if image != point:
            identity_ok = False
            failures.append({"identity_moves": [str(v) for v in point], "image": [str(v) for v in image]})
    return CheckReport(
        "verify-pseudogroup",
        "first-order expansion of the pseudo-group is the symmetry algebra; identity acts trivially",
        passed=not failures and identity_ok,
        attempted=attempted,
        succeeded=succeeded,
        seeds=[str(seed)],
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={"parameter_tuples": n_params, "points": n_points, "identity_fixes_points": identity_ok},
    )


# ---------------------------------------------------------------------------
# invariant constant 2-tensors under the linearised stabiliser


def _linear_field_matrix(entries: dict) -> list[list[mpq]]:
    m = [[Q(0)] * 4 for _ in range(4)]
    for (i, j), v in entries.items():
        m[i][j] = Q(v)
    return m


# Y = sum_ij L[i][j] x_j d_i
Y_MATRICES = {
    "Y1": _linear_field_matrix({(T, T): 1, (X, X): -1}),  # t dt - x dx
    "Y2": _linear_field_matrix({(T, Z): 1, (Y, X): -1}),  # z dt - x dy
    "Y3": _linear_field_matrix({(Z, T): 1, (X, Y): -1}),  # t dz - y dx
    "Y4": _linear_field_matrix({(Z, Z): 1, (Y, Y): -1}),  # z dz - y dy
    "Y5": _linear_field_matrix({(X, X): 1, (Y, Y): 1}),  # x dx + y dy
    "Y6": _linear_field_matrix({(X, Z): 1, (Y, T): -1}),  # z dx - t dy
}


def _madd(a, b, s=1):
    return [[x + s * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(4)), Q(0)) for j in range(4)] for i in range(4)]


def _tr(a):
    return [list(r) for r in zip(*a)]


def tensor_lie_derivative(L, Tm):
    """``L_Y T = L^T T + T L`` for a constant covariant 2-tensor and linear field ``Y``."""
    return _madd(_mmul(_tr(L), Tm), _mmul(Tm, L))


def _tensor_basis(kind: str) -> list[list[list[mpq]]]:
    out = []
    for a in range(4):
        for b in range(a, 4):
            if kind == "skew" and a == b:
                continue
            m = [[Q(0)] * 4 for _ in range(4)]
            m[a][b] = Q(1)
            m[b][a] = Q(1) if kind == "sym" else Q(-1)
            if kind == "sym" and a == b:
                m[a][a] = Q(1)
            out.append(m)
    return out


def _flatten(m):
    return [v for row in m for v in row]


def _combine(basis, coeffs):
    out = [[Q(0)] * 4 for _ in range(4)]
    for c, m in zip(coeffs, basis):
        if c:
            out = _madd(out, m, c)
    return out


def invariant_two_tensors() -> dict[str, list]:
    """Bases of constant symmetric / skew 2-tensors killed by ``sl2 + <Y6>`` and
    rescaled by ``Y1 + Y4`` and ``Y5``."""
    ym = Y_MATRICES
    killers = [_madd(ym["Y1"], ym["Y4"], -1), ym["Y2"], ym["Y3"], ym["Y6"]]
    scalers = [_madd(ym["Y1"], ym["Y4"]), ym["Y5"]]
    result = {}
    for kind in ("sym", "skew"):
        basis = _tensor_basis(kind)
        rows = []
        for L in killers:
            images = [_flatten(tensor_lie_derivative(L, b)) for b in basis]
            rows += [list(col) for col in zip(*images)]
        kernel = [_combine(basis, v) for v in nullspace(rows, len(basis))]
        # keep the common eigenvectors of the scaling fields inside the kernel
        kept = []
        for Tm in kernel:
            if all(matrix_rank([_flatten(Tm), _flatten(tensor_lie_derivative(L, Tm))]) <= 1 for L in scalers):
                kept.append(Tm)
        if len(kept) != len(kernel):
            raise ArithmeticError("kernel basis is not an eigenbasis of the scaling fields")
        result[kind] = kept
    return result


def _in_span(m, mats) -> list | None:
    from .errors import Inconsistent
    from .linalg import linear_solve

    A = [list(col) for col in zip(*[_flatten(x) for x in mats])]
    try:
        return list(linear_solve(A, _flatten(m)).solution)
    except Inconsistent:
        return None


def stabilizer_closure() -> dict:
    """Matrix commutators of ``Y1..Y6``: coordinates in the span (``None`` if outside)."""
    names = list(Y_MATRICES)
    mats = [Y_MATRICES[n] for n in names]
    out = {}
    for i, j in itertools.combinations(range(6), 2):
        comm = _madd(_mmul(mats[i], mats[j]), _mmul(mats[j], mats[i]), -1)
        out[f"[{names[i]},{names[j]}]"] = _in_span(comm, mats)
    return out


def tensor_to_string(m, kind: str) -> str:
    names = "txyz"
    parts = []
    for a in range(4):
        for b in range(a if kind == "sym" else a + 1, 4):
            c = m[a][b] * (2 if kind == "sym" and a != b else 1)
            if c:
                sep = "" if kind == "sym" else "^"
                parts.append(f"{c}*d{names[a]}{sep}d{names[b]}")
    return " + ".join(parts) if parts else "0"


def verify_stabilizer_tensors() -> CheckReport:
    t0 = time.perf_counter()
    inv = invariant_two_tensors()
    g0 = [[Q(0)] * 4 for _ in range(4)]
    for a, b in ((T, X), (Z, Y)):
        g0[a][b] = g0[b][a] = HALF  # dtdx + dzdy
    dzdt = [[Q(0)] * 4 for _ in range(4)]
    dzdt[Z][T], dzdt[T][Z] = Q(1), Q(-1)
    sym_ok = len(inv["sym"]) == 1 and matrix_rank([_flatten(inv["sym"][0]), _flatten(g0)]) == 1
    skew_ok = len(inv["skew"]) == 1 and matrix_rank([_flatten(inv["skew"][0]), _flatten(dzdt)]) == 1
    closure = stabilizer_closure()
    closed = all(v is not None for v in closure.values())
    failures = []
    if not sym_ok:
        failures.append({"symmetric": [tensor_to_string(m, "sym") for m in inv["sym"]], "expected": "dtdx + dzdy"})
    if not skew_ok:
        failures.append({"skew": [tensor_to_string(m, "skew") for m in inv["skew"]], "expected": "dz^dt"})
    if not closed:
        failures.append({"not_closed": sorted(k for k, v in closure.items() if v is None)})
    return CheckReport(
        "verify-stabilizer-tensors",
        "invariant symmetric 2-tensor is the PR conformal class, invariant skew one is dz^dt",
        passed=sym_ok and skew_ok and closed,
        attempted=3,
        succeeded=int(sym_ok) + int(skew_ok) + int(closed),
        elapsed=time.perf_counter() - t0,
        failures=failures,
        details={
            "symmetric": [tensor_to_string(m, "sym") for m in inv["sym"]],
            "skew": [tensor_to_string(m, "skew") for m in inv["skew"]],
            "commutators": {k: None if v is None else [str(c) for c in v] for k, v in closure.items()},
        },
    )
