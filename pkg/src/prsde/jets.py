"""Jet calculus: total derivatives, truncated Taylor germs and exact evaluation.

A :class:`JetGerm` stores Taylor coefficients of ``(p, q, r)`` around a base
point; the jet coordinate ``u_s`` equals ``s! * coefficient``.  Expressions on
jet space are evaluated at a germ either directly (jet coordinates as numbers)
or by composition with the germ, which yields a truncated Taylor polynomial in
the base offsets whose derivatives at 0 are the values of the total
derivatives of the expression.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from gmpy2 import mpq

from . import multiindex as mi
from .algebra import BASE_VARS, FIBERS, ONE, ZERO, Poly, Q, RatExpr, Var, format_q
from .errors import OrderTooLow, ZeroDenominator

# ---------------------------------------------------------------------------
# dual numbers


class DualScalar:
    """``value + epsilon * eps`` with ``eps**2 = 0``.

    Components may themselves be dual numbers, which gives mixed second
    derivatives by nesting.
    """

    __slots__ = ("value", "epsilon")

    def __init__(self, value, epsilon=ZERO):
        self.value = value
        self.epsilon = epsilon

    def __add__(self, o):
        if isinstance(o, DualScalar):
            return DualScalar(self.value + o.value, self.epsilon + o.epsilon)
        return DualScalar(self.value + o, self.epsilon)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.value, -self.epsilon)

    def __sub__(self, o):
        if isinstance(o, DualScalar):
            return DualScalar(self.value - o.value, self.epsilon - o.epsilon)
        return DualScalar(self.value - o, self.epsilon)

    def __rsub__(self, o):
        return DualScalar(o - self.value, -self.epsilon)

    def __mul__(self, o):
        if isinstance(o, DualScalar):
            return DualScalar(self.value * o.value, self.value * o.epsilon + self.epsilon * o.value)
        return DualScalar(self.value * o, self.epsilon * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, DualScalar):
            inv = 1 / o.value if not isinstance(o.value, DualScalar) else o.value.reciprocal()
            return DualScalar(self.value * inv, (self.epsilon * o.value - self.value * o.epsilon) * inv * inv)
        return DualScalar(self.value / o, self.epsilon / o)

    def __rtruediv__(self, o):
        return DualScalar(o, ZERO) / self

    def reciprocal(self):
        return DualScalar(ONE, ZERO) / self

    def __eq__(self, o):
        if isinstance(o, DualScalar):
            return self.value == o.value and self.epsilon == o.epsilon
        return self.value == o and not self.epsilon

    def __hash__(self):
        return hash((self.value, self.epsilon))

    def __repr__(self):
        return f"DualScalar({self.value}, {self.epsilon})"


# ---------------------------------------------------------------------------
# truncated Taylor polynomials in the base offsets (s_t, s_x, s_y, s_z)


class Series:
    """Polynomial in four offsets, truncated above total degree ``cap``."""

    __slots__ = ("coeffs", "cap")

    def __init__(self, coeffs: Mapping[tuple, object] | None, cap: int):
        self.cap = cap
        self.coeffs = {s: c for s, c in (coeffs or {}).items() if c and mi.order(s) <= cap}

    @classmethod
    def constant(cls, c, cap: int) -> "Series":
        return cls({mi.ZERO_INDEX: Q(c)}, cap)

    def _binary_cap(self, o) -> int:
        return min(self.cap, o.cap)

    def __add__(self, o):
        if not isinstance(o, Series):
            o = Series.constant(o, self.cap)
        cap = self._binary_cap(o)
        out = {s: c for s, c in self.coeffs.items() if mi.order(s) <= cap}
        for s, c in o.coeffs.items():
            if mi.order(s) <= cap:
                v = out.get(s, ZERO) + c
                if v:
                    out[s] = v
                else:
                    out.pop(s, None)
        res = Series.__new__(Series)
        res.coeffs, res.cap = out, cap
        return res

    __radd__ = __add__

    def __neg__(self):
        res = Series.__new__(Series)
        res.coeffs, res.cap = {s: -c for s, c in self.coeffs.items()}, self.cap
        return res

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Series):
            c = Q(o)
            res = Series.__new__(Series)
            res.cap = self.cap
            res.coeffs = {s: v * c for s, v in self.coeffs.items()} if c else {}
            return res
        cap = self._binary_cap(o)
        a = [(s, mi.order(s), c) for s, c in self.coeffs.items() if mi.order(s) <= cap]
        b = [(s, mi.order(s), c) for s, c in o.coeffs.items() if mi.order(s) <= cap]
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for sa, oa, ca in a:
            room = cap - oa
            for sb, ob, cb in b:
                if ob <= room:
                    k = (sa[0] + sb[0], sa[1] + sb[1], sa[2] + sb[2], sa[3] + sb[3])
                    out[k] = out.get(k, ZERO) + ca * cb
        res = Series.__new__(Series)
        res.cap = cap
        res.coeffs = {s: c for s, c in out.items() if c}
        return res

    __rmul__ = __mul__

    def derivative(self, direction: int) -> "Series":
        """Partial derivative in one offset; the cap drops by one."""
        out = {}
        for s, c in self.coeffs.items():
            e = s[direction]
            if e:
                t = list(s)
                t[direction] -= 1
                out[tuple(t)] = c * e
        return Series(out, self.cap - 1)

    def partial(self, sigma: tuple) -> "Series":
        res = self
        for d, e in enumerate(sigma):
            for _ in range(e):
                res = res.derivative(d)
        return res

    def coefficient(self, sigma: tuple) -> mpq:
        return self.coeffs.get(tuple(sigma), ZERO)

    def derivative_at_zero(self, sigma: tuple) -> mpq:
        """``d^s T(0) = s! * coefficient``."""
        if mi.order(sigma) > self.cap:
            raise OrderTooLow(f"multi-index {sigma} beyond series degree {self.cap}")
        return self.coeffs.get(tuple(sigma), ZERO) * mi.index_factorial(sigma)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, o):
        if isinstance(o, Series):
            return self.cap == o.cap and self.coeffs == o.coeffs
        return NotImplemented

    def __repr__(self):
        return f"Series(cap={self.cap}, {self.coeffs})"


# ---------------------------------------------------------------------------
# germs


@dataclass
class JetGerm:
    """Truncated Taylor expansion of a section ``(p, q, r)`` at ``base_point``."""

    base_point: tuple
    order: int
    coeffs: dict = field(default_factory=dict)  # fiber index -> {multi-index: mpq}

    def __post_init__(self):
        self.base_point = tuple(Q(v) for v in self.base_point)
        for f in range(3):
            self.coeffs.setdefault(f, {})
        for f in range(3):
            self.coeffs[f] = {
                tuple(s): Q(c) for s, c in self.coeffs[f].items() if Q(c) and mi.order(s) <= self.order
            }

    @classmethod
    def from_jets(cls, base_point, order: int, jets: Mapping[Var | str, object]) -> "JetGerm":
        """Build a germ from jet-coordinate values (not Taylor coefficients)."""
        coeffs: dict = {0: {}, 1: {}, 2: {}}
        for v, val in jets.items():
            if isinstance(v, str):
                v = Var.parse(v)
            coeffs[v.fiber][v.sigma] = Q(val) / mi.index_factorial(v.sigma)
        return cls(base_point, order, coeffs)

    def value(self, v: Var) -> mpq:
        """Exact value of a base or jet coordinate at the germ."""
        if v.is_base:
            return self.base_point[v.direction]
        if v.is_jet:
            if v.order > self.order:
                raise OrderTooLow(f"{v} needs a germ of order >= {v.order}")
            s = v.sigma
            return self.coeffs[v.fiber].get(s, ZERO) * mi.index_factorial(s)
        raise KeyError(v)

    def assignment(self, max_order: int | None = None) -> dict:
        n = self.order if max_order is None else min(max_order, self.order)
        out = {v: self.base_point[v.direction] for v in BASE_VARS}
        for f in range(3):
            for s in mi.multi_indices_upto(n):
                out[Var.jet(f, s)] = self.coeffs[f].get(s, ZERO) * mi.index_factorial(s)
        return out

    def series(self, fiber: int, cap: int | None = None) -> Series:
        return Series(self.coeffs[fiber], self.order if cap is None else cap)

    def truncated(self, order: int) -> "JetGerm":
        return JetGerm(self.base_point, order, {f: dict(c) for f, c in self.coeffs.items()})

    def with_jets(self, jets: Mapping[Var, object]) -> "JetGerm":
        """Copy with some jet coordinates replaced."""
        coeffs = {f: dict(c) for f, c in self.coeffs.items()}
        for v, val in jets.items():
            coeffs[v.fiber][v.sigma] = Q(val) / mi.index_factorial(v.sigma)
        return JetGerm(self.base_point, self.order, coeffs)

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "base_point": [format_q(v) for v in self.base_point],
            "order": self.order,
            "coefficients": {
                FIBERS[f]: {mi.to_key(s): format_q(c) for s, c in sorted(self.coeffs[f].items(), key=lambda sc: (mi.order(sc[0]), [-e for e in sc[0]]))}
                for f in range(3)
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "JetGerm":
        bp = data["base_point"]
        if len(bp) != 4:
            raise ValueError("base_point must have 4 entries")
        coeffs = {
            FIBERS.index(name): {mi.from_key(k): Q(v) for k, v in table.items()}
            for name, table in data.get("coefficients", {}).items()
        }
        return cls(tuple(Q(v) for v in bp), int(data["order"]), coeffs)

    @classmethod
    def from_json(cls, text: str) -> "JetGerm":
        return cls.from_dict(json.loads(text))


def flat_germ(order: int, base_point=(0, 0, 0, 0)) -> JetGerm:
    return JetGerm(base_point, order, {})


# ---------------------------------------------------------------------------
# total derivatives


def total_derivative(e: Poly, direction: int | str) -> Poly:
    """``D_d e = de/dx_d + sum_u de/du_s * u_{s + 1_d}``."""
    d = "txyz".index(direction) if isinstance(direction, str) else direction
    out = e.diff(BASE_VARS[d])
    for v in sorted(e.variables()):
        if v.is_aux:
            raise ValueError(f"total derivative of an expression with auxiliary variable {v}")
        if v.is_jet:
            out = out + e.diff(v) * Poly.var(v.shifted(d))
    return out


def iterated_total_derivative(e: Poly, sigma: tuple) -> Poly:
    out = e
    for d, k in enumerate(sigma):
        for _ in range(k):
            out = total_derivative(out, d)
    return out


def expression_order(e: Poly | RatExpr) -> int:
    """Largest jet order occurring in ``e`` (base and fiber variables count 0)."""
    return max((v.order for v in e.variables() if not v.is_aux), default=0)


def _germ_series_assignment(e_vars, j: JetGerm, cap: int) -> dict:
    out = {}
    fiber_series = {}
    for v in e_vars:
        if v.is_base:
            d = v.direction
            out[v] = Series({mi.ZERO_INDEX: j.base_point[d], mi.unit(d): ONE}, cap)
        elif v.is_jet:
            f = v.fiber
            if f not in fiber_series:
                fiber_series[f] = j.series(f)
            s = fiber_series[f].partial(v.sigma)
            out[v] = Series(s.coeffs, cap)
        else:
            raise ValueError(f"cannot compose auxiliary variable {v} with a germ")
    return out


def compose_with_germ(e: Poly, j: JetGerm) -> Series:
    """Taylor polynomial of ``e`` along the germ, degree ``j.order - ord(e)``.

    Its derivative ``d^t`` at 0 equals ``D_t e`` evaluated at the germ.
    """
    k = expression_order(e)
    if j.order < k:
        raise OrderTooLow(f"germ of order {j.order} cannot evaluate an order-{k} expression")
    cap = j.order - k
    assignment = _germ_series_assignment(e.variables(), j, cap)
    return e.evaluate(assignment, zero=Series({}, cap)) + Series({}, cap)


def evaluate_at_germ(e: Poly | RatExpr, j: JetGerm):
    k = expression_order(e)
    if j.order < k:
        raise OrderTooLow(f"germ of order {j.order} cannot evaluate an order-{k} expression")
    assignment = {v: j.value(v) for v in e.variables()}
    return e.evaluate(assignment)


def dual_evaluate(e: Poly | RatExpr, j: JetGerm, perturbation: Mapping[Var, object]) -> DualScalar:
    """Evaluate ``e`` at ``v + eps * perturbation[v]``; the epsilon part is the directional derivative."""
    assignment = {}
    for v in e.variables():
        assignment[v] = DualScalar(j.value(v), Q(perturbation.get(v, ZERO)))
    zero = DualScalar(ZERO, ZERO)
    if isinstance(e, RatExpr):
        num = e.num.evaluate(assignment, zero)
        den = e.den.evaluate(assignment, zero)
        if not den.value:
            raise ZeroDenominator("denominator vanishes at the germ")
        out = num / den
    else:
        out = e.evaluate(assignment, zero)
    if not isinstance(out, DualScalar):
        out = DualScalar(Q(out), ZERO)
    return out
