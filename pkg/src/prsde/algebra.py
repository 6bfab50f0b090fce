"""Exact rational scalars, jet variables, sparse polynomials and rational functions.

Scalars are ``gmpy2.mpq``.  Variables are :class:`Var` tuples whose tuple value
is also their sort key, so the variable order is

    base (t < x < y < z)  <  fiber-jets (by fiber p < q < r, then graded lex
    on the multi-index)  <  auxiliary (by name).

A monomial is a sorted tuple of ``(Var, exponent)`` pairs; a :class:`Poly` maps
monomials to nonzero ``mpq`` coefficients.  Values are never mutated after
construction.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Iterable, Mapping

import gmpy2
from gmpy2 import mpq, mpz

from .errors import MissingVariable, ZeroDenominator

DIRECTIONS = ("t", "x", "y", "z")
FIBERS = ("p", "q", "r")

ZERO = mpq(0)
ONE = mpq(1)


def Q(value) -> mpq:
    """Coerce ints, strings ("a/b"), Fractions and mpq to ``mpq``."""
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def format_q(value) -> str:
    """Serialise an exact rational as ``"num/den"`` (denominator always shown)."""
    v = Q(value)
    return f"{v.numerator}/{v.denominator}"


parse_q = Q


# ---------------------------------------------------------------------------
# variables


def _sigma_letters(sigma: tuple[int, ...]) -> str:
    return "".join(d * e for d, e in zip(DIRECTIONS, sigma))


class Var(tuple):
    """A coordinate on jet space.

    Layouts (the tuple doubles as the sort key):

    * base ``(0, d)`` with ``d`` the index of t, x, y, z
    * jet ``(1, f, |s|, -s_t, -s_x, -s_y, -s_z)`` for fiber ``f`` and multi-index ``s``
    * auxiliary ``(2, name)``
    """

    __slots__ = ()

    @classmethod
    def base(cls, direction: str | int) -> "Var":
        d = DIRECTIONS.index(direction) if isinstance(direction, str) else direction
        return tuple.__new__(cls, (0, d))

    @classmethod
    def jet(cls, fiber: str | int, sigma: Iterable[int] = (0, 0, 0, 0)) -> "Var":
        f = FIBERS.index(fiber) if isinstance(fiber, str) else fiber
        s = tuple(sigma)
        if len(s) != 4 or any(e < 0 for e in s):
            raise ValueError(f"bad multi-index {s!r}")
        return tuple.__new__(cls, (1, f, sum(s), -s[0], -s[1], -s[2], -s[3]))

    @classmethod
    def aux(cls, name: str) -> "Var":
        return tuple.__new__(cls, (2, name))

    @classmethod
    def parse(cls, name: str) -> "Var":
        """Parse ``t``, ``p``, ``q_xy``, ``r_tzz`` style names; anything else is auxiliary."""
        if name in DIRECTIONS:
            return cls.base(name)
        head, _, tail = name.partition("_")
        if head in FIBERS and all(ch in DIRECTIONS for ch in tail):
            return cls.jet(head, tuple(tail.count(d) for d in DIRECTIONS))
        return cls.aux(name)

    @property
    def is_base(self) -> bool:
        return self[0] == 0

    @property
    def is_jet(self) -> bool:
        return self[0] == 1

    @property
    def is_aux(self) -> bool:
        return self[0] == 2

    @property
    def direction(self) -> int:
        return self[1]

    @property
    def fiber(self) -> int:
        return self[1]

    @property
    def sigma(self) -> tuple[int, int, int, int]:
        return (-self[3], -self[4], -self[5], -self[6])

    @property
    def order(self) -> int:
        """Jet order; base variables count as order 0."""
        return self[2] if self[0] == 1 else 0

    @property
    def name(self) -> str:
        if self[0] == 0:
            return DIRECTIONS[self[1]]
        if self[0] == 2:
            return self[1]
        letters = _sigma_letters(self.sigma)
        return FIBERS[self[1]] + ("_" + letters if letters else "")

    def shifted(self, direction: int) -> "Var":
        """The jet variable ``u_{s + 1_direction}``."""
        s = list(self.sigma)
        s[direction] += 1
        return Var.jet(self[1], s)

    def __repr__(self) -> str:
        return self.name

    __str__ = __repr__


def jet_variables(max_order: int, min_order: int = 0) -> list[Var]:
    """All fiber-jet variables with ``min_order <= |s| <= max_order`` in canonical order."""
    from .multiindex import multi_indices_upto

    out = [
        Var.jet(f, s)
        for f in range(3)
        for s in multi_indices_upto(max_order)
        if sum(s) >= min_order
    ]
    return sorted(out)


BASE_VARS = tuple(Var.base(d) for d in range(4))


# ---------------------------------------------------------------------------
# monomials

Monomial = tuple  # tuple[tuple[Var, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """Graded lexicographic comparison (positive when ``a`` is the larger monomial)."""
    da = sum(e for _, e in a)
    db = sum(e for _, e in b)
    if da != db:
        return 1 if da > db else -1
    for (va, ea), (vb, eb) in zip(a, b):
        if va != vb:
            # the monomial containing the earlier variable is lex-larger
            return 1 if va < vb else -1
        if ea != eb:
            return 1 if ea > eb else -1
    return (len(a) > len(b)) - (len(a) < len(b))


mono_key = functools.cmp_to_key(_mono_cmp)


def _mono_str(m: Monomial) -> str:
    return "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in m)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = Q(c)
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, terms: dict) -> "Poly":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "Poly":
        c = Q(c)
        return cls._trusted({(): c} if c else {})

    @classmethod
    def var(cls, v: Var | str) -> "Poly":
        if isinstance(v, str):
            v = Var.parse(v)
        return cls._trusted({((v, 1),): ONE})

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (Var,)):
            return Poly.var(other)
        return Poly.const(other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._trusted(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._trusted({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, Var):
                other = Poly.var(other)
            else:
                c = Q(other)
                if not c:
                    return Poly._trusted({})
                return Poly._trusted({m: v * c for m, v in self.terms.items()})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, ZERO) + ca * cb
        return Poly._trusted({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "Poly":
        c = Q(other)
        if not c:
            raise ZeroDivisionError("polynomial divided by zero")
        return self * (1 / c)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self) -> mpq:
        return self.terms.get((), ZERO)

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def degree_in(self, v: Var) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=-1)

    def jet_order(self) -> int:
        """Largest jet order occurring (0 if only base/fiber variables, -1 for constants)."""
        return max((v.order for v in self.variables() if not v.is_aux), default=-1)

    def sorted_terms(self) -> list[tuple[Monomial, mpq]]:
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, mpq]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda mc: mono_key(mc[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(_mono_str(m))
            elif c == -1:
                parts.append("-" + _mono_str(m))
            else:
                parts.append(f"{c}*{_mono_str(m)}")
        return " + ".join(parts).replace("+ -", "- ")

    __str__ = __repr__

    # -- calculus and substitution ---------------------------------------

    def diff(self, v: Var | str) -> "Poly":
        """Formal partial derivative, every variable independent."""
        if isinstance(v, str):
            v = Var.parse(v)
        out: dict = {}
        for m, c in self.terms.items():
            for i, (w, e) in enumerate(m):
                if w == v:
                    nm = m[:i] + ((w, e - 1),) + m[i + 1 :] if e > 1 else m[:i] + m[i + 1 :]
                    out[nm] = out.get(nm, ZERO) + c * e
                    break
        return Poly._trusted({m: c for m, c in out.items() if c})

    def subs(self, mapping: Mapping[Var, object]) -> "Poly":
        """Substitute polynomials (or scalars) for variables."""
        if not mapping:
            return self
        mapping = {k: self._coerce(v) for k, v in mapping.items()}
        powers: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = mapping[v] ** e
            return powers[key]

        result = Poly._trusted({})
        for m, c in self.terms.items():
            keep = []
            factor = None
            for v, e in m:
                if v in mapping:
                    p = power(v, e)
                    factor = p if factor is None else factor * p
                else:
                    keep.append((v, e))
            term = Poly._trusted({tuple(keep): c})
            result = result + (term if factor is None else term * factor)
        return result

    def evaluate(self, assignment: Mapping[Var, object], zero=ZERO):
        """Evaluate with values from ``assignment``.

        Values may be any ring elements supporting ``+`` and ``*`` with ``mpq``
        on the right (``mpq``, :class:`~prsde.jets.DualScalar`, series, ...).
        """
        cache: dict = {}
        total = zero
        for m, c in self.terms.items():
            acc = None
            for v, e in m:
                key = (v, e)
                val = cache.get(key)
                if val is None:
                    try:
                        base = assignment[v]
                    except KeyError:
                        raise MissingVariable(v) from None
                    val = base
                    for _ in range(e - 1):
                        val = val * base
                    cache[key] = val
                acc = val if acc is None else acc * val
            total = total + (c if acc is None else acc * c)
        return total

    def linear_part(self, variables: Iterable[Var]) -> tuple[dict, "Poly"]:
        """Split an expression affine in ``variables`` into ``({v: coeff}, remainder)``."""
        vs = set(variables)
        coeffs: dict = {}
        rest: dict = {}
        for m, c in self.terms.items():
            hits = [(i, v, e) for i, (v, e) in enumerate(m) if v in vs]
            if not hits:
                rest[m] = c
                continue
            if len(hits) > 1 or hits[0][2] > 1:
                raise ValueError("expression is not affine in the given variables")
            i, v, _ = hits[0]
            nm = m[:i] + m[i + 1 :]
            bucket = coeffs.setdefault(v, {})
            bucket[nm] = bucket.get(nm, ZERO) + c
        return ({v: Poly(t) for v, t in coeffs.items()}, Poly._trusted(rest))


def poly_arith(lhs: Poly, rhs: Poly, op: str) -> Poly:
    """``op`` in {"add", "sub", "mul"}."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(e: Poly, v: Var | str) -> Poly:
    return e.diff(v)


def var(name: str) -> Poly:
    """Shorthand: ``var("q_xy")``."""
    return Poly.var(Var.parse(name))


# ---------------------------------------------------------------------------
# exact division helpers used for rational-function normalisation


def _content(p: Poly) -> mpq:
    """Positive rational content: gcd of numerators over lcm of denominators."""
    num = mpz(0)
    den = mpz(1)
    for c in p.terms.values():
        num = gmpy2.gcd(num, c.numerator)
        den = gmpy2.lcm(den, c.denominator)
    return mpq(num, den) if num else ONE


def _monomial_gcd(p: Poly) -> Monomial:
    it = iter(p.terms)
    common = dict(next(it))
    for m in it:
        md = dict(m)
        for v in list(common):
            e = min(common[v], md.get(v, 0))
            if e:
                common[v] = e
            else:
                del common[v]
        if not common:
            break
    return tuple(sorted(common.items()))


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    d = dict(a)
    for v, e in b:
        have = d.get(v, 0)
        if have < e:
            return None
        if have == e:
            del d[v]
        else:
            d[v] = have - e
    return tuple(sorted(d.items()))


def exact_divide(a: Poly, b: Poly) -> Poly | None:
    """Return ``a / b`` if ``b`` divides ``a`` exactly, else ``None``."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm_b, lc_b = b.leading_term()
    quotient: dict = {}
    rem = a
    while rem.terms:
        lm_r, lc_r = rem.leading_term()
        m = _mono_div(lm_r, lm_b)
        if m is None:
            return None
        c = lc_r / lc_b
        quotient[m] = quotient.get(m, ZERO) + c
        rem = rem - Poly._trusted({m: c}) * b
    return Poly(quotient)


# ---------------------------------------------------------------------------
# rational functions


class RatExpr:
    """Quotient of two polynomials.

    Normalisation removes the common rational content, the common monomial
    factor, and cancels completely when one side divides the other; the
    denominator's leading coefficient is made positive (and 1 when the content
    allows).  Full multivariate gcd is not attempted, so two equal functions
    may carry different representatives; ``==`` compares by cross
    multiplication and is always exact.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = Poly._coerce(num)
        den = Poly._coerce(den)
        if den.is_zero():
            raise ZeroDenominator("rational expression with zero denominator")
        self.num, self.den = self._normalise(num, den)

    @staticmethod
    def _normalise(num: Poly, den: Poly) -> tuple[Poly, Poly]:
        if num.is_zero():
            return num, Poly.const(1)
        in_num = dict(_monomial_gcd(num))
        mg = tuple((v, min(e, in_num[v])) for v, e in _monomial_gcd(den) if v in in_num)
        if mg:
            num = Poly._trusted({_mono_div(m, mg): c for m, c in num.terms.items()})
            den = Poly._trusted({_mono_div(m, mg): c for m, c in den.terms.items()})
        if not den.is_constant():
            q = exact_divide(num, den)
            if q is not None:
                num, den = q, Poly.const(1)
            else:
                q = exact_divide(den, num)
                if q is not None:
                    num, den = Poly.const(1), q
        lc = den.leading_term()[1]
        scale = _content(den) * (1 if lc > 0 else -1)
        return num / scale, den / scale

    def __add__(self, other) -> "RatExpr":
        o = _as_rat(other)
        if self.den == o.den:
            return RatExpr(self.num + o.num, self.den)
        return RatExpr(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatExpr":
        return RatExpr(-self.num, self.den)

    def __sub__(self, other) -> "RatExpr":
        return self + (-_as_rat(other))

    def __rsub__(self, other) -> "RatExpr":
        return _as_rat(other) - self

    def __mul__(self, other) -> "RatExpr":
        o = _as_rat(other)
        return RatExpr(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatExpr":
        o = _as_rat(other)
        if o.num.is_zero():
            raise ZeroDenominator("division by zero rational expression")
        return RatExpr(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RatExpr":
        return _as_rat(other) / self

    def __eq__(self, other) -> bool:
        try:
            o = _as_rat(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):  # equality is not canonical, so instances are unhashable
        raise TypeError("RatExpr is not hashable")

    def __repr__(self) -> str:
        if self.den == 1:
            return f"{self.num}"
        return f"({self.num}) / ({self.den})"

    def variables(self) -> frozenset:
        return self.num.variables() | self.den.variables()

    def diff(self, v: Var | str) -> "RatExpr":
        return RatExpr(self.num.diff(v) * self.den - self.num * self.den.diff(v), self.den * self.den)

    def evaluate(self, assignment: Mapping[Var, object], zero=ZERO):
        d = self.den.evaluate(assignment, zero)
        if not _real_part(d):
            raise ZeroDenominator("denominator vanishes at the assignment")
        return self.num.evaluate(assignment, zero) / d


def _real_part(v):
    while hasattr(v, "value"):
        v = v.value
    return v


def _as_rat(x) -> RatExpr:
    if isinstance(x, RatExpr):
        return x
    return RatExpr(Poly._coerce(x), Poly.const(1))


def evaluate(e: Poly | RatExpr, assignment: Mapping[Var, object]) -> mpq:
    """Exact value of a polynomial or rational expression at a rational point."""
    return e.evaluate(assignment)


def substitute_scale(e: Poly, variables: Iterable[Var], factor: Poly) -> Poly:
    """Replace each variable ``v`` in ``variables`` by ``factor * v``."""
    return e.subs({v: factor * Poly.var(v) for v in variables})

