import random

from hypothesis import given
from hypothesis import strategies as st

from prsde import multiindex as mi
from prsde.algebra import Q, RatExpr, Var, var
from prsde.jets import (
    DualScalar,
    JetGerm,
    compose_with_germ,
    dual_evaluate,
    evaluate_at_germ,
    flat_germ,
    iterated_total_derivative,
    total_derivative,
)
from prsde.sde import random_germ, sde_system

from conftest import polys

JET_VARS = tuple(Var.parse(n) for n in ("t", "z", "p", "q_x", "r_y", "p_tz", "q"))


def test_total_derivative_examples():
    assert total_derivative(var("p"), "x") == var("p_x")
    assert total_derivative(var("p") * var("q_x"), "t") == var("p_t") * var("q_x") + var("p") * var("q_tx")
    F1 = sde_system().equations[0]
    assert total_derivative(F1, "x") == var("p_xxx") + 2 * var("q_xxy") + var("r_xyy")


def test_iterated_total_derivative_identity():
    e = var("p") * var("q_x") + var("t")
    assert iterated_total_derivative(e, (0, 0, 0, 0)) == e


@given(polys(JET_VARS, max_terms=3), st.integers(0, 3), st.integers(0, 3))
def test_total_derivatives_commute(e, i, j):
    assert total_derivative(total_derivative(e, i), j) == total_derivative(total_derivative(e, j), i)


def test_compose_examples():
    j = JetGerm((0, 0, 0, 0), 3, {0: {(2, 0, 0, 0): 1}})
    s = compose_with_germ(var("p"), j)
    assert s.coefficient((2, 0, 0, 0)) == 1
    assert all(c == 0 for sig, c in s.coeffs.items() if sig != (2, 0, 0, 0))
    assert compose_with_germ(sde_system().equations[0], flat_germ(3)).is_zero()


def test_compose_agrees_with_symbolic_path():
    rng = random.Random(11)
    e = var("p") * var("q_y") + var("r_xx") * var("t") + var("q") ** 2
    for _ in range(3):
        j = random_germ(4, rng)
        series = compose_with_germ(e, j)
        for tau in mi.multi_indices_upto(2):
            assert series.derivative_at_zero(tau) == evaluate_at_germ(iterated_total_derivative(e, tau), j)


def test_dual_evaluate_examples():
    x = Var.parse("x")
    j = JetGerm((0, 3, 0, 0), 0, {})
    d = dual_evaluate(var("x") ** 2, j, {x: 1})
    assert (d.value, d.epsilon) == (9, 6)
    j2 = JetGerm((0, 2, 0, 0), 0, {})
    d2 = dual_evaluate(RatExpr(1, var("x")), j2, {x: 1})
    assert (d2.value, d2.epsilon) == (Q("1/2"), Q("-1/4"))


def test_dual_scalars_nest():
    inner = DualScalar(DualScalar(Q(2), Q(1)), DualScalar(Q(1), Q(0)))
    sq = inner * inner  # (a + e1 + e2)^2 with a = 2
    assert sq.value.value == 4 and sq.value.epsilon == 4 and sq.epsilon.value == 4 and sq.epsilon.epsilon == 2


def test_germ_json_round_trip_and_jet_coordinates():
    rng = random.Random(2)
    j = random_germ(3, rng)
    again = JetGerm.from_json(j.to_json())
    assert again == j
    k = JetGerm.from_jets((0, 1, 2, 0), 2, {"q_xy": 1, "p_tt": 4})
    assert k.value(Var.parse("q_xy")) == 1 and k.value(Var.parse("p_tt")) == 4
    assert k.coeffs[0][(2, 0, 0, 0)] == 2  # Taylor coefficient = jet / sigma!
    assert all(isinstance(s, str) for s in k.to_dict()["base_point"])
