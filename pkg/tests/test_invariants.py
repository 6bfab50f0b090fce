import pytest

from prsde.algebra import Poly, Var, substitute_scale
from prsde.errors import SingularJacobian, ZeroDenominator
from prsde.invariants import (
    CORE_VARIABLES,
    NAMES,
    RATIO_NAMES,
    catalog,
    differential_rows,
    disambiguate_i2,
    evaluate_invariant,
    evaluation_summary,
    g_matrix,
    g_ratio_invariance_check,
    independence_check,
    invariance_check,
    invariance_epsilons,
    jacobian_determinant,
    sample_nonsingular,
    singularity_rank,
    tresse_frame,
)
from prsde.jets import JetGerm, flat_germ
from prsde.sde import sample_sde_germ
from prsde.symmetry import make_generator

LAM = Var.aux("lam")


def single_entry_germ(order=2):
    return JetGerm.from_jets((0, 1, 1, 0), order, {"q_xy": 1})


def test_values_at_single_entry_germ():
    # Only q_xy = 1 survives, so by hand:
    #   K  = -2 q_xy^2                    = -2
    #   K1 = 4 q_xy^2                     = 4    -> I1 = 4 / -2       = -2
    #   L2 has no pure q_xy term          = 0    -> I2 = 0
    #   L3 = -4 q_xy^3                    = -4   -> I3 = 16 / (-2)^3  = -2
    #   K4: every q_xy-only term carries r_yy = 0 -> I4 = 0
    j = single_entry_germ()
    got = [evaluate_invariant(n, j) for n in ("K", "I1", "I2", "I3", "I4")]
    assert got == [-2, -2, 0, -2, 0]


def test_flat_germ_has_zero_K():
    j = flat_germ(3)
    assert evaluate_invariant("K", j) == 0
    with pytest.raises(ZeroDenominator):
        evaluate_invariant("I1", j)
    assert singularity_rank(j) == 0
    with pytest.raises(SingularJacobian):
        tresse_frame(j)


def test_weighted_homogeneity():
    cat = catalog()
    lam = Poly.var(LAM)
    degrees = {"I1": 2, "I2": 6, "I3": 6, "I4": 4}
    assert substitute_scale(cat.K, CORE_VARIABLES, lam) == cat.K * lam ** 2
    for n in NAMES:
        num = cat.numerators[n]
        assert substitute_scale(num, CORE_VARIABLES, lam) == num * lam ** degrees[n]


def test_catalog_uses_exactly_the_core_jets():
    for reading in ("q_yy", "q_zz", "r_yy"):
        used = catalog(reading).variables()
        assert used == CORE_VARIABLES | {Var.parse(reading)}
    assert catalog().variables() == CORE_VARIABLES


def test_generic_rank_of_singular_matrix():
    assert all(singularity_rank(sample_sde_germ(2, f"rk:{i}")) == 4 for i in range(5))


def test_invariance_at_one_germ():
    j = sample_sde_germ(3, "inv")
    for fam in range(1, 6):
        eps = invariance_epsilons(make_generator(fam, Poly.var(Var.parse("t")) * Poly.var(Var.parse("z"))), j)
        assert all(v == 0 for v in eps.values())


def test_invariance_check_small_run():
    rep = invariance_check(NAMES, 3, 1, max_degree=2)
    assert rep.passed and rep.succeeded == rep.attempted


def test_i2_reading_is_unique():
    outcome = disambiguate_i2(3, 2)
    assert [r for r, ok in outcome.items() if ok] == ["q_yy"]


def test_tresse_frame_duality_and_symmetric_G():
    j, _ = sample_nonsingular(3, "frame", lambda g: evaluate_invariant("K", g) != 0)
    assert tresse_frame(j).check_duality()
    G = g_matrix(j)
    assert G.is_symmetric()
    assert set(G.ratios()) == set(RATIO_NAMES)


def test_g_ratio_check_small_run():
    assert g_ratio_invariance_check(1, 3, max_degree=2).passed


def test_forward_mode_rows_match_symbolic_derivatives():
    j, _ = sample_nonsingular(3, "rows", lambda g: evaluate_invariant("K", g) != 0)
    rows, cols = differential_rows(j)
    a = j.assignment()
    cat = catalog()
    for r, n in enumerate(NAMES):
        for c, v in enumerate(cols):
            assert rows[r][c] == cat.invariants[n].diff(v).evaluate(a)


def test_independence_small_run():
    rep = independence_check(3, 4, det_samples=5)
    assert rep.passed
    assert rep.details["rank13"] == 3


def test_determinant_vanishes_only_off_generic_set():
    assert jacobian_determinant(flat_germ(3)) == 0
    assert jacobian_determinant(sample_sde_germ(3, "det")) != 0


def test_evaluation_summary_fields():
    out = evaluation_summary(sample_sde_germ(3, "sum"))
    assert set(out) == {"K", *NAMES, "rank_A", "det_J", "G_ratios"}
    two = evaluation_summary(single_entry_germ())
    assert "det_J" not in two and two["K"] == -2

