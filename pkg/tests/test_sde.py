import random
from math import comb

import pytest

from prsde.errors import DegenerateSample
from prsde.sde import (
    RETRY_BUDGET,
    dim_sde_counted,
    dim_sde_formula,
    equation_residuals,
    generic_compose_residuals,
    is_on_equation,
    perturb_off_equation,
    random_germ,
    sample_sde_germ,
    sample_sde_germ_with_stats,
)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sampled_germs_satisfy_prolonged_equations(k):
    j = sample_sde_germ(k, f"sde:{k}")
    assert j.order == k
    assert is_on_equation(j)
    assert j.base_point[0] == 0 and j.base_point[3] == 0
    assert j.base_point[1] != 0 and j.base_point[2] != 0


def test_fast_and_generic_residual_paths_agree():
    j = random_germ(4, random.Random(9))
    fast = equation_residuals(j)
    slow = generic_compose_residuals(j)
    assert fast
    for (i, sig), value in fast.items():
        assert value == slow[i].derivative_at_zero(sig)


def test_sampling_is_deterministic_per_seed():
    assert sample_sde_germ(3, "same") == sample_sde_germ(3, "same")
    assert sample_sde_germ(3, "a") != sample_sde_germ(3, "b")


def test_level_and_cumulative_equation_counts():
    _, stats = sample_sde_germ_with_stats(6, "counts")
    for st in stats:
        assert st.equations == 3 * comb(st.level + 1, 3)
        assert st.rank == st.equations
    assert sum(st.equations for st in stats) == 3 * comb(6 + 2, 4)


@pytest.mark.parametrize("k,expected", [(2, 46), (3, 94), (4, 169), (5, 277), (6, 424), (7, 616)])
def test_dim_sde_by_counting(k, expected):
    assert dim_sde_formula(k) == expected
    assert 2 * dim_sde_formula(k) == 2 * k ** 3 + 9 * k ** 2 + 13 * k + 14
    if k <= 5:
        assert dim_sde_counted(k, f"dim:{k}") == expected


def test_perturbation_leaves_the_equation():
    rng = random.Random(4)
    j = sample_sde_germ(2, "p")
    assert not is_on_equation(perturb_off_equation(j, rng))


def test_order_below_two_is_rejected():
    with pytest.raises(ValueError):
        sample_sde_germ(1, 0)


def test_retry_budget_exhaustion_is_a_distinct_error(monkeypatch):
    import prsde.sde as sde

    calls = []

    def always_degenerate(k, rng):
        calls.append(k)
        raise DegenerateSample("forced")

    monkeypatch.setattr(sde, "_sample_once", always_degenerate)
    with pytest.raises(DegenerateSample):
        sde.sample_sde_germ(3, 0)
    assert len(calls) == RETRY_BUDGET
