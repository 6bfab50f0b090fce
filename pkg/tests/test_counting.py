import pytest

from prsde.counting import (
    CLOSED_FORMS,
    SpanningSet,
    closed_forms,
    codim_formula,
    completeness_probe,
    dimension_table,
    hilbert,
    orbit_dimension,
    orbit_dimension_formula,
    series_check,
    verify_dimension_table,
    verify_free_action,
)

PUBLISHED_ORBITS = {0: 7, 1: 19, 2: 42, 3: 70, 4: 99, 5: 133}


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_orbit_dimension_small_orders(k):
    assert orbit_dimension(k, f"t:{k}") == PUBLISHED_ORBITS[k]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_orbit_dimension_is_seed_independent(k):
    assert len({orbit_dimension(k, s) for s in ("a", "b", "c")}) == 1


def test_orbit_formula_and_codimension_formula():
    for k in range(3, 8):
        assert orbit_dimension_formula(k) == (k + 2) * (5 * k + 13) // 2
    assert [codim_formula(k) for k in (3, 4, 5)] == [24, 70, 144]


def test_spanning_set_size():
    for k in range(6):
        assert len(SpanningSet.for_order(k)) == SpanningSet.expected_size(k)


def test_free_action_at_order_three():
    rep = verify_free_action(3, 0)
    assert rep.passed and rep.details["rank"] == 70


def test_completeness_probe_shows_no_growth():
    probe = completeness_probe(3, "probe", extra_degree=2)
    assert probe["rank"] == probe["rank_with_extra"] == 70


def test_dimension_table_through_order_four():
    table = dimension_table(4, 0)
    assert [r.dim_orbit for r in table.rows] == [7, 19, 42, 70, 99]
    assert [r.dim_sde for r in table.rows] == [7, 19, 46, 94, 169]
    assert [r.hilbert for r in table.rows] == [0, 0, 4, 20, 46]
    assert verify_dimension_table(3, 0).passed


def test_spot_values():
    assert (hilbert("sde", 2), hilbert("sde", 3)) == (4, 20)
    assert (hilbert("conformal", 2), hilbert("conformal", 3)) == (1, 13)
    assert hilbert("metric", 2) == 9


@pytest.mark.parametrize("family", sorted(CLOSED_FORMS))
def test_series_matches_hilbert_function(family):
    cf = closed_forms(family)
    assert cf.series(13) == [cf.hilbert(k) for k in range(13)]


def test_pole_orders():
    assert {f: closed_forms(f).pole_order_at_one() for f in CLOSED_FORMS} == {"sde": 3, "conformal": 3, "metric": 4}


def test_leading_terms_agree():
    diffs = [hilbert("sde", k) - hilbert("conformal", k) for k in range(4, 13)]
    assert diffs == [k + 1 for k in range(4, 13)]


def test_series_check_passes_and_unknown_family_rejected():
    assert series_check(12).passed
    with pytest.raises(ValueError):
        closed_forms("riemann")
