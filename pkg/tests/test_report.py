import json

import pytest

from prsde.report import (
    CONFIG_ENV,
    CheckReport,
    RunConfig,
    derive_seed,
    emit_report,
    markdown_section,
    reports_to_json,
    reports_to_markdown,
)


def sample_reports():
    ok = CheckReport("b-check", "claim b", True, 3, 3, ["1"], 0.5, [], {"n": 3})
    bad = CheckReport("a-check", "claim a", False, 2, 1, ["2"], 1.5, [{"germ": {"order": 2}, "generator": [1, 0, 0]}], {})
    return [ok, bad]


def test_empty_report_is_valid():
    md = reports_to_markdown([])
    assert "No checks were run." in md
    doc = json.loads(reports_to_json([]))
    assert doc == {"all_passed": True, "checks": []}


def test_failures_carry_replay_payloads():
    md = reports_to_markdown(sample_reports())
    assert '"generator": [' in md and '"germ"' in md
    doc = json.loads(reports_to_json(sample_reports()))
    assert doc["checks"][0]["failures"][0]["germ"] == {"order": 2}
    assert doc["all_passed"] is False


def test_ordering_by_check_id_and_byte_stability(tmp_path):
    r1, r2 = sample_reports()
    assert reports_to_json([r1, r2]) == reports_to_json([r2, r1])
    r1.elapsed = 99.0
    assert reports_to_json([r1, r2]) == reports_to_json(sample_reports())
    emit_report([r1, r2], tmp_path / "a.md", tmp_path / "a.json", {"T": "| x |\n"})
    emit_report(sample_reports(), tmp_path / "b.md", tmp_path / "b.json", {"T": "| x |\n"})
    assert (tmp_path / "a.md").read_bytes() == (tmp_path / "b.md").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert markdown_section((tmp_path / "a.md").read_text(), "T") == "| x |\n"


def test_seeds_are_derived_per_check():
    assert derive_seed(0, "dims") == derive_seed(0, "dims")
    assert derive_seed(0, "dims") != derive_seed(1, "dims")
    assert derive_seed(0, "dims") != derive_seed(0, "verify-lift")
    assert RunConfig(seed=4).seed_for("x") == derive_seed(4, "x")


def test_config_from_env(tmp_path, monkeypatch):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"seed": 9, "samples": {"invariants": 5}, "kmax": 3}))
    monkeypatch.setenv(CONFIG_ENV, str(path))
    cfg = RunConfig.load()
    assert (cfg.seed, cfg.kmax, cfg.samples_for("invariants"), cfg.samples_for("derive-sde")) == (9, 3, 5, 200)
    with pytest.raises(ValueError):
        RunConfig.from_dict({"bogus": 1})
