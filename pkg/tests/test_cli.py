import json
import subprocess
import sys
from pathlib import Path

from prsde import cli
from prsde.errors import DegenerateSample
from prsde.report import CheckReport

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sample_germ_then_eval_round_trip(tmp_path, capsys):
    g = tmp_path / "g.json"
    code, _, _ = run(["sample-germ", "--order", "3", "--seed", "7", "--out", str(g)], capsys)
    assert code == 0
    code, out, _ = run(["invariants", "eval", "--germ", str(g)], capsys)
    assert code == 0
    values = json.loads(out)
    assert set(values) >= {"K", "I1", "I2", "I3", "I4", "rank_A", "det_J", "G_ratios"}
    for v in (values["K"], values["I1"], values["det_J"], *values["G_ratios"].values()):
        num, den = v.split("/")
        int(num), int(den)


def test_poincare_coefficients(capsys):
    code, out, _ = run(["poincare", "--family", "sde", "--terms", "8"], capsys)
    assert code == 0
    assert out.split() == ["0", "0", "4", "20", "46", "74", "108", "148"]


def test_hilbert_values(capsys):
    code, out, _ = run(["hilbert", "--family", "metric", "--kmax", "2"], capsys)
    assert code == 0 and json.loads(out)["H"]["2"] == 9


def test_dims_table_matches_golden(capsys, tmp_path):
    code, out, _ = run(["dims", "--kmax", "5", "--seed", "1", "--json", str(tmp_path / "d.json")], capsys)
    assert code == 0
    assert out.startswith((GOLDEN / "dimension_table.md").read_text())
    rows = json.loads((tmp_path / "d.json").read_text())["table"]
    assert [r["dim_orbit"] for r in rows] == [7, 19, 42, 70, 99, 133]


def test_usage_errors_exit_2(capsys, tmp_path):
    assert run(["dims", "--kmax", "6"], capsys)[0] == 2
    assert run(["verify", "nothing"], capsys)[0] == 2
    assert run(["invariants", "eval", "--germ", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["sample-germ", "--order", "1"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_failed_check_exits_1(capsys, monkeypatch):
    failing = CheckReport("verify-brackets", "forced", False, 1, 0, failures=[{"generator": [1, 0, 0]}])
    monkeypatch.setattr(cli, "run_verify", lambda *a, **k: failing)
    code, out, _ = run(["verify", "brackets"], capsys)
    assert code == 1 and "[FAIL]" in out and '"generator"' in out


def test_degenerate_sampling_exits_3(capsys, monkeypatch):
    import prsde.sde as sde

    def exhausted(k, seed):
        raise DegenerateSample("retry budget exhausted")

    monkeypatch.setattr(sde, "sample_sde_germ", exhausted)
    assert run(["sample-germ", "--order", "3"], capsys)[0] == 3


def test_verify_writes_json(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "stabilizer-tensors", "--json", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text())["checks"][0]["check_id"] == "verify-stabilizer-tensors"


def test_derive_sde_writes_components(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, text, _ = run(["derive-sde", "--samples", "10", "--out", str(out)], capsys)
    assert code == 0 and "W+" in text
    assert json.loads(out.read_text()) == json.loads((GOLDEN / "vanishing_block_components.json").read_text())


def test_config_env_is_honoured(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": {"pseudogroup": 2}}))
    monkeypatch.setenv("PRSDE_CONFIG", str(cfg))
    code, out, _ = run(["verify", "pseudogroup"], capsys)
    assert code == 0 and "4/4" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prsde.cli", "poincare", "--terms", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.split() == ["0", "0", "4"]
