"""Recompute and rewrite the golden files under tests/golden.

Run after an intentional change; review the diff before committing.
"""

import json
from pathlib import Path

from prsde.counting import dimension_table
from prsde.curvature import components_artifact, derive_sde_and_verify
from prsde.invariants import disambiguate_i2
from prsde.report import RunConfig

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    cfg = RunConfig()

    result = derive_sde_and_verify(cfg.samples_for("derive-sde"), cfg.seed_for("derive-sde"))
    assert result.report.passed, result.report.details
    orientation = {"volume_form": "dt^dx^dy^dz", "epsilon_txyz": "1/4", "vanishing_block": result.orientation}
    (GOLDEN / "orientation.json").write_text(json.dumps(orientation, indent=2, sort_keys=True) + "\n")
    (GOLDEN / "vanishing_block_components.json").write_text(
        json.dumps(components_artifact(result.orientation), indent=2, sort_keys=True) + "\n"
    )

    outcome = disambiguate_i2(cfg.samples_for("invariants") // 10, cfg.seed_for("i2-reading"))
    chosen = [name for name, ok in outcome.items() if ok]
    assert len(chosen) == 1, outcome
    (GOLDEN / "i2_reading.json").write_text(
        json.dumps({"candidates": outcome, "reading": chosen[0]}, indent=2, sort_keys=True) + "\n"
    )

    table = dimension_table(cfg.kmax, cfg.seed_for("dims"))
    (GOLDEN / "dimension_table.md").write_text(table.markdown())
    (GOLDEN / "dimension_table.json").write_text(json.dumps(table.to_dict(), indent=2) + "\n")
    print(f"wrote golden files to {GOLDEN}")


if __name__ == "__main__":
    main()
