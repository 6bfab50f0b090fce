"""Check records, run configuration and report emission."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

CONFIG_ENV = "PRSDE_CONFIG"


def derive_seed(master, check_id: str) -> int:
    """Per-check seed: independent of execution order, stable across runs."""
    digest = hashlib.sha256(f"{master}:{check_id}".encode()).hexdigest()
    return int(digest[:12], 16)


@dataclass
class CheckReport:
    check_id: str
    claim: str
    passed: bool
    attempted: int = 0
    succeeded: int = 0
    seeds: list = field(default_factory=list)
    elapsed: float = 0.0
    failures: list = field(default_factory=list)  # replayable payloads (germ JSON, generator, ...)
    details: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = asdict(self)
        if not include_timing:
            d.pop("elapsed")
        return d


@dataclass
class RunConfig:
    seed: int = 0
    samples: dict = field(
        default_factory=lambda: {
            "derive-sde": 200,
            "symmetries": 50,
            "invariants": 100,
            "g-ratios": 25,
            "independence": 50,
            "jacobian": 100,
            "pseudogroup": 20,
        }
    )
    max_degree: int = 3
    tangency_degree: int = 4
    kmax: int = 5
    terms: int = 12
    out_markdown: str = "report.md"
    out_json: str = "report.json"

    def seed_for(self, check_id: str) -> int:
        return derive_seed(self.seed, check_id)

    def samples_for(self, check_id: str) -> int:
        return int(self.samples[check_id])

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls()
        for k, v in data.items():
            if not hasattr(cfg, k):
                raise ValueError(f"unknown config key {k!r}")
            if k == "samples":
                cfg.samples = {**cfg.samples, **v}
            else:
                setattr(cfg, k, v)
        return cfg

    @classmethod
    def load(cls, path: str | None = None) -> "RunConfig":
        """Load from ``path``, else from the file named by ``$PRSDE_CONFIG``, else defaults."""
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        return cls.from_dict(json.loads(Path(path).read_text()))


def reports_to_json(reports: list[CheckReport], include_timing: bool = False) -> str:
    ordered = sorted(reports, key=lambda r: r.check_id)
    doc = {
        "all_passed": all(r.passed for r in ordered),
        "checks": [r.to_dict(include_timing) for r in ordered],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _md_value(v) -> str:
    if isinstance(v, (dict, list)):
        return "`" + json.dumps(v, sort_keys=True) + "`"
    return str(v)


def reports_to_markdown(reports: list[CheckReport], tables: dict | None = None) -> str:
    """Markdown twin of :func:`reports_to_json`; ``tables`` maps a title to preformatted markdown."""
    ordered = sorted(reports, key=lambda r: r.check_id)
    lines = ["# Verification report", ""]
    if not ordered and not tables:
        lines.append("No checks were run.")
    if ordered:
        lines += ["| check | result | passed/attempted |", "|---|---|---|"]
        for r in ordered:
            lines.append(f"| {r.check_id} | {'PASS' if r.passed else 'FAIL'} | {r.succeeded}/{r.attempted} |")
        lines.append("")
    for r in ordered:
        lines += [f"## {r.check_id}", "", f"Claim: {r.claim}", "", f"Result: {'PASS' if r.passed else 'FAIL'}", ""]
        if r.seeds:
            lines.append(f"Seeds: {', '.join(str(s) for s in r.seeds)}")
            lines.append("")
        for k in sorted(r.details):
            lines.append(f"- {k}: {_md_value(r.details[k])}")
        if r.details:
            lines.append("")
        if r.failures:
            lines.append("Failures (replay payloads):")
            lines.append("")
            for f in r.failures:
                lines.append("```json")
                lines.append(json.dumps(f, indent=2, sort_keys=True))
                lines.append("```")
            lines.append("")
    for title in sorted(tables or {}):
        lines += [f"## {title}", "", tables[title].rstrip(), ""]
    return "\n".join(lines).rstrip() + "\n"


def emit_report(reports: list[CheckReport], markdown_path, json_path, tables: dict | None = None) -> None:
    Path(markdown_path).write_text(reports_to_markdown(reports, tables))
    Path(json_path).write_text(reports_to_json(reports))


def markdown_section(document: str, title: str) -> str:
    """Body of the ``## title`` section of a report document ("" if absent)."""
    lines = document.splitlines()
    try:
        start = lines.index(f"## {title}") + 1
    except ValueError:
        return ""
    end = next((i for i in range(start, len(lines)) if lines[i].startswith("## ")), len(lines))
    return "\n".join(lines[start:end]).strip() + "\n"
