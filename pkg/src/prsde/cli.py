"""Command-line interface.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error, 3 the
germ sampler ran out of retries.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import format_q
from .errors import DegenerateSample
from .report import CheckReport, RunConfig, emit_report, reports_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3
VERIFY_TARGETS = (
    "symmetries", "brackets", "shape", "lift", "pseudogroup",
    "invariants", "g-ratios", "stabilizer-tensors", "independence",
)
HIGH_K = 5


def _jsonable(v):
    """Exact values as "num/den" strings, recursively."""
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    return format_q(v)


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _print_report(r: CheckReport) -> None:
    status = "PASS" if r.passed else "FAIL"
    print(f"[{status}] {r.check_id}: {r.succeeded}/{r.attempted}  ({r.claim})")


def _config(args) -> RunConfig:
    cfg = RunConfig.load(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def cmd_derive_sde(args) -> int:
    from .curvature import components_artifact, derive_sde_and_verify

    cfg = _config(args)
    samples = args.samples or cfg.samples_for("derive-sde")
    result = derive_sde_and_verify(samples, cfg.seed_for("derive-sde"))
    _print_report(result.report)
    print(f"vanishing block: {result.orientation} (volume form dt^dx^dy^dz)")
    if args.out:
        Path(args.out).write_text(json.dumps(components_artifact(result.orientation), indent=2, sort_keys=True) + "\n")
    if args.json:
        Path(args.json).write_text(reports_to_json([result.report]))
    return EXIT_OK if result.report.passed else EXIT_FAIL


def run_verify(target: str, cfg: RunConfig, samples: int | None = None, max_degree: int | None = None) -> CheckReport:
    from . import invariants, symmetry

    seed = cfg.seed_for(target)
    if target == "symmetries":
        return symmetry.verify_tangency(samples or cfg.samples_for("symmetries"), seed, max_degree or cfg.tangency_degree)
    if target == "brackets":
        return symmetry.verify_commutator_table(max_degree or cfg.max_degree)
    if target == "shape":
        return symmetry.shape_lie_derivative_check(max_degree or cfg.max_degree)
    if target == "lift":
        return symmetry.lifted_invariance_check(max_degree or cfg.max_degree)
    if target == "pseudogroup":
        n = samples or cfg.samples_for("pseudogroup")
        return symmetry.infinitesimal_consistency(n, n, seed)
    if target == "invariants":
        return invariants.invariance_check(invariants.NAMES, samples or cfg.samples_for("invariants"), seed,
                                           max_degree or cfg.tangency_degree)
    if target == "g-ratios":
        return invariants.g_ratio_invariance_check(samples or cfg.samples_for("g-ratios"), seed,
                                                   max_degree or cfg.tangency_degree)
    if target == "stabilizer-tensors":
        return symmetry.verify_stabilizer_tensors()
    if target == "independence":
        return invariants.independence_check(samples or cfg.samples_for("independence"), seed,
                                             cfg.samples_for("jacobian"))
    raise ValueError(target)


def cmd_verify(args) -> int:
    cfg = _config(args)
    report = run_verify(args.target, cfg, args.samples, args.max_degree)
    _print_report(report)
    if report.failures:
        print(json.dumps(report.failures[0], indent=2, sort_keys=True))
    if args.json:
        Path(args.json).write_text(reports_to_json([report]))
    return EXIT_OK if report.passed else EXIT_FAIL


def _check_kmax(kmax: int, allow_high: bool) -> None:
    if kmax < 0:
        raise UsageError("--kmax must be >= 0")
    if kmax > HIGH_K and not allow_high:
        raise UsageError(f"--kmax above {HIGH_K} needs --allow-high-k (large exact rank computations)")


def cmd_dims(args) -> int:
    from .counting import verify_dimension_table, DimensionRow, DimensionTable

    _check_kmax(args.kmax, args.allow_high_k)
    cfg = _config(args)
    report = verify_dimension_table(args.kmax, cfg.seed_for("dims"))
    table = DimensionTable([DimensionRow(**row) for row in report.details["table"]])
    sys.stdout.write(table.markdown())
    _print_report(report)
    if args.json:
        Path(args.json).write_text(json.dumps({"table": table.to_dict(), "passed": report.passed}, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_hilbert(args) -> int:
    from .counting import hilbert

    values = {k: hilbert(args.family, k) for k in range(args.kmax + 1)}
    print(json.dumps({"family": args.family, "H": values}))
    return EXIT_OK


def cmd_poincare(args) -> int:
    from .counting import closed_forms

    cf = closed_forms(args.family)
    coeffs = cf.series(args.terms)
    print(" ".join(str(c) for c in coeffs))
    ok = coeffs == [cf.hilbert(k) for k in range(args.terms)]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample_germ(args) -> int:
    from .sde import sample_sde_germ

    if args.order < 2:
        raise UsageError("--order must be >= 2")
    germ = sample_sde_germ(args.order, args.seed if args.seed is not None else 0)
    _write(germ.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_invariants_eval(args) -> int:
    from .invariants import evaluation_summary
    from .jets import JetGerm

    germ = JetGerm.from_json(Path(args.germ).read_text())
    if germ.order < 2:
        raise UsageError("the germ must have order >= 2")
    print(json.dumps(_jsonable(evaluation_summary(germ)), indent=2))
    return EXIT_OK


def default_reports(cfg: RunConfig) -> tuple[list[CheckReport], dict]:
    """Every check at the configured sizes, plus the dimension table."""
    from .counting import DimensionRow, DimensionTable, series_check, verify_dimension_table, verify_free_action
    from .curvature import derive_sde_and_verify

    reports = [derive_sde_and_verify(cfg.samples_for("derive-sde"), cfg.seed_for("derive-sde")).report]
    for target in VERIFY_TARGETS:
        reports.append(run_verify(target, cfg))
    dims = verify_dimension_table(cfg.kmax, cfg.seed_for("dims"))
    reports.append(dims)
    for k in range(3, min(cfg.kmax, HIGH_K) + 1):
        reports.append(verify_free_action(k, cfg.seed_for(f"free-action-k{k}")))
    reports.append(series_check(cfg.terms))
    table = DimensionTable([DimensionRow(**row) for row in dims.details["table"]])
    return reports, {"Dimension table": table.markdown()}


def cmd_report(args) -> int:
    cfg = _config(args)
    reports, tables = default_reports(cfg)
    md = args.out or cfg.out_markdown
    js = args.json or cfg.out_json
    emit_report(reports, md, js, tables)
    for r in sorted(reports, key=lambda r: r.check_id):
        _print_report(r)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="prsde", description="Exact checks for the PR self-duality system.")
    p.add_argument("--config", help="JSON run configuration (default: $PRSDE_CONFIG)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("derive-sde", help="find the vanishing half-Weyl block and check it")
    d.add_argument("--samples", type=int)
    d.add_argument("--seed", type=int)
    d.add_argument("--out", help="write the block components here")
    d.add_argument("--json", help="write the check report here")
    d.set_defaults(func=cmd_derive_sde)

    v = sub.add_parser("verify", help="run one verification")
    v.add_argument("target", choices=VERIFY_TARGETS)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--max-degree", type=int)
    v.add_argument("--json")
    v.set_defaults(func=cmd_verify)

    dm = sub.add_parser("dims", help="orbit dimension table")
    dm.add_argument("--kmax", type=int, default=5)
    dm.add_argument("--seed", type=int)
    dm.add_argument("--json")
    dm.add_argument("--allow-high-k", action="store_true")
    dm.set_defaults(func=cmd_dims)

    h = sub.add_parser("hilbert", help="closed-form Hilbert function values")
    h.add_argument("--family", choices=("sde", "conformal", "metric"), default="sde")
    h.add_argument("--kmax", type=int, default=12)
    h.set_defaults(func=cmd_hilbert)

    pc = sub.add_parser("poincare", help="Taylor coefficients of the Poincare function")
    pc.add_argument("--family", choices=("sde", "conformal", "metric"), default="sde")
    pc.add_argument("--terms", type=int, default=12)
    pc.set_defaults(func=cmd_poincare)

    s = sub.add_parser("sample-germ", help="random germ on the prolonged equation")
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample_germ)

    inv = sub.add_parser("invariants", help="invariant evaluation")
    inv_sub = inv.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = inv_sub.add_parser("eval", help="evaluate K, I1..I4, rank A, det J and G ratios at a germ")
    ev.add_argument("--germ", required=True)
    ev.set_defaults(func=cmd_invariants_eval)

    r = sub.add_parser("report", help="run every check and write markdown + JSON")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="markdown path")
    r.add_argument("--json", help="JSON path")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except DegenerateSample as exc:
        print(f"degenerate sample: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (UsageError, OSError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
