"""Command-line front-end.

Exit codes: 0 ok/SAT, 20 UNSAT (or model count 0), 1 usage error,
2 runtime error, 3 resource budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import benchgen, pipeline, stats
from .cnf import DimacsError, parse_dimacs
from .counter import BudgetExceeded, CountBudget, count_models
from .entropy import UnsatisfiableFormula, profile_formula
from .solver import (
    GlucoseRestarts,
    KeepLbdCutAtMost,
    KeepSizeAtMost,
    LubyRestarts,
    SolverConfig,
    solve,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3
EXIT_UNSAT = 20


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_formula(path: str):
    return parse_dimacs(Path(path).read_text())


def _parse_restart(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "luby":
        return LubyRestarts(int(rest) if rest else 100)
    if kind == "glucose":
        parts = rest.split(":") if rest else []
        window = int(parts[0]) if len(parts) > 0 and parts[0] else 50
        margin = float(parts[1]) if len(parts) > 1 else 0.8
        return GlucoseRestarts(window, margin)
    raise ValueError(f"unknown restart policy {spec!r} (use luby:N or glucose:W:M)")


def _parse_keep(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "lbd":
        return KeepLbdCutAtMost(int(rest) if rest else 5)
    if kind == "size":
        return KeepSizeAtMost(int(rest) if rest else 12)
    raise ValueError(f"unknown deletion criterion {spec!r} (use lbd:N or size:N)")


def _cmd_count(args) -> int:
    formula = _read_formula(args.file)
    budget = CountBudget(
        max_nodes=args.max_nodes, max_seconds=args.max_seconds
    )
    n = count_models(formula, budget)
    print(n)
    return EXIT_UNSAT if n == 0 else EXIT_OK


def _cmd_profile(args) -> int:
    formula = _read_formula(args.file)
    profile = profile_formula(formula)
    record = {"clauses": formula.num_clauses, **profile.to_dict()}
    print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _cmd_solve(args) -> int:
    formula = _read_formula(args.file)
    config = SolverConfig(
        restart=_parse_restart(args.restart),
        deletion=_parse_keep(args.keep),
        decay=args.decay,
        reduce_interval=args.reduce_interval,
        seed=args.seed,
        conflict_budget=args.conflict_budget,
    )
    st = solve(formula, config)
    print(json.dumps(st.to_dict(), sort_keys=True))
    if st.result == "SAT":
        lits = " ".join(
            str(v if st.model[v] else -v) for v in sorted(st.model)
        )
        print(f"v {lits} 0")
        return EXIT_OK
    if st.result == "UNSAT":
        return EXIT_UNSAT
    return EXIT_BUDGET


def _cmd_gen(args) -> int:
    targets = [int(t) for t in args.backbones.split(",")]
    clauses_per_target = None
    if args.clauses_per_bucket:
        pairs = [p.split("=") for p in args.clauses_per_bucket.split(",")]
        clauses_per_target = {int(t): int(m) for t, m in pairs}
    force_targets = (
        {int(t) for t in args.force.split(",")} if args.force else None
    )
    rows = benchgen.build_suite(
        targets=targets,
        per_bucket=args.per_bucket,
        num_vars=args.vars,
        seed=args.seed,
        out_dir=args.out,
        clauses_per_target=clauses_per_target,
        clause_ratio=args.ratio,
        max_attempts=args.max_attempts,
        force_targets=force_targets,
        tune_clauses=args.tune_clauses,
    )
    print(f"wrote {len(rows)} instances to {args.out}", file=sys.stderr)
    print(str(Path(args.out) / "manifest.csv"))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.action == "run":
        overrides = (
            pipeline.load_solver_defaults(args.config) if args.config else None
        )
        plan = pipeline.make_plan(
            args.plan,
            args.runs_per_formula,
            args.seed,
            args.reduce_interval,
            base_overrides=overrides,
        )
        records = pipeline.run_experiment(plan, args.suite, args.out, jobs=args.jobs)
        pipeline.emit_report(plan, records, args.out, k=args.k, seed=args.seed)
        print(f"{len(records)} records in {args.out}", file=sys.stderr)
        print(str(Path(args.out) / "records.jsonl"))
        return EXIT_OK
    # report
    records = pipeline.load_records(args.indir)
    plan = pipeline.make_plan(args.plan, seed=args.seed)
    pipeline.emit_report(plan, records, args.indir, k=args.k, seed=args.seed)
    print(str(Path(args.indir) / "records.csv"))
    return EXIT_OK


def _cmd_analyze(args) -> int:
    import csv as _csv

    with open(args.file, newline="") as fh:
        rows = list(_csv.DictReader(fh))
    if not rows:
        raise ValueError("empty results file")
    col_a, col_b = args.col_a, args.col_b
    out_rows = []
    for title, measure in (("Entropy", "entropy"), ("Density", "density")):
        ms = [float(r[measure]) for r in rows]
        ca = [float(r[col_a]) for r in rows]
        if args.test == "beta-gap":
            ds = [float(r["density"]) for r in rows]
            res = stats.beta_gap_entropy_vs_density(
                [float(r["entropy"]) for r in rows], ds, ca, k=args.k, seed=args.seed
            )
            out_rows.append(
                {
                    "measure": "Entropy-vs-Density",
                    "conf_interval": pipeline._fmt_ci(res.gap_ci95),
                    "p_val": pipeline._fmt_p(res.gap_p),
                }
            )
            break
        cb = [float(r[col_b]) for r in rows]
        if args.test == "delta":
            res = stats.delta_test(ms, ca, cb)
            out_rows.append(
                {
                    "measure": title,
                    "conf_interval": pipeline._fmt_ci(res.ci95),
                    "p_val": pipeline._fmt_p(res.p_two_sided),
                }
            )
        else:  # delta-beta
            res = stats.delta_beta_test(ms, ca, cb, k=args.k, seed=args.seed)
            out_rows.append(
                {
                    "measure": title,
                    "conf_interval": pipeline._fmt_ci(res.gap_ci95),
                    "p_val": pipeline._fmt_p(res.gap_p),
                }
            )
    writer = None
    import io

    buf = io.StringIO()
    writer = _csv.DictWriter(buf, fieldnames=list(out_rows[0].keys()))
    writer.writeheader()
    writer.writerows(out_rows)
    sys.stdout.write(buf.getvalue())
    widths = {
        c: max(len(c), *(len(str(r[c])) for r in out_rows))
        for c in out_rows[0]
    }
    for line in [
        "  ".join(c.ljust(widths[c]) for c in out_rows[0])
    ] + [
        "  ".join(str(r[c]).ljust(widths[c]) for c in r) for r in out_rows
    ]:
        print(line, file=sys.stderr)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="satentropy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact model count of a CNF file")
    p.add_argument("file")
    p.add_argument("--max-nodes", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("profile", help="entropy/density/backbone profile")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="JSON output (default)")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("solve", help="run the CDCL solver")
    p.add_argument("file")
    p.add_argument("--restart", default="luby:100", help="luby:N or glucose:W:M")
    p.add_argument("--keep", default="lbd:5", help="lbd:N or size:N")
    p.add_argument("--decay", type=float, default=0.95)
    p.add_argument("--reduce-interval", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--conflict-budget", type=int, default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("gen", help="generate a backbone-controlled 3-SAT suite")
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--backbones", required=True, help="comma-separated targets")
    p.add_argument("--per-bucket", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratio", type=float, default=4.25)
    p.add_argument(
        "--clauses-per-bucket",
        default=None,
        help="per-target clause counts, e.g. 2=70,18=92",
    )
    p.add_argument("--max-attempts", type=int, default=100_000)
    p.add_argument(
        "--tune-clauses",
        action="store_true",
        help="pick a per-bucket clause count that makes the target common",
    )
    p.add_argument("--force", default=None, help="targets to pin via unit clauses")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("experiment", help="run or re-report an experiment")
    psub = p.add_subparsers(dest="action", required=True)
    pr = psub.add_parser("run")
    pr.add_argument(
        "--plan",
        required=True,
        choices=["deletion", "lbdcut", "restarts", "decay", "hardness"],
    )
    pr.add_argument("--suite", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--jobs", type=int, default=1)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--runs-per-formula", type=int, default=5)
    pr.add_argument("--reduce-interval", type=int, default=2000)
    pr.add_argument(
        "--config",
        default=None,
        help="key=value file with solver defaults for the shared dimensions",
    )
    pr.add_argument("--k", type=int, default=1000)
    pr.set_defaults(func=_cmd_experiment)
    pp = psub.add_parser("report")
    pp.add_argument("--in", dest="indir", required=True)
    pp.add_argument(
        "--plan",
        required=True,
        choices=["deletion", "lbdcut", "restarts", "decay", "hardness"],
    )
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--k", type=int, default=1000)
    pp.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("analyze", help="regression tests over a results CSV")
    p.add_argument("file")
    p.add_argument("--test", required=True, choices=["delta", "delta-beta", "beta-gap"])
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--col-a", default="conflicts_a")
    p.add_argument("--col-b", default="conflicts_b")
    p.set_defaults(func=_cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (DimacsError, UnsatisfiableFormula, ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
