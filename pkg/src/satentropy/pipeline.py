"""Experiment orchestration: run paired solver configurations over a
generated suite, persist per-formula records, and emit plot data and
regression tables."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import stats
from .cnf import CnfFormula, parse_dimacs
from .entropy import FormulaProfile, profile_formula
from .solver import (
    GlucoseRestarts,
    KeepLbdCutAtMost,
    KeepSizeAtMost,
    LubyRestarts,
    SolverConfig,
    solve,
)


@dataclass(frozen=True)
class ExperimentPlan:
    """A paired comparison of two solver configurations differing in one
    dimension (or a single-config hardness study when config_b is None)."""

    name: str
    config_a: SolverConfig
    config_b: SolverConfig | None
    runs_per_formula: int = 5
    seed: int = 0

    @property
    def label_a(self) -> str:
        return self.config_a.label()

    @property
    def label_b(self) -> str | None:
        return self.config_b.label() if self.config_b else None


CACHE_DIR_ENV = "SATENTROPY_CACHE_DIR"


def load_solver_defaults(path: str | Path) -> dict:
    """Plain key=value config file for solver defaults.

    Recognized keys: restart (luby:N or glucose:W:M), keep (lbd:N or
    size:N), decay, reduce_interval. Blank lines and #-comments ignored.
    """
    from .cli import _parse_keep, _parse_restart

    overrides: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if key == "restart":
            overrides["restart"] = _parse_restart(value)
        elif key == "keep":
            overrides["deletion"] = _parse_keep(value)
        elif key == "decay":
            overrides["decay"] = float(value)
        elif key == "reduce_interval":
            overrides["reduce_interval"] = int(value)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return overrides


def _base(seed: int = 0, **overrides) -> SolverConfig:
    defaults = dict(
        restart=LubyRestarts(100),
        deletion=KeepLbdCutAtMost(5),
        decay=0.95,
        reduce_interval=2000,
        seed=seed,
    )
    defaults.update(overrides)
    return SolverConfig(**defaults)


def make_plan(
    name: str,
    runs_per_formula: int = 5,
    seed: int = 0,
    reduce_interval: int = 2000,
    base_overrides: dict | None = None,
) -> ExperimentPlan:
    """The built-in experiment plans.

    deletion: keep LBD-cut <= 5 vs keep size <= 12
    lbdcut:   keep LBD-cut <= 1 vs keep LBD-cut <= 5
    restarts: Luby(100) vs dynamic LBD restarts (window 50, margin 0.8)
    decay:    VSIDS decay 0.95 vs 0.60
    hardness: single configuration, conflicts vs entropy/density

    Deletion-criterion plans only differentiate once database reduction
    actually fires; on small instances pass a reduce_interval well below
    the typical conflict count.

    base_overrides (e.g. from load_solver_defaults) adjusts the shared
    dimensions; the dimension under test always keeps its paired values.
    """
    shared = dict(base_overrides or {})
    shared["reduce_interval"] = reduce_interval
    if name == "deletion":
        shared.pop("deletion", None)
        a = _base(deletion=KeepLbdCutAtMost(5), **shared)
        b = _base(deletion=KeepSizeAtMost(12), **shared)
    elif name == "lbdcut":
        shared.pop("deletion", None)
        a = _base(deletion=KeepLbdCutAtMost(1), **shared)
        b = _base(deletion=KeepLbdCutAtMost(5), **shared)
    elif name == "restarts":
        shared.pop("restart", None)
        a = _base(restart=LubyRestarts(100), **shared)
        b = _base(restart=GlucoseRestarts(50, 0.8), **shared)
    elif name == "decay":
        shared.pop("decay", None)
        a = _base(decay=0.95, **shared)
        b = _base(decay=0.60, **shared)
    elif name == "hardness":
        a, b = _base(**shared), None
    else:
        raise ValueError(f"unknown plan {name!r}")
    return ExperimentPlan(name, a, b, runs_per_formula, seed)


# --------------------------------------------------------------- suite I/O

def load_suite(suite_dir: str | Path) -> list[dict]:
    """Read manifest.csv rows; each row gains a 'path' key."""
    suite = Path(suite_dir)
    manifest = suite / "manifest.csv"
    if not manifest.exists():
        raise FileNotFoundError(f"no manifest.csv in {suite}")
    rows = []
    with manifest.open(newline="") as fh:
        for row in csv.DictReader(fh):
            row["path"] = str(suite / row["file"])
            rows.append(row)
    return rows


def _profile_dir(suite_dir: str | Path) -> Path:
    # the env var relocates the profile cache away from the suite directory
    override = os.environ.get(CACHE_DIR_ENV)
    return Path(override) if override else Path(suite_dir) / "profiles"


def load_profile(suite_dir: str | Path, formula_id: str) -> FormulaProfile | None:
    p = _profile_dir(suite_dir) / f"{formula_id}.json"
    if not p.exists():
        return None
    return FormulaProfile.from_dict(json.loads(p.read_text()))


def ensure_profile(
    suite_dir: str | Path, formula_id: str, formula: CnfFormula
) -> FormulaProfile:
    """Cached profile lookup; profiles on the missing path, never fails silently."""
    cached = load_profile(suite_dir, formula_id)
    if cached is not None:
        return cached
    profile = profile_formula(formula)
    pdir = _profile_dir(suite_dir)
    pdir.mkdir(parents=True, exist_ok=True)
    (pdir / f"{formula_id}.json").write_text(
        json.dumps(profile.to_dict(), sort_keys=True, indent=1)
    )
    return profile


# ------------------------------------------------------------ running

def _run_seed(plan_seed: int, formula_id: str, run: int) -> int:
    digest = hashlib.sha256(f"{plan_seed}:{formula_id}:{run}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _solve_formula(args) -> dict:
    """Worker: solve one formula under both configs for all runs."""
    path, formula_id, plan = args
    formula = parse_dimacs(Path(path).read_text())
    configs = [(plan.label_a, plan.config_a)]
    if plan.config_b is not None:
        configs.append((plan.label_b, plan.config_b))
    conflicts: dict[str, float] = {}
    verdicts: dict[str, set] = {}
    for label, cfg in configs:
        totals = []
        for run in range(plan.runs_per_formula):
            seed = _run_seed(plan.seed, formula_id, run)
            run_cfg = SolverConfig(
                restart=cfg.restart,
                deletion=cfg.deletion,
                decay=cfg.decay,
                reduce_interval=cfg.reduce_interval,
                seed=seed,
                conflict_budget=cfg.conflict_budget,
            )
            st = solve(formula, run_cfg)
            totals.append(st.conflicts)
            verdicts.setdefault(label, set()).add(st.result)
        conflicts[label] = sum(totals) / len(totals)
    all_verdicts = set().union(*verdicts.values())
    if len(all_verdicts) != 1:
        raise RuntimeError(
            f"solver verdict mismatch on {formula_id}: {verdicts} (soundness bug)"
        )
    return {"formula_id": formula_id, "conflicts": conflicts}


def run_experiment(
    plan: ExperimentPlan,
    suite_dir: str | Path,
    out_dir: str | Path,
    jobs: int = 1,
) -> list[dict]:
    """Run the plan over every suite formula; append records to
    records.jsonl under out_dir (resumable: already-recorded formulas are
    skipped). Returns all records sorted by formula_id."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / "records.jsonl"

    existing: dict[str, dict] = {}
    if records_path.exists():
        with records_path.open() as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    existing[rec["formula_id"]] = rec

    manifest = sorted(load_suite(suite_dir), key=lambda r: r["formula_id"])
    todo = []
    for row in manifest:
        fid = row["formula_id"]
        if fid in existing:
            continue
        todo.append((row["path"], fid, plan))

    results: dict[str, dict] = {}
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for res in pool.map(_solve_formula, todo):
                results[res["formula_id"]] = res
    else:
        for args in todo:
            res = _solve_formula(args)
            results[res["formula_id"]] = res

    new_records = []
    for row in manifest:
        fid = row["formula_id"]
        if fid in existing:
            continue
        formula = parse_dimacs(Path(row["path"]).read_text())
        profile = ensure_profile(suite_dir, fid, formula)
        rec = {
            "formula_id": fid,
            "entropy": profile.entropy,
            "density": profile.density,
            "backbone": profile.backbone_count,
            "conflicts": results[fid]["conflicts"],
            "seed": plan.seed,
            "plan": plan.name,
        }
        new_records.append(rec)

    if new_records:
        with records_path.open("a") as fh:
            for rec in new_records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    all_records = list(existing.values()) + new_records
    all_records.sort(key=lambda r: r["formula_id"])
    return all_records


def load_records(out_dir: str | Path) -> list[dict]:
    path = Path(out_dir) / "records.jsonl"
    records = [
        json.loads(line) for line in path.read_text().splitlines() if line.strip()
    ]
    records.sort(key=lambda r: r["formula_id"])
    return records


# ----------------------------------------------------------- analysis

def hardness_regression(
    records: list[dict], measure: str, config_label: str
) -> stats.RegressionResult:
    """OLS of standardized conflicts on the standardized measure."""
    if len(records) < 30:
        raise ValueError("hardness regression needs at least 30 records")
    xs = stats.standardize([r[measure] for r in records])
    ys = stats.standardize([r["conflicts"][config_label] for r in records])
    return stats.ols(xs, ys)


@dataclass(frozen=True)
class PlotPoint:
    x: float
    y: float
    count: int


def aggregate_plot(
    records: list[dict], measure: str, value_fn
) -> tuple[list[PlotPoint], stats.RegressionResult | None]:
    """Round x to 2 decimals and average y per rounded x; the trendline is
    fitted on the raw, unaggregated points."""
    if not records:
        raise ValueError("no records to plot")
    raw = [(r[measure], value_fn(r)) for r in records]
    buckets: dict[float, list[float]] = {}
    for x, y in raw:
        buckets.setdefault(round(x, 2), []).append(y)
    points = [
        PlotPoint(x=x, y=stats.mean(ys), count=len(ys))
        for x, ys in sorted(buckets.items())
    ]
    trend = None
    if len(raw) >= 3 and len({x for x, _ in raw}) > 1:
        trend = stats.ols([x for x, _ in raw], [y for _, y in raw])
    return points, trend


# ------------------------------------------------------------ reporting

def _fmt_p(p: float) -> str:
    # p-values at or below 1e-10 are rendered as 0
    return "0" if p <= 1e-10 else f"{p:.4g}"


def _fmt_ci(ci: tuple[float, float]) -> str:
    return f"({ci[0]:.4g}, {ci[1]:.4g})"


def comparison_table(
    records: list[dict], label_a: str, label_b: str, k: int, seed: int
) -> list[dict]:
    """Rows Entropy and Density with the gap-regression and slope-gap tests."""
    rows = []
    ca = [r["conflicts"][label_a] for r in records]
    cb = [r["conflicts"][label_b] for r in records]
    for title, measure in (("Entropy", "entropy"), ("Density", "density")):
        ms = [r[measure] for r in records]
        delta = stats.delta_test(ms, ca, cb)
        gap = stats.delta_beta_test(ms, ca, cb, k=k, seed=seed)
        rows.append(
            {
                "measure": title,
                "delta_ci": _fmt_ci(delta.ci95),
                "delta_p": _fmt_p(delta.p_two_sided),
                "delta_beta_ci": _fmt_ci(gap.gap_ci95),
                "delta_beta_p": _fmt_p(gap.gap_p),
                "delta_beta0_ci": _fmt_ci(gap.intercept_gap_ci95),
                "delta_beta0_p": _fmt_p(gap.intercept_gap_p),
            }
        )
    return rows


def hardness_table(records: list[dict], labels: list[str], k: int, seed: int) -> list[dict]:
    """Per solver config: entropy and density slope CIs and the slope gap."""
    rows = []
    e = [r["entropy"] for r in records]
    d = [r["density"] for r in records]
    for label in labels:
        c = [r["conflicts"][label] for r in records]
        gap = stats.beta_gap_entropy_vs_density(e, d, c, k=k, seed=seed)
        rows.append(
            {
                "config": label,
                "beta_entropy_ci": _fmt_ci(gap.beta_a_ci95),
                "beta_entropy_p": _fmt_p(gap.beta_a.p_two_sided),
                "beta_density_ci": _fmt_ci(gap.beta_b_ci95),
                "beta_density_p": _fmt_p(gap.beta_b.p_two_sided),
                "gap_ci": _fmt_ci(gap.gap_ci95),
                "gap_p": _fmt_p(gap.gap_p),
            }
        )
    return rows


def _write_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _write_aligned(path: Path, rows: list[dict]) -> None:
    cols = list(rows[0].keys())
    widths = {
        c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols
    }
    lines = ["  ".join(c.ljust(widths[c]) for c in cols)]
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in cols))
    path.write_text("\n".join(lines) + "\n")


def emit_report(
    plan: ExperimentPlan,
    records: list[dict],
    out_dir: str | Path,
    k: int = 1000,
    seed: int = 0,
) -> list[Path]:
    """Write records CSV, per-measure plot CSVs, the paired-comparison table
    (for two-config plans) and the per-config hardness table."""
    if not records:
        raise ValueError("empty record set: nothing to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    labels = [plan.label_a] + ([plan.label_b] if plan.label_b else [])

    rec_rows = []
    for r in records:
        row = {
            "formula_id": r["formula_id"],
            "entropy": f"{r['entropy']:.12g}",
            "density": f"{r['density']:.12g}",
            "backbone": r["backbone"],
        }
        for label in labels:
            row[f"conflicts[{label}]"] = f"{r['conflicts'][label]:.12g}"
        rec_rows.append(row)
    p = out / "records.csv"
    _write_csv(p, rec_rows)
    written.append(p)

    for measure in ("entropy", "density"):
        if plan.label_b:
            value_fn = lambda r: r["conflicts"][plan.label_a] - r["conflicts"][plan.label_b]
            stem = f"plot_{plan.name}_gap_vs_{measure}"
        else:
            value_fn = lambda r: r["conflicts"][plan.label_a]
            stem = f"plot_{plan.name}_conflicts_vs_{measure}"
        points, trend = aggregate_plot(records, measure, value_fn)
        rows = [
            {"x": f"{pt.x:.2f}", "y": f"{pt.y:.12g}", "count": pt.count}
            for pt in points
        ]
        p = out / f"{stem}.csv"
        _write_csv(p, rows)
        written.append(p)
        if trend is not None:
            tp = out / f"{stem}_trend.csv"
            _write_csv(
                tp,
                [
                    {
                        "beta": f"{trend.beta:.12g}",
                        "intercept": f"{trend.intercept:.12g}",
                        "p_two_sided": _fmt_p(trend.p_two_sided),
                    }
                ],
            )
            written.append(tp)

    if plan.label_b:
        table = comparison_table(records, plan.label_a, plan.label_b, k, seed)
        p = out / "comparison_table.csv"
        _write_csv(p, table)
        _write_aligned(out / "comparison_table.txt", table)
        written += [p, out / "comparison_table.txt"]

    htable = hardness_table(records, labels, k, seed)
    p = out / "hardness_table.csv"
    _write_csv(p, htable)
    _write_aligned(out / "hardness_table.txt", htable)
    written += [p, out / "hardness_table.txt"]

    # cross-measure check: are entropy and density themselves correlated?
    e = stats.standardize([r["entropy"] for r in records])
    d = stats.standardize([r["density"] for r in records])
    xm = stats.ols(e, d)
    p = out / "cross_measure.csv"
    _write_csv(
        p,
        [
            {
                "beta_ci": _fmt_ci(xm.ci95),
                "beta": f"{xm.beta:.12g}",
                "p_two_sided": _fmt_p(xm.p_two_sided),
            }
        ],
    )
    written.append(p)
    return written
