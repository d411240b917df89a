"""A CDCL SAT solver with switchable restart, deletion and decay heuristics.

The solver is a standard conflict-driven clause learner: two-watched-literal
propagation, first-UIP learning, non-chronological backjumping, phase saving
and exponential VSIDS. The three knobs under study are pluggable: restart
policy (Luby vs dynamic LBD-based), learned clause deletion criterion
(LBD-cut vs size) and the VSIDS decay factor. Its primary observable output
is the number of conflicts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from .cnf import CnfFormula, evaluate


# ---------------------------------------------------------------- configs

@dataclass(frozen=True)
class LubyRestarts:
    """Restart after luby(i) * base_interval conflicts, i = 1, 2, ..."""

    base_interval: int = 100

    def __post_init__(self):
        if self.base_interval < 1:
            raise ValueError("base_interval must be >= 1")

    def label(self) -> str:
        return f"luby:{self.base_interval}"


@dataclass(frozen=True)
class GlucoseRestarts:
    """Restart when recent learned-clause LBD exceeds the long-run average."""

    window: int = 50
    margin: float = 0.8

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")

    def label(self) -> str:
        return f"glucose:{self.window}:{self.margin:g}"


@dataclass(frozen=True)
class KeepLbdCutAtMost:
    """Never delete learned clauses whose LBD-cut is at most `cut`."""

    cut: int = 5

    def __post_init__(self):
        if self.cut < 1:
            raise ValueError("cut must be >= 1")

    def keeps(self, clause: "LearnedClauseMeta") -> bool:
        return clause.lbd_cut <= self.cut

    def label(self) -> str:
        return f"lbd:{self.cut}"


@dataclass(frozen=True)
class KeepSizeAtMost:
    """Never delete learned clauses of at most `size` literals."""

    size: int = 12

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be >= 1")

    def keeps(self, clause: "LearnedClauseMeta") -> bool:
        return clause.size <= self.size

    def label(self) -> str:
        return f"size:{self.size}"


RestartPolicy = Union[LubyRestarts, GlucoseRestarts]
DeletionPolicy = Union[KeepLbdCutAtMost, KeepSizeAtMost]


@dataclass(frozen=True)
class SolverConfig:
    restart: RestartPolicy = LubyRestarts()
    deletion: DeletionPolicy = KeepLbdCutAtMost(5)
    decay: float = 0.95
    reduce_interval: int = 2000
    seed: int = 0
    conflict_budget: int | None = None

    def __post_init__(self):
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must be strictly between 0 and 1")

    def label(self) -> str:
        return (
            f"{self.restart.label()}|{self.deletion.label()}|decay:{self.decay:g}"
        )


@dataclass
class SolveStats:
    result: str  # "SAT" | "UNSAT" | "BUDGET"
    model: dict[int, bool] | None
    conflicts: int
    decisions: int
    propagations: int
    restarts: int
    learned_kept: int
    learned_deleted: int

    def to_dict(self) -> dict:
        d = {
            "result": self.result,
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "restarts": self.restarts,
            "learned_kept": self.learned_kept,
            "learned_deleted": self.learned_deleted,
        }
        if self.model is not None:
            d["model"] = [v if self.model[v] else -v for v in sorted(self.model)]
        return d


# ------------------------------------------------------------- primitives

def luby(i: int) -> int:
    """The i-th element of the Luby sequence (1,1,2,1,1,2,4,...), i >= 1."""
    if i < 1:
        raise ValueError("luby is defined for i >= 1")
    x = i - 1
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        seq -= 1
        x %= size
    return 1 << seq


def compute_lbd(lits: Iterable[int], level_of: Callable[[int], int]) -> int:
    """Number of distinct decision levels among the clause's literals."""
    levels = set()
    for l in lits:
        lvl = level_of(abs(l))
        if lvl is None:
            raise ValueError(f"literal {l} is unassigned")
        levels.add(lvl)
    return len(levels)


def glucose_restart_due(
    recent_lbds: Iterable[int], window: int, global_lbd_mean: float, margin: float
) -> bool:
    """True iff the recent-LBD window is full and its scaled mean exceeds
    the global mean."""
    recent = list(recent_lbds)
    if len(recent) < window:
        return False
    return (sum(recent) / len(recent)) * margin > global_lbd_mean


@dataclass
class LearnedClauseMeta:
    """Bookkeeping for one learned clause."""

    lits: list[int]
    lbd_current: int
    lbd_cut: int  # lowest LBD observed so far
    activity: float = 0.0

    @property
    def size(self) -> int:
        return len(self.lits)

    def update_lbd(self, new_lbd: int):
        self.lbd_current = new_lbd
        if new_lbd < self.lbd_cut:
            self.lbd_cut = new_lbd


def reduce_database(
    learned: list[LearnedClauseMeta],
    criterion: DeletionPolicy,
    protected: frozenset[int] = frozenset(),
) -> tuple[list[LearnedClauseMeta], list[LearnedClauseMeta]]:
    """Partition learned clauses into (kept, deleted).

    Clauses meeting the keep criterion are kept unconditionally, as are
    clauses whose id() is in `protected` (current propagation antecedents).
    Of the remainder, the lowest-activity half is deleted.
    """
    saved, candidates = [], []
    for c in learned:
        if criterion.keeps(c) or id(c) in protected:
            saved.append(c)
        else:
            candidates.append(c)
    candidates.sort(key=lambda c: c.activity)
    half = len(candidates) // 2
    deleted = candidates[:half]
    kept = saved + candidates[half:]
    return kept, deleted


# ------------------------------------------------------------------ CDCL

_UNASSIGNED = -1


class _Solver:
    def __init__(self, formula: CnfFormula, config: SolverConfig):
        self.formula = formula
        self.config = config
        self.n = formula.num_vars
        self.rng = random.Random(config.seed)

        self.value = [_UNASSIGNED] * (self.n + 1)  # 0/1/_UNASSIGNED
        self.level = [0] * (self.n + 1)
        self.reason: list[list[int] | None] = [None] * (self.n + 1)
        self.reason_meta: list[LearnedClauseMeta | None] = [None] * (self.n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0

        self.activity = [0.0] * (self.n + 1)
        self.var_inc = 1.0
        self.saved_phase = [bool(self.rng.getrandbits(1)) for _ in range(self.n + 1)]

        # watches: literal -> list of clause records; a record is
        # (lits, meta) with meta None for problem clauses
        self.watches: dict[int, list] = {}
        self.learned: list[LearnedClauseMeta] = []

        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.restart_count = 0
        self.learned_deleted_total = 0

        self.luby_index = 1
        self.conflicts_since_restart = 0
        self.recent_lbds: list[int] = []
        self.lbd_sum = 0
        self.lbd_count = 0
        self.conflicts_since_reduce = 0

        self.unsat = False
        self.units: list[int] = []
        self.clauses: list[list[int]] = []
        for lits in formula.clause_lists():
            if len(lits) == 0:
                self.unsat = True
            elif len(lits) == 1:
                self.units.append(lits[0])
            else:
                self.clauses.append(list(lits))

    # ---- assignment plumbing

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        if v == _UNASSIGNED:
            return _UNASSIGNED
        return v if lit > 0 else 1 - v

    def current_level(self) -> int:
        return len(self.trail_lim)

    def enqueue(self, lit: int, reason=None, meta=None) -> bool:
        v = abs(lit)
        val = self.lit_value(lit)
        if val == 0:
            return False
        if val == _UNASSIGNED:
            self.value[v] = 1 if lit > 0 else 0
            self.level[v] = self.current_level()
            self.reason[v] = reason
            self.reason_meta[v] = meta
            self.trail.append(lit)
        return True

    def watch(self, lits: list[int], meta):
        rec = (lits, meta)
        self.watches.setdefault(lits[0], []).append(rec)
        self.watches.setdefault(lits[1], []).append(rec)

    def attach_all(self):
        self.watches = {}
        for lits in self.clauses:
            self.watch(lits, None)
        for meta in self.learned:
            self.watch(meta.lits, meta)

    # ---- propagation

    def propagate(self):
        """Exhaustive unit propagation; returns a conflicting record or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            falsified = -lit
            watchlist = self.watches.get(falsified, [])
            i = 0
            while i < len(watchlist):
                rec = watchlist[i]
                lits, meta = rec
                # normalize: falsified literal at position 1
                if lits[0] == falsified:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if self.lit_value(first) == 1:
                    i += 1
                    continue
                # look for a replacement watch
                moved = False
                for j in range(2, len(lits)):
                    if self.lit_value(lits[j]) != 0:
                        lits[1], lits[j] = lits[j], lits[1]
                        self.watches.setdefault(lits[1], []).append(rec)
                        watchlist[i] = watchlist[-1]
                        watchlist.pop()
                        moved = True
                        break
                if moved:
                    continue
                # unit or conflicting
                if self.lit_value(first) == 0:
                    return rec
                self.enqueue(first, lits, meta)
                i += 1
        return None

    # ---- VSIDS

    def bump_var(self, v: int):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100

    def decay_activities(self):
        self.var_inc /= self.config.decay

    def pick_branch_var(self) -> int | None:
        best_v = None
        best_a = -1.0
        ties = 0
        for v in range(1, self.n + 1):
            if self.value[v] != _UNASSIGNED:
                continue
            a = self.activity[v]
            if a > best_a:
                best_v, best_a, ties = v, a, 1
            elif a == best_a:
                # reservoir-style random tie-break, deterministic in seed
                ties += 1
                if self.rng.random() < 1.0 / ties:
                    best_v = v
        return best_v

    # ---- conflict analysis (first UIP)

    def analyze(self, conflict_rec) -> tuple[list[int], int, int]:
        """Learn a first-UIP clause; returns (clause, backjump level, lbd)."""
        learned: list[int] = [0]  # slot 0 for the asserting literal
        seen = [False] * (self.n + 1)
        counter = 0
        lits, meta = conflict_rec
        trail_idx = len(self.trail) - 1
        asserting = None
        cur_level = self.current_level()

        while True:
            if meta is not None:
                meta.activity += 1.0
                meta.update_lbd(compute_lbd(meta.lits, lambda v: self.level[v]))
            for l in lits:
                if l == asserting:
                    continue
                v = abs(l)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self.bump_var(v)
                    if self.level[v] == cur_level:
                        counter += 1
                    else:
                        learned.append(l)
            # walk back to the next marked trail literal
            while not seen[abs(self.trail[trail_idx])]:
                trail_idx -= 1
            p = self.trail[trail_idx]
            trail_idx -= 1
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                learned[0] = -p
                break
            lits = self.reason[abs(p)]
            meta = self.reason_meta[abs(p)]
            asserting = p

        # backjump level: highest level among the non-asserting literals
        if len(learned) == 1:
            bj = 0
        else:
            bj = max(self.level[abs(l)] for l in learned[1:])
        lbd = compute_lbd(learned, lambda v: self.level[v])
        return learned, bj, lbd

    def backjump(self, target_level: int):
        while self.trail and self.level[abs(self.trail[-1])] > target_level:
            lit = self.trail.pop()
            v = abs(lit)
            self.saved_phase[v] = self.value[v] == 1
            self.value[v] = _UNASSIGNED
            self.reason[v] = None
            self.reason_meta[v] = None
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    # ---- restarts

    def restart_due(self) -> bool:
        r = self.config.restart
        if isinstance(r, LubyRestarts):
            return self.conflicts_since_restart >= luby(self.luby_index) * r.base_interval
        return glucose_restart_due(
            self.recent_lbds, r.window, self.global_lbd_mean(), r.margin
        )

    def global_lbd_mean(self) -> float:
        return self.lbd_sum / self.lbd_count if self.lbd_count else 0.0

    def do_restart(self):
        self.backjump(0)
        self.restart_count += 1
        self.conflicts_since_restart = 0
        self.recent_lbds.clear()
        if isinstance(self.config.restart, LubyRestarts):
            self.luby_index += 1

    # ---- database reduction

    def reduce_learned(self):
        protected = frozenset(
            id(m) for m in self.reason_meta if m is not None
        )
        kept, deleted = reduce_database(self.learned, self.config.deletion, protected)
        if deleted:
            self.learned = kept
            self.learned_deleted_total += len(deleted)
            self.attach_all()
            # rebuilt watches may sit on falsified literals; re-propagating
            # the whole trail restores the watch invariant
            self.qhead = 0
        for m in self.learned:
            m.activity *= 0.999

    # ---- main loop

    def solve(self) -> SolveStats:
        if self.unsat:
            return self._stats("UNSAT", None)
        for u in self.units:
            if not self.enqueue(u, None, None):
                return self._stats("UNSAT", None)
        self.attach_all()

        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.conflicts += 1
                self.conflicts_since_restart += 1
                self.conflicts_since_reduce += 1
                if self.current_level() == 0:
                    return self._stats("UNSAT", None)
                learned, bj, lbd = self.analyze(conflict)
                self.backjump(bj)
                self.lbd_sum += lbd
                self.lbd_count += 1
                self.recent_lbds.append(lbd)
                r = self.config.restart
                if isinstance(r, GlucoseRestarts) and len(self.recent_lbds) > r.window:
                    self.recent_lbds.pop(0)
                if len(learned) == 1:
                    self.enqueue(learned[0], None, None)
                else:
                    meta = LearnedClauseMeta(
                        lits=learned, lbd_current=lbd, lbd_cut=lbd, activity=1.0
                    )
                    self.learned.append(meta)
                    self.watch(learned, meta)
                    self.enqueue(learned[0], learned, meta)
                self.decay_activities()
                if (
                    self.config.conflict_budget is not None
                    and self.conflicts >= self.config.conflict_budget
                ):
                    return self._stats("BUDGET", None)
                if self.conflicts_since_reduce >= self.config.reduce_interval:
                    self.conflicts_since_reduce = 0
                    self.reduce_learned()
                continue

            if self.restart_due():
                self.do_restart()
                continue

            v = self.pick_branch_var()
            if v is None:
                model = {
                    u: self.value[u] == 1 for u in range(1, self.n + 1)
                }
                assert evaluate(self.formula, model), "model failed verification"
                return self._stats("SAT", model)
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            lit = v if self.saved_phase[v] else -v
            self.enqueue(lit, None, None)

    def _stats(self, result: str, model) -> SolveStats:
        return SolveStats(
            result=result,
            model=model,
            conflicts=self.conflicts,
            decisions=self.decisions,
            propagations=self.propagations,
            restarts=self.restart_count,
            learned_kept=len(self.learned),
            learned_deleted=self.learned_deleted_total,
        )


def solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveStats:
    """Solve a formula under the given heuristic configuration.

    Deterministic for a fixed (formula, config) pair including the seed.
    SAT models are verified against the formula before being returned.
    """
    return _Solver(formula, config or SolverConfig()).solve()
