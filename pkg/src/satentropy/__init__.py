"""Entropy and solution density of satisfiable CNF formulas, a heuristic-
configurable CDCL solver, and the statistics to relate the two."""

from .cnf import Clause, CnfFormula, DimacsError, evaluate, parse_dimacs, write_dimacs
from .counter import (
    BudgetExceeded,
    CountBudget,
    count_conditioned,
    count_models,
    count_models_bruteforce,
)
from .entropy import (
    FormulaProfile,
    UnsatisfiableFormula,
    VariableProfile,
    backbone,
    literal_ratio,
    profile_formula,
    variable_entropy,
)
from .solver import (
    GlucoseRestarts,
    KeepLbdCutAtMost,
    KeepSizeAtMost,
    LubyRestarts,
    SolveStats,
    SolverConfig,
    compute_lbd,
    glucose_restart_due,
    luby,
    reduce_database,
    solve,
)

__all__ = [
    "Clause",
    "CnfFormula",
    "DimacsError",
    "evaluate",
    "parse_dimacs",
    "write_dimacs",
    "BudgetExceeded",
    "CountBudget",
    "count_conditioned",
    "count_models",
    "count_models_bruteforce",
    "FormulaProfile",
    "UnsatisfiableFormula",
    "VariableProfile",
    "backbone",
    "literal_ratio",
    "profile_formula",
    "variable_entropy",
    "GlucoseRestarts",
    "KeepLbdCutAtMost",
    "KeepSizeAtMost",
    "LubyRestarts",
    "SolveStats",
    "SolverConfig",
    "compute_lbd",
    "glucose_restart_due",
    "luby",
    "reduce_database",
    "solve",
]

__version__ = "0.1.0"
