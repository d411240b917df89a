"""Solution-space profiling: literal ratios, entropy, density, backbones."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cnf import CnfFormula
from .counter import (
    CountBudget,
    conditioned_formula,
    count_models,
    find_model,
)


class UnsatisfiableFormula(ValueError):
    """Entropy, density and backbones are defined only for satisfiable formulas."""


@dataclass(frozen=True)
class VariableProfile:
    var: int
    ratio_pos: Fraction
    entropy: float
    is_backbone: bool


@dataclass(frozen=True)
class FormulaProfile:
    num_vars: int
    model_count: int
    entropy: float
    density: float
    backbone_count: int
    variables: tuple[VariableProfile, ...]

    def to_dict(self) -> dict:
        return {
            "vars": self.num_vars,
            "model_count": str(self.model_count),
            "entropy": self.entropy,
            "density": self.density,
            "backbone_count": self.backbone_count,
            "per_var": [
                {
                    "v": p.var,
                    "r": float(p.ratio_pos),
                    "r_exact": str(p.ratio_pos),
                    "e": p.entropy,
                }
                for p in self.variables
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FormulaProfile":
        variables = []
        for p in d["per_var"]:
            r = Fraction(p["r_exact"]) if "r_exact" in p else Fraction(p["r"])
            variables.append(
                VariableProfile(
                    var=p["v"],
                    ratio_pos=r,
                    entropy=p["e"],
                    is_backbone=r == 0 or r == 1,
                )
            )
        variables = tuple(variables)
        return cls(
            num_vars=d["vars"],
            model_count=int(d["model_count"]),
            entropy=d["entropy"],
            density=d["density"],
            backbone_count=d["backbone_count"],
            variables=variables,
        )


def literal_ratio(formula: CnfFormula, var: int, total: int) -> Fraction:
    """Fraction of solutions that set `var` true, as an exact rational."""
    if total <= 0:
        raise UnsatisfiableFormula("entropy undefined for unsatisfiable formula")
    return Fraction(count_models(conditioned_formula(formula, var)), total)


def variable_entropy(r) -> float:
    """Binary entropy of a ratio in [0,1], with 0*log2(0) taken as 0."""
    r = Fraction(r) if not isinstance(r, Fraction) else r
    if r < 0 or r > 1:
        raise ValueError(f"ratio {r} outside [0,1]")
    if r == 0 or r == 1:
        return 0.0
    rf = float(r)
    return -rf * math.log2(rf) - (1.0 - rf) * math.log2(1.0 - rf)


def profile_formula(
    formula: CnfFormula,
    count_fn: Callable[[CnfFormula], int] | None = None,
    budget: CountBudget | None = None,
) -> FormulaProfile:
    """Full solution-space profile of a satisfiable formula.

    Issues exactly num_vars + 1 calls to the model counter: one for the
    unconditioned count, one per variable for the count conditioned on its
    positive literal.
    """
    if count_fn is None:
        count_fn = lambda f: count_models(f, budget)
    total = count_fn(formula)
    if total == 0:
        raise UnsatisfiableFormula("entropy undefined for unsatisfiable formula")

    variables = []
    for v in range(1, formula.num_vars + 1):
        pos = count_fn(conditioned_formula(formula, v))
        r = Fraction(pos, total)
        variables.append(
            VariableProfile(
                var=v,
                ratio_pos=r,
                entropy=variable_entropy(r),
                is_backbone=r == 0 or r == 1,
            )
        )

    n = formula.num_vars
    mean_entropy = sum(p.entropy for p in variables) / n if n else 1.0
    return FormulaProfile(
        num_vars=n,
        model_count=total,
        entropy=mean_entropy,
        density=float(Fraction(total, 1 << n)),
        backbone_count=sum(p.is_backbone for p in variables),
        variables=tuple(variables),
    )


def backbone(formula: CnfFormula) -> set[int]:
    """The set of literals true in every solution, via conditioned counts."""
    total = count_models(formula)
    if total == 0:
        raise UnsatisfiableFormula("backbone undefined for unsatisfiable formula")
    result = set()
    for v in range(1, formula.num_vars + 1):
        pos = count_models(conditioned_formula(formula, v))
        if pos == total:
            result.add(v)
        elif pos == 0:
            result.add(-v)
    return result


def backbone_size(formula: CnfFormula, abort_above: int | None = None) -> int:
    """Number of backbone variables, via satisfiability probes.

    Cheaper than backbone() because each probe can stop at the first model.
    A literal l is backbone iff formula AND NOT l is unsatisfiable. With
    abort_above set, returns early with abort_above + 1 once exceeded.
    """
    model = find_model(formula)
    if model is None:
        raise UnsatisfiableFormula("backbone undefined for unsatisfiable formula")
    count = 0
    for v in range(1, formula.num_vars + 1):
        # only the polarity seen in the model can be backbone
        lit = v if model[v] else -v
        if find_model(conditioned_formula(formula, -lit)) is None:
            count += 1
            if abort_above is not None and count > abort_above:
                return count
    return count
