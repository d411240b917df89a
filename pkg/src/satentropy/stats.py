"""Standardization, simple OLS with normal p-values, bootstrap, and the
slope-comparison tests used to compare heuristic pairs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erf."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def sample_std(xs: Sequence[float], population: bool = False) -> float:
    m = mean(xs)
    ddof = 0 if population else 1
    return math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - ddof))


def standardize(xs: Sequence[float], population: bool = False) -> list[float]:
    """Shift and scale to mean 0, standard deviation 1 (sample sd by default)."""
    if len(xs) < 2:
        raise ValueError("standardization needs at least 2 values")
    s = sample_std(xs, population)
    if s == 0.0:
        raise ValueError("cannot standardize a constant series")
    m = mean(xs)
    return [(x - m) / s for x in xs]


@dataclass(frozen=True)
class RegressionResult:
    beta: float
    intercept: float
    beta_std: float
    z: float
    p_two_sided: float
    p_one_sided: float
    ci95: tuple[float, float]


def ols(
    xs: Sequence[float], ys: Sequence[float], h1: str = "less"
) -> RegressionResult:
    """Least-squares line fit with a z-test of slope = 0.

    h1 selects the one-sided alternative: "less" (slope < 0) reports
    Phi(z), "greater" reports 1 - Phi(z).
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError("series length mismatch")
    if n < 3:
        raise ValueError("regression needs at least 3 points")
    xbar, ybar = mean(xs), mean(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("x series is constant")
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    beta = sxy / sxx
    intercept = ybar - beta * xbar
    sse = sum((y - (intercept + beta * x)) ** 2 for x, y in zip(xs, ys))
    beta_std = math.sqrt(max(sse, 0.0) / (n - 2) / sxx)
    if beta_std == 0.0:
        z = 0.0 if beta == 0.0 else math.copysign(math.inf, beta)
    else:
        z = beta / beta_std
    p_two = 2.0 * normal_cdf(-abs(z)) if math.isfinite(z) else (1.0 if beta == 0 else 0.0)
    phi = normal_cdf(z) if math.isfinite(z) else (0.0 if z < 0 else 1.0)
    p_one = phi if h1 == "less" else 1.0 - phi
    return RegressionResult(
        beta=beta,
        intercept=intercept,
        beta_std=beta_std,
        z=z,
        p_two_sided=min(p_two, 1.0),
        p_one_sided=p_one,
        ci95=(beta - 1.96 * beta_std, beta + 1.96 * beta_std),
    )


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    xbar, ybar = mean(xs), mean(ys)
    num = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    den = math.sqrt(
        sum((x - xbar) ** 2 for x in xs) * sum((y - ybar) ** 2 for y in ys)
    )
    return num / den


def percentile(sorted_vals: Sequence[float], q: float) -> float:
    """Linear-interpolation percentile of pre-sorted values, q in [0,1]."""
    n = len(sorted_vals)
    if n == 1:
        return sorted_vals[0]
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return sorted_vals[lo] * (1 - frac) + sorted_vals[hi] * frac


@dataclass(frozen=True)
class BootstrapResult:
    k: int
    per_iteration: tuple[float, ...]
    ci95_percentile: tuple[float, float]
    p_value: float
    points_sampled: int
    skipped: int


def _percentile_two_sided_p(values: Sequence[float]) -> float:
    """2 * min(fraction <= 0, fraction >= 0), clamped to [0,1]."""
    n = len(values)
    le = sum(1 for v in values if v <= 0.0)
    ge = sum(1 for v in values if v >= 0.0)
    return min(1.0, 2.0 * min(le / n, ge / n))


def bootstrap(
    rows: Sequence[tuple],
    statistic: Callable[[list[tuple]], float],
    k: int,
    seed: int,
) -> BootstrapResult:
    """Percentile bootstrap of a statistic over rows of data.

    Each of the k iterations draws len(rows) row indices uniformly with
    replacement and applies the statistic to the resampled rows. Iterations
    where the statistic raises ValueError (degenerate resample, e.g. a
    constant x column) are skipped and counted. Deterministic in seed.
    """
    n = len(rows)
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 rows and k >= 1 iterations")
    master = random.Random(seed)
    per_iter: list[float] = []
    skipped = 0
    points = 0
    for _ in range(k):
        rng = random.Random(master.getrandbits(64))
        idx = [rng.randrange(n) for _ in range(n)]
        points += n
        sample = [rows[i] for i in idx]
        try:
            per_iter.append(statistic(sample))
        except ValueError:
            skipped += 1
    if not per_iter:
        raise ValueError("all bootstrap iterations were degenerate")
    s = sorted(per_iter)
    return BootstrapResult(
        k=k,
        per_iteration=tuple(per_iter),
        ci95_percentile=(percentile(s, 0.025), percentile(s, 0.975)),
        p_value=_percentile_two_sided_p(per_iter),
        points_sampled=points,
        skipped=skipped,
    )


@dataclass(frozen=True)
class BetaGapResult:
    """Comparison of the regression slopes of two response series against
    one measure, under a shared bootstrap resampling."""

    beta_a: RegressionResult
    beta_b: RegressionResult
    gap_ci95: tuple[float, float]
    gap_p: float
    intercept_gap_ci95: tuple[float, float]
    intercept_gap_p: float
    beta_a_ci95: tuple[float, float]
    beta_b_ci95: tuple[float, float]
    skipped: int


def delta_test(
    measure: Sequence[float],
    conflicts_a: Sequence[float],
    conflicts_b: Sequence[float],
    standardize_inputs: bool = True,
) -> RegressionResult:
    """Regression of the per-point conflict gap (a - b) on the measure."""
    if not len(measure) == len(conflicts_a) == len(conflicts_b):
        raise ValueError("series length mismatch")
    xs = list(measure)
    ca, cb = list(conflicts_a), list(conflicts_b)
    if standardize_inputs:
        xs = standardize(xs)
        ca = standardize(ca)
        cb = standardize(cb)
    diffs = [a - b for a, b in zip(ca, cb)]
    if all(d == 0.0 for d in diffs):
        # identical heuristics: flat zero fit with no evidence against H0
        return RegressionResult(
            beta=0.0,
            intercept=0.0,
            beta_std=0.0,
            z=0.0,
            p_two_sided=1.0,
            p_one_sided=0.5,
            ci95=(0.0, 0.0),
        )
    return ols(xs, diffs)


def _paired_slope_bootstrap(
    xa: Sequence[float],
    ya: Sequence[float],
    xb: Sequence[float],
    yb: Sequence[float],
    k: int,
    seed: int,
) -> BetaGapResult:
    """Bootstrap the gap between two regression slopes with shared indices."""
    fit_a = ols(list(xa), list(ya))
    fit_b = ols(list(xb), list(yb))

    rows = list(zip(xa, ya, xb, yb))
    n = len(rows)
    master = random.Random(seed)
    gaps: list[float] = []
    int_gaps: list[float] = []
    betas_a: list[float] = []
    betas_b: list[float] = []
    skipped = 0
    for _ in range(k):
        rng = random.Random(master.getrandbits(64))
        idx = [rng.randrange(n) for _ in range(n)]
        sample = [rows[i] for i in idx]
        sxa = [r[0] for r in sample]
        sya = [r[1] for r in sample]
        sxb = [r[2] for r in sample]
        syb = [r[3] for r in sample]
        try:
            ra = ols(sxa, sya)
            rb = ols(sxb, syb)
        except ValueError:
            skipped += 1
            continue
        gaps.append(ra.beta - rb.beta)
        int_gaps.append(ra.intercept - rb.intercept)
        betas_a.append(ra.beta)
        betas_b.append(rb.beta)
    if not gaps:
        raise ValueError("all bootstrap iterations were degenerate")
    sg = sorted(gaps)
    si = sorted(int_gaps)
    sa = sorted(betas_a)
    sb = sorted(betas_b)
    return BetaGapResult(
        beta_a=fit_a,
        beta_b=fit_b,
        gap_ci95=(percentile(sg, 0.025), percentile(sg, 0.975)),
        gap_p=_percentile_two_sided_p(gaps),
        intercept_gap_ci95=(percentile(si, 0.025), percentile(si, 0.975)),
        intercept_gap_p=_percentile_two_sided_p(int_gaps),
        beta_a_ci95=(percentile(sa, 0.025), percentile(sa, 0.975)),
        beta_b_ci95=(percentile(sb, 0.025), percentile(sb, 0.975)),
        skipped=skipped,
    )


def delta_beta_test(
    measure: Sequence[float],
    conflicts_a: Sequence[float],
    conflicts_b: Sequence[float],
    k: int = 1000,
    seed: int = 0,
    standardize_inputs: bool = True,
) -> BetaGapResult:
    """Compare the slopes of conflicts_a-vs-measure and conflicts_b-vs-measure.

    Both fits share each bootstrap iteration's resample indices, and the
    reported gap statistics are percentile CIs / two-sided p-values over
    the k slope differences. The intercept difference is reported under the
    same resampling.
    """
    if not len(measure) == len(conflicts_a) == len(conflicts_b):
        raise ValueError("series length mismatch")
    xs = list(measure)
    ca, cb = list(conflicts_a), list(conflicts_b)
    if standardize_inputs:
        xs = standardize(xs)
        ca = standardize(ca)
        cb = standardize(cb)
    return _paired_slope_bootstrap(xs, ca, xs, cb, k, seed)


def beta_gap_entropy_vs_density(
    entropy: Sequence[float],
    density: Sequence[float],
    conflicts: Sequence[float],
    k: int = 1000,
    seed: int = 0,
    standardize_inputs: bool = True,
) -> BetaGapResult:
    """Compare the entropy-vs-conflicts slope with the density-vs-conflicts
    slope for a single solver, bootstrapping their gap with shared indices."""
    if not len(entropy) == len(density) == len(conflicts):
        raise ValueError("series length mismatch")
    e, d, c = list(entropy), list(density), list(conflicts)
    if standardize_inputs:
        e = standardize(e)
        d = standardize(d)
        c = standardize(c)
    return _paired_slope_bootstrap(e, c, d, c, k, seed)
