import math
import random

import pytest

from satentropy.stats import (
    BootstrapResult,
    beta_gap_entropy_vs_density,
    bootstrap,
    delta_beta_test,
    delta_test,
    mean,
    normal_cdf,
    ols,
    pearson,
    standardize,
)


# slope, intercept, beta_std worked out by hand from the normal equations
HAND_DATASETS = [
    ([0, 1, 2], [0, 1, 2], 1.0, 0.0, 0.0),
    ([0, 1, 2], [1, 1, 1], 0.0, 1.0, 0.0),
    ([0, 1, 2, 3], [0, 2, 3, 5], 1.6, 0.1, math.sqrt(0.02)),
    ([1, 2, 3, 4, 5], [2, 2, 4, 4, 6], 1.0, 0.6, 0.2),
    ([-1, 0, 1], [1, 0, 1], 0.0, 2.0 / 3.0, math.sqrt(1.0 / 3.0)),
]


class TestStandardize:
    def test_three_points(self):
        assert standardize([1, 2, 3]) == pytest.approx([-1, 0, 1], abs=1e-12)

    def test_mean_zero_sd_one(self, rng):
        xs = [rng.gauss(5, 3) for _ in range(200)]
        zs = standardize(xs)
        assert abs(mean(zs)) < 1e-12
        var = sum(z * z for z in zs) / (len(zs) - 1)
        assert abs(math.sqrt(var) - 1.0) < 1e-12

    def test_idempotent(self, rng):
        xs = [rng.random() for _ in range(50)]
        once = standardize(xs)
        twice = standardize(once)
        assert all(abs(a - b) < 1e-12 for a, b in zip(once, twice))

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            standardize([3, 3, 3])

    def test_population_flag(self):
        zs = standardize([1, 2, 3], population=True)
        sd = math.sqrt(sum(z * z for z in zs) / 3)
        assert abs(sd - 1.0) < 1e-12


class TestOls:
    @pytest.mark.parametrize("xs,ys,beta,intercept,beta_std", HAND_DATASETS)
    def test_hand_derived(self, xs, ys, beta, intercept, beta_std):
        r = ols(xs, ys)
        assert r.beta == pytest.approx(beta, abs=1e-10)
        assert r.intercept == pytest.approx(intercept, abs=1e-10)
        assert r.beta_std == pytest.approx(beta_std, abs=1e-10)

    def test_perfect_line(self):
        r = ols([0, 1, 2], [0, 1, 2])
        assert r.beta == 1.0
        assert r.intercept == 0.0
        assert r.p_two_sided == 0.0

    def test_z_times_std_is_beta(self):
        r = ols([0, 1, 2, 3], [0, 2, 3, 5])
        assert abs(r.z * r.beta_std - r.beta) < 1e-12

    def test_ci_contains_beta(self):
        r = ols([0, 1, 2, 3], [0, 2, 3, 5])
        assert r.ci95[0] <= r.beta <= r.ci95[1]

    def test_intercept_shift(self, rng):
        xs = [rng.random() for _ in range(20)]
        ys = [rng.random() for _ in range(20)]
        r1 = ols(xs, ys)
        r2 = ols(xs, [y + 10 for y in ys])
        assert r2.beta == pytest.approx(r1.beta, abs=1e-12)
        assert r2.intercept == pytest.approx(r1.intercept + 10, abs=1e-10)

    def test_standardized_slope_is_pearson(self, rng):
        xs = [rng.gauss(0, 1) for _ in range(100)]
        ys = [2 * x + rng.gauss(0, 1) for x in xs]
        r = ols(standardize(xs), standardize(ys))
        assert r.beta == pytest.approx(pearson(xs, ys), abs=1e-10)

    def test_two_sided_one_sided_relation(self, rng):
        for _ in range(20):
            xs = [rng.gauss(0, 1) for _ in range(10)]
            ys = [rng.gauss(0, 1) for _ in range(10)]
            r = ols(xs, ys)
            expect = 2 * min(r.p_one_sided, 1 - r.p_one_sided)
            assert r.p_two_sided == pytest.approx(expect, abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            ols([1, 2], [1, 2])
        with pytest.raises(ValueError):
            ols([1, 2, 3], [1, 2])
        with pytest.raises(ValueError):
            ols([2, 2, 2], [1, 2, 3])

    def test_one_sided_direction(self):
        down = ols([0, 1, 2, 3], [5, 4, 3.2, 2], h1="less")
        assert down.p_one_sided < 0.5
        up = ols([0, 1, 2, 3], [5, 4, 3.2, 2], h1="greater")
        assert up.p_one_sided > 0.5


class TestNormalCdf:
    def test_center(self):
        assert normal_cdf(0.0) == 0.5

    def test_quantile(self):
        assert normal_cdf(-1.959964) == pytest.approx(0.025, abs=1e-5)

    def test_symmetry(self, rng):
        for _ in range(100):
            z = rng.uniform(-6, 6)
            assert normal_cdf(z) + normal_cdf(-z) == pytest.approx(1.0, abs=1e-10)


class TestBootstrap:
    def test_single_iteration(self):
        r = bootstrap([(1.0,), (2.0,)], lambda s: mean([t[0] for t in s]), 1, 0)
        assert len(r.per_iteration) == 1

    def test_constant_statistic(self):
        rows = [(5.0,)] * 10
        r = bootstrap(rows, lambda s: mean([t[0] for t in s]), 50, 1)
        assert all(v == 5.0 for v in r.per_iteration)
        assert r.ci95_percentile == (5.0, 5.0)

    def test_point_count(self):
        rows = [(float(i), float(i)) for i in range(100)]
        r = bootstrap(rows, lambda s: 0.0, 37, 2)
        assert r.points_sampled == 100 * 37

    def test_deterministic_in_seed(self):
        rows = [(float(i),) for i in range(20)]
        stat = lambda s: mean([t[0] for t in s])
        assert bootstrap(rows, stat, 30, 9) == bootstrap(rows, stat, 30, 9)
        assert (
            bootstrap(rows, stat, 30, 9).per_iteration
            != bootstrap(rows, stat, 30, 10).per_iteration
        )

    def test_noiseless_line_slope_constant(self, rng):
        rows = [(x, 3.0 * x - 1.0) for x in range(10)]

        def slope(sample):
            return ols([r[0] for r in sample], [r[1] for r in sample]).beta

        r = bootstrap(rows, slope, 50, 4)
        for v in r.per_iteration:
            assert v == pytest.approx(3.0, abs=1e-9)
        # degenerate resamples (constant x) are skipped, not errored
        assert r.skipped + len(r.per_iteration) == 50


class TestDeltaTest:
    def test_identical_heuristics(self):
        m = [0.1, 0.5, 0.9, 0.3]
        c = [3.0, 1.0, 2.0, 4.0]
        r = delta_test(m, c, c)
        assert r.beta == 0.0
        assert r.p_two_sided == 1.0

    def test_constructed_identity(self):
        m = [0.0, 1.0, 2.0, 3.0]
        c2 = [5.0, 5.0, 5.0, 5.0]
        c1 = [c + x for c, x in zip(c2, m)]
        r = delta_test(m, c1, c2, standardize_inputs=False)
        assert r.beta == pytest.approx(1.0, abs=1e-12)

    def test_planted_slope_recovered(self):
        hits = 0
        trials = 200
        for t in range(trials):
            rng = random.Random(t)
            m = [rng.gauss(0, 1) for _ in range(80)]
            c2 = [rng.gauss(0, 1) for _ in m]
            c1 = [c - 2 * x + rng.gauss(0, 0.5) for c, x in zip(c2, m)]
            r = delta_test(m, c1, c2, standardize_inputs=False)
            if r.ci95[0] <= -2.0 <= r.ci95[1]:
                hits += 1
        assert hits / trials >= 0.93


class TestDeltaBetaTest:
    def test_identical_series_gap_zero(self):
        m = [0.1, 0.4, 0.7, 0.9, 0.2, 0.6]
        c = [5.0, 3.0, 2.0, 1.0, 4.0, 2.5]
        r = delta_beta_test(m, c, c, k=100, seed=0)
        assert r.gap_ci95 == (0.0, 0.0)
        assert r.gap_p == 1.0

    def test_shift_invariance_of_slope(self):
        m = [0.0, 1.0, 2.0, 3.0, 4.0]
        c1 = [1.0, 3.0, 4.0, 7.0, 8.0]
        c2 = [c + 5.0 for c in c1]
        r = delta_beta_test(m, c1, c2, k=200, seed=1, standardize_inputs=False)
        assert r.gap_ci95 == pytest.approx((0.0, 0.0), abs=1e-9)
        assert r.intercept_gap_ci95[0] == pytest.approx(-5.0, abs=1e-9)

    def test_opposed_planted_slopes_detected(self):
        rng = random.Random(3)
        m = [rng.gauss(0, 1) for _ in range(100)]
        c1 = [x + rng.gauss(0, 0.2) for x in m]
        c2 = [-x + rng.gauss(0, 0.2) for x in m]
        r = delta_beta_test(m, c1, c2, k=500, seed=3, standardize_inputs=False)
        assert r.gap_ci95[0] > 0.0
        assert r.gap_p < 0.01


class TestBetaGapEntropyVsDensity:
    def test_equal_measures_gap_zero(self):
        rng = random.Random(4)
        e = [rng.random() for _ in range(50)]
        c = [rng.random() for _ in range(50)]
        r = beta_gap_entropy_vs_density(e, list(e), c, k=100, seed=4)
        assert r.gap_ci95 == (0.0, 0.0)

    def test_planted_entropy_effect(self):
        rng = random.Random(5)
        e = [rng.random() for _ in range(200)]
        d = [rng.random() for _ in range(200)]
        c = [300 - 80 * x + rng.gauss(0, 5) for x in e]
        r = beta_gap_entropy_vs_density(e, d, c, k=400, seed=5)
        assert not (r.gap_ci95[0] <= 0.0 <= r.gap_ci95[1])

    def test_null_calibration(self):
        # conflicts independent of both measures: small p should be rare
        false_pos = 0
        reps = 100
        for t in range(reps):
            rng = random.Random(1000 + t)
            e = [rng.random() for _ in range(60)]
            d = [rng.random() for _ in range(60)]
            c = [rng.random() for _ in range(60)]
            r = beta_gap_entropy_vs_density(e, d, c, k=200, seed=t)
            if r.gap_p < 0.05:
                false_pos += 1
        assert false_pos / reps <= 0.10
