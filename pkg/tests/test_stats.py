"""Statistics against scipy oracles plus the structural group operations."""

import math
from datetime import datetime, timezone, timedelta

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from espim import stats
from espim.stats import (
    ConstantInputError,
    EmptyInputError,
    MissingKeyError,
    ScheduleLabel,
    TooFewSamplesError,
    UnsortedResolutionsError,
    ZeroVarianceError,
    descriptives,
    paired_t_test,
    pearson,
    regularized_incomplete_beta,
    resolution_diff,
    split_by_schedule,
    split_by_threshold,
    student_t_two_sided_p,
    symptom_tally,
)

finite_floats = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)


class TestIncompleteBeta:
    @given(
        a=st.floats(0.5, 50),
        b=st.floats(0.5, 50),
        x=st.floats(0, 1),
    )
    @settings(max_examples=300)
    def test_matches_scipy(self, a, b, x):
        # 1e-8 absolute is the accuracy target; near x = 1 scipy itself
        # carries a few 1e-9 of error, so tighter bounds compare noise
        ours = regularized_incomplete_beta(a, b, x)
        ref = float(scipy.special.betainc(a, b, x))
        assert abs(ours - ref) < 1e-8

    def test_bounds(self):
        assert regularized_incomplete_beta(2, 3, 0) == 0.0
        assert regularized_incomplete_beta(2, 3, 1) == 1.0

    def test_p_value_accuracy_over_realistic_range(self):
        for df in (1, 2, 5, 15, 34, 100):
            for t in (0.0, 0.5, 1.0, 2.0, 3.46, 6.5, 12.0):
                ours = student_t_two_sided_p(t, df)
                ref = float(2 * scipy.stats.t.sf(abs(t), df))
                assert abs(ours - ref) < 1e-8


class TestDescriptives:
    def test_table_range_endpoints(self):
        # ranges forced purely by the min/max of the sample
        d = descriptives([322, 617, 800, 1443])
        assert d.range == 1121 and d.min == 322 and d.max == 1443
        d = descriptives([315, 454, 1336])
        assert d.range == 1021

    def test_single_value(self):
        d = descriptives([5])
        assert (d.mean, d.median, d.min, d.max) == (5, 5, 5, 5)
        assert d.sd == 0.0 and d.range == 0.0 and d.degenerate_sd

    def test_hand_computed_four_values(self):
        d = descriptives([1, 2, 3, 4])
        assert d.mean == 2.5 and d.median == 2.5
        assert math.isclose(d.sd, 1.2909944487358056, rel_tol=1e-12)
        assert math.isclose(d.iqr, 1.5, rel_tol=1e-12)  # type-7 quartiles 1.75/3.25

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            descriptives([])

    @given(xs=st.lists(finite_floats, min_size=2, max_size=40), seed=st.integers(0, 99))
    def test_permutation_invariant(self, xs, seed):
        rng = np.random.default_rng(seed)
        shuffled = list(xs)
        rng.shuffle(shuffled)
        a = descriptives(xs)
        b = descriptives(shuffled)
        for field in ("mean", "median", "sd", "iqr", "range", "min", "max"):
            assert math.isclose(getattr(a, field), getattr(b, field),
                                rel_tol=1e-9, abs_tol=1e-9)

    @given(
        xs=st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30),
        a=st.floats(-50, 50),
        b=st.floats(-1e3, 1e3),
    )
    def test_affine_map(self, xs, a, b):
        base = descriptives(xs)
        mapped = descriptives([a * x + b for x in xs])
        assert math.isclose(mapped.mean, a * base.mean + b, rel_tol=1e-7, abs_tol=1e-6)
        assert math.isclose(mapped.median, a * base.median + b, rel_tol=1e-7, abs_tol=1e-6)
        assert math.isclose(mapped.sd, abs(a) * base.sd, rel_tol=1e-7, abs_tol=1e-6)
        assert math.isclose(mapped.range, abs(a) * base.range, rel_tol=1e-7, abs_tol=1e-6)


class TestPairedT:
    def test_identical_vectors_zero_variance(self):
        with pytest.raises(ZeroVarianceError):
            paired_t_test([1, 2, 3], [1, 2, 3])

    def test_too_few(self):
        with pytest.raises(TooFewSamplesError):
            paired_t_test([1], [2])

    def test_hand_case(self):
        res = paired_t_test([2, 4, 6], [1, 2, 3])  # d = (1, 2, 3)
        assert math.isclose(res.t, 3.4641016151377544, rel_tol=1e-12)
        assert res.df == 2
        assert math.isclose(res.p, 1 - math.sqrt(6 / 7), rel_tol=1e-10)

    def test_sign_symmetry(self):
        pos = paired_t_test([2, 4, 6], [1, 2, 3])
        neg = paired_t_test([1, 2, 3], [2, 4, 6])
        assert math.isclose(pos.t, -neg.t, rel_tol=1e-12)
        assert math.isclose(pos.p, neg.p, rel_tol=1e-12)

    @given(
        diffs=st.lists(st.floats(-100, 100), min_size=2, max_size=30),
        shift=st.floats(-50, 50),
    )
    def test_shift_invariance(self, diffs, shift):
        xs = [10 + d for d in diffs]
        ys = [10.0] * len(diffs)
        realized = [x - y for x, y in zip(xs, ys)]
        shifted = [(x + shift) - (y + shift) for x, y in zip(xs, ys)]
        if np.std(realized, ddof=1) == 0 or np.std(shifted, ddof=1) == 0:
            return
        a = paired_t_test(xs, ys)
        b = paired_t_test([x + shift for x in xs], [y + shift for y in ys])
        assert math.isclose(a.t, b.t, rel_tol=1e-6, abs_tol=1e-9)
        assert math.isclose(a.p, b.p, rel_tol=1e-6, abs_tol=1e-12)

    def test_against_scipy_random_battery(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 30))
            xs = rng.normal(size=n) * rng.uniform(0.5, 20)
            ys = xs + rng.normal(size=n) * rng.uniform(0.1, 5) + rng.uniform(-3, 3)
            res = paired_t_test(xs, ys)
            ref = scipy.stats.ttest_rel(xs, ys)
            assert abs(res.t - float(ref.statistic)) < 1e-9
            assert res.df == n - 1
            assert abs(res.p - float(ref.pvalue)) < 1e-6
            assert 0 < res.p <= 1


class TestPearson:
    def test_exact_line(self):
        res = pearson([1, 2, 3], [2, 4, 6])
        assert res.r == 1.0

    def test_constant_input(self):
        with pytest.raises(ConstantInputError):
            pearson([1, 1, 1], [2, 4, 6])

    def test_too_few(self):
        with pytest.raises(TooFewSamplesError):
            pearson([1, 2], [3, 4])

    def test_against_scipy_random_battery(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            xs = rng.normal(size=n)
            ys = 0.5 * xs + rng.normal(size=n) * rng.uniform(0.2, 3)
            res = pearson(xs, ys)
            ref = scipy.stats.pearsonr(xs, ys)
            assert abs(res.r - float(ref.statistic)) < 1e-9
            assert abs(res.p - float(ref.pvalue)) < 1e-6

    @given(
        n=st.integers(4, 25),
        seed=st.integers(0, 999),
        a=st.floats(0.1, 20),
        b=st.floats(-100, 100),
    )
    @settings(max_examples=50)
    def test_affine_invariance(self, n, seed, a, b):
        rng = np.random.default_rng(seed)
        xs = rng.normal(size=n)
        ys = rng.normal(size=n)
        base = pearson(xs, ys)
        mapped = pearson(a * xs + b, ys)
        assert math.isclose(base.r, mapped.r, rel_tol=1e-7, abs_tol=1e-9)
        assert abs(base.r) <= 1.0

    def test_symmetry_and_perfect_negative(self):
        xs = [1.0, 2.0, 5.0, 7.0]
        ys = [3.0, -1.0, 4.0, 2.0]
        assert math.isclose(pearson(xs, ys).r, pearson(ys, xs).r, rel_tol=1e-12)
        down = pearson(xs, [-2 * x + 1 for x in xs])
        assert down.r == -1.0


def _dt(hour, minute=0, offset_hours=2):
    return datetime(2021, 5, 10, hour, minute,
                    tzinfo=timezone(timedelta(hours=offset_hours)))


class TestScheduleSplit:
    def test_examples(self):
        nine, flex = split_by_schedule([_dt(10), _dt(18, 30), _dt(17), _dt(9), _dt(8, 59)])
        assert nine.label is ScheduleLabel.NINE_TO_FIVE
        assert list(nine.sessions) == [_dt(10), _dt(9)]
        assert list(flex.sessions) == [_dt(18, 30), _dt(17), _dt(8, 59)]

    def test_uses_wall_clock_of_own_zone(self):
        # 10:00 local in UTC+10 is midnight UTC; wall clock decides
        ts = datetime(2021, 5, 10, 10, 0, tzinfo=timezone(timedelta(hours=10)))
        nine, flex = split_by_schedule([ts])
        assert list(nine.sessions) == [ts]

    @given(hours=st.lists(st.integers(0, 23), max_size=30))
    def test_partition(self, hours):
        items = [_dt(h) for h in hours]
        nine, flex = split_by_schedule(items)
        assert len(nine.sessions) + len(flex.sessions) == len(items)
        assert set(map(id, nine.sessions)).isdisjoint(map(id, flex.sessions))

    def test_missing_timestamp(self):
        with pytest.raises(MissingKeyError):
            split_by_schedule([object()])


class TestThresholdSplit:
    def test_rating_rule(self):
        low, high = split_by_threshold([{"g": 2}, {"g": 3}, {"g": 2.5}], "g", 2.5)
        assert low == [{"g": 2}]
        assert high == [{"g": 3}, {"g": 2.5}]

    def test_missing_key(self):
        with pytest.raises(MissingKeyError):
            split_by_threshold([{"other": 1}], "g", 2.5)


class TestResolutionDiff:
    def test_paper_style_series(self):
        series = [33.38, 22.10, 23.21, 34.34, 42.59, 38.18, 32.01]
        resolutions = [(1280, 720), (1280, 800), (1368, 912), (1920, 1080),
                       (2048, 1152), (2560, 1440), (3440, 1440)]
        table = resolution_diff(list(zip(resolutions, series)))
        diffs = [round(r.diff, 2) for r in table.rows]
        assert diffs == [33.38, -11.28, 1.11, 11.13, 8.25, -4.41, -6.17]
        assert math.isclose(table.total, 32.01, abs_tol=1e-9)

    def test_single_point(self):
        table = resolution_diff([((100, 100), 5.0)])
        assert table.rows[0].diff == 5.0 and table.total == 5.0

    def test_unsorted_rejected(self):
        with pytest.raises(UnsortedResolutionsError):
            resolution_diff([((1920, 1080), 1.0), ((1280, 720), 2.0)])
        with pytest.raises(UnsortedResolutionsError):
            resolution_diff([((1280, 720), 1.0), ((1280, 720), 2.0)])

    @given(values=st.lists(st.floats(-100, 100), min_size=1, max_size=20))
    def test_telescoping(self, values):
        points = [((100 + i, 100 + i), v) for i, v in enumerate(values)]
        table = resolution_diff(points)
        assert math.isclose(table.total, values[-1], rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(table.total, table.telescoped_total, rel_tol=1e-12, abs_tol=1e-12)


class TestSymptomTally:
    def test_empty(self):
        tally = symptom_tally({"a": [], "b": []})
        assert tally.group_totals == {"a": 0, "b": 0}

    def test_counts_and_totals(self):
        tally = symptom_tally({
            "flexible": [["tired eyes", "dry eyes"], ["tired eyes"]],
            "nine_to_five": [["headache"]],
        })
        assert tally.per_group["flexible"] == {"tired eyes": 2, "dry eyes": 1}
        assert tally.group_totals == {"flexible": 3, "nine_to_five": 1}

    def test_paper_scale_totals(self):
        # construction matching the published 29 vs 15 split
        flexible = [["tired eyes", "dry eyes", "blurred vision"]] * 9 + [["headache"]] * 2
        nine = [["tired eyes"]] * 8 + [["eye burn"]] * 7
        tally = symptom_tally({"flexible": flexible, "nine_to_five": nine})
        assert tally.group_totals == {"flexible": 29, "nine_to_five": 15}
