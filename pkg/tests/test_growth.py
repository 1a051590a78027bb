"""Growth samples, trimming, and size-class binning."""

import math
from datetime import date, datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pagegrowth.aggregate import Timescale, aggregate_engagement
from pagegrowth.growth import (
    DEFAULT_FOLLOWER_CLASSES,
    DegenerateBinningError,
    GrowthSample,
    SizeClass,
    assign_follower_class,
    engagement_quartile_bins,
    growth_samples,
    split_class_by_median,
    trim,
)
from pagegrowth.ingest import PostRecord


def _series(weekly_engagement, followers=None, start=date(2021, 1, 4)):
    """Build a weekly series from engagement values; None skips the week."""
    posts = []
    for i, value in enumerate(weekly_engagement):
        if value is None:
            continue
        day = start.fromordinal(start.toordinal() + 7 * i)
        fol = followers[i] if followers else None
        posts.append(
            PostRecord(
                page_id="p",
                post_id=f"p-{i}",
                timestamp=datetime(day.year, day.month, day.day, 12, tzinfo=timezone.utc),
                total_interactions=value,
                followers_at_posting=fol,
            )
        )
    return aggregate_engagement(posts, Timescale.W)


class TestGrowthSamples:
    def test_gross_and_log(self):
        series = _series([100, 150])
        samples, skips = growth_samples(series, "engagement")
        assert len(samples) == 1
        s = samples[0]
        assert s.gross_growth == pytest.approx(1.5)
        assert s.log_growth == pytest.approx(0.4054651081, abs=1e-9)
        assert s.prior_engagement == 100
        assert skips.total == 0

    def test_zero_guard(self):
        series = _series([100, 0])
        samples, skips = growth_samples(series, "engagement")
        assert samples == []
        assert skips.zero_value == 1

    def test_gap_breaks_chain(self):
        series = _series([100, None, 150])
        samples, skips = growth_samples(series, "engagement")
        assert samples == []
        assert skips.total == 0  # a gap is not a degenerate pair

    def test_followers_metric_requires_observations(self):
        series = _series([10, 10, 10], followers=[1000, None, 1100])
        samples, skips = growth_samples(series, "followers")
        assert samples == []
        assert skips.missing_followers == 2

    def test_prior_covariates_from_earlier_window(self):
        series = _series([100, 200, 400], followers=[10_000, 20_000, 40_000])
        samples, _ = growth_samples(series, "followers")
        assert [s.prior_followers for s in samples] == [10_000, 20_000]
        assert [s.prior_engagement for s in samples] == [100, 200]

    def test_window_start_is_later_window(self):
        series = _series([100, 150])
        samples, _ = growth_samples(series, "engagement")
        assert samples[0].window_start == date(2021, 1, 11)

    def test_telescoping(self):
        values = [100, 130, 90, 240, 310]
        series = _series(values)
        samples, _ = growth_samples(series, "engagement")
        assert math.exp(sum(s.log_growth for s in samples)) == pytest.approx(
            values[-1] / values[0], rel=1e-12
        )


class TestTrim:
    def test_integers_1_to_100(self):
        out = trim(np.arange(1, 101))
        assert out.min() == 6 and out.max() == 95
        assert out.size == 90

    def test_constant_list_unchanged(self):
        out = trim(np.full(50, 7.0))
        assert np.array_equal(out, np.full(50, 7.0))

    def test_small_input_passes_with_warning(self):
        values = np.arange(10)
        with pytest.warns(UserWarning):
            out = trim(values)
        assert np.array_equal(out, values)

    def test_empty(self):
        assert trim([]).size == 0

    @given(st.lists(st.floats(-1e6, 1e6), min_size=21, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_subset_and_bounds(self, values):
        arr = np.array(values)
        out = trim(arr)
        lo, hi = np.percentile(arr, [5, 95])
        assert np.all((out >= lo) & (out <= hi))
        member = np.isin(out, arr)
        assert member.all()


class TestSizeClasses:
    def test_paper_boundaries(self):
        assert assign_follower_class(49_999, DEFAULT_FOLLOWER_CLASSES).label == "10K-50K"
        assert assign_follower_class(50_000, DEFAULT_FOLLOWER_CLASSES).label == "50K-150K"
        assert assign_follower_class(7_000_000, DEFAULT_FOLLOWER_CLASSES) is None
        assert assign_follower_class(9_999, DEFAULT_FOLLOWER_CLASSES) is None

    def test_partition(self):
        for f in (10_000, 49_999, 50_000, 149_999, 150_000, 499_999, 500_000, 4_999_999):
            matches = [c for c in DEFAULT_FOLLOWER_CLASSES if c.contains(f)]
            assert len(matches) == 1

    def test_invalid_class(self):
        with pytest.raises(ValueError):
            SizeClass("bad", 10, 10)


def _sample(prior_engagement, prior_followers=None, i=0):
    return GrowthSample(
        page_id="p",
        timescale=Timescale.W,
        window_start=date(2021, 1, 11),
        metric="engagement",
        gross_growth=1.0 + i * 0.01,
        log_growth=math.log(1.0 + i * 0.01),
        prior_engagement=prior_engagement,
        prior_followers=prior_followers,
    )


class TestQuartileBins:
    def test_priors_1_to_100(self):
        samples = [_sample(v, i=v) for v in range(1, 101)]
        bins = engagement_quartile_bins(samples)
        sizes = [len(bins[q]) for q in ("Q1", "Q2", "Q3", "Q4")]
        # trimming keeps priors 6..95; type-7 quartiles of 6..95 are
        # 28.25 / 50.5 / 72.75, splitting 90 values into 23/22/22/23
        assert sizes == [23, 22, 22, 23]
        assert sum(sizes) == 90
        assert max(sizes) - min(sizes) <= 3

    def test_all_equal_fatal(self):
        samples = [_sample(5, i=i) for i in range(30)]
        with pytest.raises(DegenerateBinningError):
            engagement_quartile_bins(samples)

    def test_eight_samples_no_trim(self):
        samples = [_sample(v, i=v) for v in range(1, 9)]
        bins = engagement_quartile_bins(samples)
        assert [len(bins[q]) for q in ("Q1", "Q2", "Q3", "Q4")] == [2, 2, 2, 2]
        assert [s.prior_engagement for s in bins["Q1"]] == [1, 2]
        assert [s.prior_engagement for s in bins["Q4"]] == [7, 8]


class TestMedianSplit:
    def test_even(self):
        samples = [_sample(1, prior_followers=f, i=f) for f in (1, 2, 3, 4)]
        lower, upper = split_class_by_median(samples)
        assert [s.prior_followers for s in lower] == [1, 2]
        assert [s.prior_followers for s in upper] == [3, 4]

    def test_odd_median_goes_upper(self):
        samples = [_sample(1, prior_followers=f, i=f) for f in (1, 2, 3)]
        lower, upper = split_class_by_median(samples)
        assert [s.prior_followers for s in lower] == [1]
        assert [s.prior_followers for s in upper] == [2, 3]

    def test_all_equal_fatal(self):
        samples = [_sample(1, prior_followers=5, i=i) for i in range(3)]
        with pytest.raises(DegenerateBinningError):
            split_class_by_median(samples)

    def test_balanced_sizes(self):
        rng = np.random.default_rng(0)
        priors = rng.permutation(np.arange(100, 201))
        samples = [_sample(1, prior_followers=int(f), i=i) for i, f in enumerate(priors)]
        lower, upper = split_class_by_median(samples)
        assert abs(len(lower) - len(upper)) <= 1


@given(
    st.lists(
        st.integers(min_value=1, max_value=10**6), min_size=2, max_size=30
    )
)
@settings(max_examples=100, deadline=None)
def test_telescoping_property(values):
    series = _series(values)
    samples, _ = growth_samples(series, "engagement")
    if samples:
        chain = math.exp(sum(s.log_growth for s in samples))
        assert chain == pytest.approx(values[-1] / values[0], rel=1e-9)
