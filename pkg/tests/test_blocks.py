from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from blockext.blocks import (
    DAYS_PER_YEAR,
    BlockExtremes,
    DailySeries,
    Season,
    annual_extremes,
    annual_maxima,
    annual_minima,
    multi_year_extremes,
    season_mask,
    seasonal_aggregates,
    seasonal_stats,
)
from blockext.gevcore import Orientation


def series_from(values) -> DailySeries:
    return DailySeries(np.asarray(values, dtype=float))


def day_index(year: int, day: int) -> int:
    return year * DAYS_PER_YEAR + day - 1


class TestDailySeries:
    def test_length_must_be_whole_years(self):
        with pytest.raises(ValueError):
            series_from(np.zeros(400))

    def test_values_must_be_finite(self):
        v = np.zeros(DAYS_PER_YEAR)
        v[3] = np.nan
        with pytest.raises(ValueError):
            series_from(v)

    def test_values_are_immutable(self):
        s = series_from(np.zeros(DAYS_PER_YEAR))
        with pytest.raises(ValueError):
            s.values[0] = 1.0

    def test_year_slice(self):
        s = DailySeries(np.arange(3 * DAYS_PER_YEAR, dtype=float), start_year=1850)
        sub = s.years(1, 3)
        assert sub.n_years == 2 and sub.start_year == 1851
        assert sub.values[0] == DAYS_PER_YEAR
        with pytest.raises(ValueError):
            s.years(2, 4)


class TestAnnualMaxima:
    def test_single_spike(self):
        v = np.zeros(DAYS_PER_YEAR)
        v[199] = 5
        assert annual_maxima(series_from(v)).values.tolist() == [5.0]

    def test_two_years(self):
        v = np.zeros(2 * DAYS_PER_YEAR)
        v[day_index(0, 10)] = 3
        v[day_index(1, 300)] = 4
        out = annual_maxima(series_from(v))
        assert out.values.tolist() == [3.0, 4.0]
        assert out.block_length == 1 and out.orientation is Orientation.MAXIMA

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=1000 * DAYS_PER_YEAR)
        expected = [max(v[y * DAYS_PER_YEAR : (y + 1) * DAYS_PER_YEAR]) for y in range(1000)]
        assert annual_maxima(series_from(v)).values.tolist() == expected


class TestAnnualMinima:
    def test_minimum_inside_window(self):
        v = np.zeros(2 * DAYS_PER_YEAR)
        v[day_index(0, 200)] = -10
        assert annual_minima(series_from(v)).values.tolist() == [-10.0]

    def test_minimum_before_july_is_excluded(self):
        v = np.zeros(2 * DAYS_PER_YEAR)
        v[day_index(0, 100)] = -20
        assert annual_minima(series_from(v)).values.tolist() == [0.0]

    def test_window_edges(self):
        # July 1 of year 0 and June 30 of year 1 are inside; June 30 of year 0 and July 1 of year 1 are not
        v = np.zeros(3 * DAYS_PER_YEAR)
        v[day_index(0, 182)] = -1
        v[day_index(1, 181)] = -2
        v[day_index(0, 181)] = -50
        v[day_index(1, 182)] = -3
        assert annual_minima(series_from(v)).values.tolist() == [-2.0, -3.0]

    def test_too_short(self):
        with pytest.raises(ValueError):
            annual_minima(series_from(np.zeros(DAYS_PER_YEAR)))

    def test_matches_brute_force_window_scan(self):
        rng = np.random.default_rng(1)
        v = rng.normal(size=1000 * DAYS_PER_YEAR)
        expected = []
        for y in range(999):
            start = day_index(y, 182)
            expected.append(min(v[start : start + DAYS_PER_YEAR]))
        out = annual_minima(series_from(v))
        assert out.n_blocks == 999
        assert out.values.tolist() == expected

    def test_negation_against_calendar_year_minima(self):
        # calendar-year minima computed directly, only for this comparison
        rng = np.random.default_rng(2)
        v = rng.normal(size=20 * DAYS_PER_YEAR)
        calendar_minima = v.reshape(20, DAYS_PER_YEAR).min(axis=1)
        assert np.array_equal(annual_maxima(series_from(-v)).values, -calendar_minima)

    def test_dispatch(self):
        s = series_from(np.random.default_rng(3).normal(size=3 * DAYS_PER_YEAR))
        assert annual_extremes(s, "warm").orientation is Orientation.MAXIMA
        assert annual_extremes(s, "cold").n_blocks == 2


class TestMultiYear:
    def test_maxima_pairs(self):
        out = multi_year_extremes(BlockExtremes([1, 3, 2, 5]), 2)
        assert out.values.tolist() == [3.0, 5.0] and out.block_length == 2

    def test_minima_remainder_dropped(self):
        out = multi_year_extremes(BlockExtremes([-1, -4, -2], "min"), 2)
        assert out.values.tolist() == [-4.0]

    def test_decadal_matches_grouped_reduction(self):
        x = np.random.default_rng(4).normal(size=1000)
        out = multi_year_extremes(BlockExtremes(x), 10)
        assert out.n_blocks == 100
        assert out.values.tolist() == [max(x[i * 10 : (i + 1) * 10]) for i in range(100)]

    def test_too_few_blocks(self):
        with pytest.raises(ValueError):
            multi_year_extremes(BlockExtremes([1.0, 2.0]), 5)

    def test_must_be_multiple(self):
        with pytest.raises(ValueError):
            multi_year_extremes(multi_year_extremes(BlockExtremes(np.arange(20.0)), 2), 5)

    @given(hnp.arrays(float, st.integers(10, 200), elements=st.floats(-100, 100)), st.sampled_from(["max", "min"]))
    def test_composition(self, x, orient):
        e = BlockExtremes(x, orient)
        n10 = (len(x) // 10) * 10
        two_then_ten = multi_year_extremes(multi_year_extremes(e.take(np.arange(n10)), 2), 10)
        assert np.array_equal(two_then_ten.values, multi_year_extremes(e, 10).values)

    @given(hnp.arrays(float, st.integers(2, 100), elements=st.floats(-100, 100)), st.integers(1, 7))
    def test_elements_come_from_input(self, x, b):
        if b > len(x):
            return
        out = multi_year_extremes(BlockExtremes(x), b)
        assert set(out.values.tolist()) <= set(x.tolist())


class TestSeasons:
    def test_season_days(self):
        jja = season_mask(Season.JJA)
        assert jja.sum() == 92 and jja[151] and jja[242] and not jja[150] and not jja[243]
        djf = season_mask(Season.DJF)
        assert djf.sum() == 31 + 59 and djf[334] and djf[0] and djf[58] and not djf[59]

    def test_constant_series_is_degenerate(self):
        stats_ = seasonal_stats(series_from(np.full(3 * DAYS_PER_YEAR, 7.0)), "JJA")
        assert stats_.mean == 7.0 and stats_.sd == 0.0 and stats_.degenerate

    def test_jja_indicator(self):
        v = np.tile(season_mask(Season.JJA).astype(float), 3)
        assert seasonal_stats(series_from(v), Season.JJA).mean == 1.0

    def test_matches_masked_brute_force(self):
        rng = np.random.default_rng(5)
        n = 30
        day = np.tile(np.arange(1, DAYS_PER_YEAR + 1), n)
        v = 10 * np.cos(2 * np.pi * (day - 196) / 365) + rng.normal(size=n * DAYS_PER_YEAR)
        jja = seasonal_stats(series_from(v), "JJA")
        sel = v[(day >= 152) & (day <= 243)]
        assert jja.mean == pytest.approx(sel.mean(), rel=1e-12)
        assert jja.sd == pytest.approx(sel.std(ddof=1), rel=1e-12)
        assert jja.n_days == sel.size
        # DJF pairs December of one year with January-February of the next
        year = np.repeat(np.arange(n), DAYS_PER_YEAR)
        dec = (day >= 335) & (year < n - 1)
        janfeb = (day <= 59) & (year > 0)
        sel = v[dec | janfeb]
        djf = seasonal_stats(series_from(v), "DJF")
        assert djf.mean == pytest.approx(sel.mean(), rel=1e-12)
        assert djf.sd == pytest.approx(sel.std(ddof=1), rel=1e-12)

    def test_needs_complete_season(self):
        with pytest.raises(ValueError):
            seasonal_stats(series_from(np.zeros(DAYS_PER_YEAR)), "DJF")

    def test_aggregates_pool_like_raw_data(self):
        rng = np.random.default_rng(6)
        v = rng.normal(size=12 * DAYS_PER_YEAR) * 3 + 1
        s = series_from(v)
        for season in ("JJA", "DJF"):
            agg = seasonal_aggregates(s, season)
            full = seasonal_stats(s, season)
            pooled = agg.pooled()
            assert pooled.mean == pytest.approx(full.mean, rel=1e-12)
            assert pooled.sd == pytest.approx(full.sd, rel=1e-12)

    def test_aggregate_rows_align_with_extremes(self):
        rng = np.random.default_rng(7)
        s = series_from(rng.normal(size=8 * DAYS_PER_YEAR))
        assert seasonal_aggregates(s, "JJA").means.size == annual_maxima(s).n_blocks
        assert seasonal_aggregates(s, "DJF").means.size == annual_minima(s).n_blocks
        # resampled rows give the statistics of the concatenated raw season days
        agg = seasonal_aggregates(s, "DJF")
        idx = np.array([0, 0, 3, 6, 2])
        raw = []
        by_year = s.by_year()
        for i in idx:
            raw.append(np.concatenate([by_year[i, 334:], by_year[i + 1, :59]]))
        raw = np.concatenate(raw)
        pooled = agg.pooled(idx)
        assert pooled.mean == pytest.approx(raw.mean(), rel=1e-12)
        assert pooled.sd == pytest.approx(raw.std(ddof=1), rel=1e-12)
