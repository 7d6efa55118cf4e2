from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blockext.blocks import BlockExtremes
from blockext.fit import fit
from blockext.gevcore import GevParams, sample
from blockext.uncertainty import (
    BootstrapConfig,
    PValue,
    Scheme,
    bootstrap_fit,
    bootstrap_pvalue,
    circular_block_indices,
    paired_pvalue,
    replicate_rng,
    resample,
    resample_indices,
    significance_mark,
    two_state_pvalue,
)


class TestResampling:
    def test_four_years_blocks_of_two(self):
        # blocks starting at years 1 and 3 (0-based 0 and 2) concatenate to 1, 2, 3, 4
        assert circular_block_indices([0, 2], 2, 4).tolist() == [0, 1, 2, 3]
        # block 4 wraps around to year 1
        assert circular_block_indices([3], 2, 4).tolist() == [3, 0]

    def test_b1_circular_equals_simple(self):
        for seed in range(5):
            a = resample_indices(50, 1, np.random.default_rng(seed), Scheme.CIRCULAR_BLOCK)
            b = resample_indices(50, 1, np.random.default_rng(seed), Scheme.SIMPLE)
            assert np.array_equal(a, b)

    @given(st.integers(1, 300), st.integers(1, 12), st.integers(0, 10_000))
    def test_length_and_range(self, n, b, seed):
        if b > n:
            with pytest.raises(ValueError):
                resample_indices(n, b, np.random.default_rng(seed))
            return
        idx = resample_indices(n, b, np.random.default_rng(seed))
        assert idx.size == n and idx.min() >= 0 and idx.max() < n

    def test_thousand_years_decadal_blocks(self):
        idx = resample(1000, BootstrapConfig(block_length=10, seed=3), replicate=17)
        assert idx.size == 1000 and set(idx.tolist()) <= set(range(1000))
        # runs of ten consecutive (wrapped) years
        runs = idx.reshape(100, 10)
        assert np.all((np.diff(runs, axis=1) % 1000) == 1)

    def test_same_indices_for_every_cell(self):
        cfg = BootstrapConfig(seed=4, block_length=5)
        cells = [np.zeros(100), np.ones(100), np.arange(100.0)]
        assert np.array_equal(resample(cells, cfg, 3), resample(100, cfg, 3))
        with pytest.raises(ValueError):
            resample([np.zeros(10), np.zeros(11)], cfg)

    def test_replicates_and_streams_are_independent_of_order(self):
        a = replicate_rng(7, 0, 5).integers(0, 1 << 30, 4)
        b = replicate_rng(7, 0, 5).integers(0, 1 << 30, 4)
        c = replicate_rng(7, 1, 5).integers(0, 1 << 30, 4)
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BootstrapConfig(n_replicates=0)
        with pytest.raises(ValueError):
            BootstrapConfig(block_length=0)
        with pytest.raises(ValueError):
            BootstrapConfig(level=1.0)


@pytest.fixture(scope="module")
def gev_sample():
    return sample(GevParams(0, 1, -0.2), 1000, seed=31)


class TestBootstrapFit:
    def test_deterministic(self, gev_sample):
        cfg = BootstrapConfig(n_replicates=50, seed=5)
        a = bootstrap_fit(gev_sample, cfg)
        b = bootstrap_fit(gev_sample, cfg)
        assert np.array_equal(a.estimates, b.estimates)
        assert a.quantile_envelopes == b.quantile_envelopes

    def test_parallel_matches_serial(self, gev_sample):
        serial = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=12, seed=6))
        parallel = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=12, seed=6, workers=2))
        assert np.array_equal(serial.estimates, parallel.estimates)

    def test_standard_errors_and_envelopes(self, gev_sample):
        boot = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=200, seed=7))
        se = boot.standard_errors
        assert set(se) >= {"mu", "sigma", "log_sigma", "xi", "rl_100"}
        assert np.std(boot.estimates[:, 2], ddof=1) == pytest.approx(se["xi"])
        lo, hi = boot.envelope("xi")
        assert lo < boot.point.params.xi < hi
        lo, hi = boot.envelope(100.0)
        assert lo < boot.point_quantity(100.0) < hi
        assert len(boot.replicate_params()) == 200 and boot.n_failed == 0

    def test_block_length_changes_errors_little(self, gev_sample):
        se1 = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=400, seed=8)).standard_errors
        se10 = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=400, seed=8, block_length=10)).standard_errors
        for name in ("mu", "sigma", "xi"):
            assert abs(se10[name] / se1[name] - 1) < 0.15

    def test_errors_scale_like_inverse_root_n(self):
        cfg = BootstrapConfig(n_replicates=200, seed=9)
        small = bootstrap_fit(sample(GevParams(0, 1, -0.2), 250, seed=32), cfg).standard_errors
        large = bootstrap_fit(sample(GevParams(0, 1, -0.2), 1000, seed=33), cfg).standard_errors
        for name in ("mu", "sigma"):
            assert small[name] / large[name] == pytest.approx(2.0, rel=0.3)

    def test_failed_replicates_are_counted(self):
        # mostly tied data: many resamples are constant and cannot be fitted
        data = BlockExtremes(np.r_[np.full(11, 1.0), 2.0])
        with pytest.warns(RuntimeWarning, match="bootstrap fits failed"):
            boot = bootstrap_fit(data, BootstrapConfig(n_replicates=40, seed=1), "pwm", point=fit(data, "pwm"))
        assert boot.n_failed > 2 and boot.unreliable
        assert np.all(np.isnan(boot.estimates[~boot.valid]))
        assert np.isfinite(boot.standard_error("mu"))

    def test_pwm_bootstrap(self, gev_sample):
        boot = bootstrap_fit(gev_sample, BootstrapConfig(n_replicates=30, seed=2), "pwm")
        assert boot.n_failed == 0 and boot.estimates.shape == (30, 3)


class TestPValues:
    def test_formula(self):
        d = np.r_[np.full(90, 1.0), np.full(10, -1.0)]
        p, degenerate = bootstrap_pvalue(d)
        assert p == pytest.approx(0.2) and not degenerate

    def test_floor(self):
        p, degenerate = bootstrap_pvalue(np.linspace(1, 2, 200))
        assert p == pytest.approx(2 / 200) and not degenerate

    def test_degenerate(self):
        p, degenerate = bootstrap_pvalue(np.full(200, 0.3))
        assert p == pytest.approx(2 / 200) and degenerate
        p, degenerate = bootstrap_pvalue(np.zeros(200))
        assert p == 1.0 and degenerate

    def test_warns_for_few_replicates(self):
        with pytest.warns(RuntimeWarning):
            bootstrap_pvalue(np.arange(10.0))

    def test_identical_states(self, gev_sample):
        pv = two_state_pvalue(gev_sample, gev_sample, "mu", BootstrapConfig(n_replicates=200, seed=3))
        assert pv.p > 0.5 and pv.delta == 0.0 and pv.mark == ""

    def test_separated_states(self, gev_sample):
        other = sample(GevParams(3, 1, -0.2), 1000, seed=34)
        pv = two_state_pvalue(gev_sample, other, "mu", BootstrapConfig(n_replicates=200, seed=3))
        assert pv.p == pytest.approx(2 / 200) and pv.mark == "++"

    def test_relabeling(self, gev_sample):
        other = sample(GevParams(0.1, 1.05, -0.2), 1000, seed=35)
        cfg = BootstrapConfig(n_replicates=100, seed=4)
        ba = bootstrap_fit(gev_sample, cfg, stream=0)
        bb = bootstrap_fit(other, cfg, stream=1)
        for quantity in ("mu", "log_sigma", "xi", 50.0):
            ab = paired_pvalue(ba, bb, quantity)
            ba_ = paired_pvalue(bb, ba, quantity)
            assert ab.p == ba_.p and ab.delta == -ba_.delta

    def test_marks(self):
        assert significance_mark(0.015, 1.0) == "++"
        assert significance_mark(0.05, 1.0) == "+"
        assert significance_mark(0.5, 1.0) == ""
        assert significance_mark(0.015, -1.0) == "--"
        assert significance_mark(0.10, -2.0) == "-"
        assert significance_mark(0.02, 1.0) == "+"
        assert PValue(0.01, -3.0, 100).mark == "--"

    @given(st.floats(0, 1), st.floats(-10, 10))
    def test_marks_follow_thresholds(self, p, delta):
        mark = significance_mark(p, delta)
        if p < 0.02:
            assert len(mark) == 2
        elif p <= 0.10:
            assert len(mark) == 1
        else:
            assert mark == ""
        if mark:
            assert set(mark) == {"+" if delta >= 0 else "-"}
