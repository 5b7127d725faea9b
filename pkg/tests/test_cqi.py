"""Measurement compression, quantization, and the report queue."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from subnetsim import cqi


def make_cfg(**kw):
    return cqi.CqiConfig(**kw)


class TestEsmCompression:
    def test_zero_error_is_identity(self, rng):
        cfg = make_cfg(esm_error_std=0.0)
        for x in (-10.0, 0.0, 25.0):
            assert cqi.esm_compress(x, cfg, rng) == x

    def test_error_spread_matches_config(self):
        rng = np.random.default_rng(17)
        cfg = make_cfg()
        draws = np.array([cqi.esm_compress(0.0, cfg, rng) for _ in range(1_000_000)])
        assert abs(draws.std() - cfg.esm_error_std) / cfg.esm_error_std < 0.01
        assert abs(draws.mean()) < 0.002

    def test_default_error_std_is_quantizer_step_noise(self):
        cfg = make_cfg()
        assert cfg.esm_error_std == pytest.approx(4.8 / np.sqrt(12.0 * 29.0), rel=1e-12)


class TestQuantizer:
    def test_step_size(self):
        cfg = make_cfg()
        assert cfg.step_db == pytest.approx(4.8 / 29.0, rel=1e-12)

    def test_mid_span_index(self):
        cfg = make_cfg()
        # Halfway through the window falls in cell floor(L/2) = 14.
        assert cqi.quantize_cqi(-10.0 + 2.4, -10.0, cfg) == 14

    def test_floor_and_saturation(self):
        cfg = make_cfg()
        assert cqi.quantize_cqi(-10.0, -10.0, cfg) == 0
        assert cqi.quantize_cqi(-110.0, -10.0, cfg) == 0
        assert cqi.quantize_cqi(-10.0 + 4.8, -10.0, cfg) == cfg.n_levels - 1
        assert cqi.quantize_cqi(90.0, -10.0, cfg) == cfg.n_levels - 1

    def test_matches_edge_search_oracle(self):
        cfg = make_cfg()
        rng = np.random.default_rng(18)
        lo = -12.0
        for x in lo + (4.8 + 2.0) * rng.random(5_000) - 1.0:
            expect = ref.brute_quantize(x, lo, cfg.step_db, cfg.n_levels)
            assert cqi.quantize_cqi(float(x), lo, cfg) == expect

    @given(st.floats(min_value=-30.0, max_value=30.0),
           st.floats(min_value=-30.0, max_value=30.0))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_input(self, a, b):
        cfg = make_cfg()
        lo, hi = sorted((a, b))
        assert cqi.quantize_cqi(lo, -10.0, cfg) <= cqi.quantize_cqi(hi, -10.0, cfg)

    def test_dequantize_cell_midpoints(self):
        cfg = make_cfg()
        assert cqi.dequantize_cqi(0, -10.0, cfg) == pytest.approx(-10.0 + 0.5 * cfg.step_db)
        assert cqi.dequantize_cqi(14, -10.0, cfg) == pytest.approx(-10.0 + 14.5 * cfg.step_db)
        assert cqi.dequantize_cqi(28, -10.0, cfg) == pytest.approx(-10.0 + 28.5 * cfg.step_db)

    def test_dequantize_rejects_bad_index(self):
        cfg = make_cfg()
        with pytest.raises(cqi.IndexOutOfRange):
            cqi.dequantize_cqi(-1, -10.0, cfg)
        with pytest.raises(cqi.IndexOutOfRange):
            cqi.dequantize_cqi(cfg.n_levels, -10.0, cfg)

    def test_round_trip_error_bound_inside_window(self):
        cfg = make_cfg()
        rng = np.random.default_rng(19)
        lo = -10.0
        xs = lo + 4.8 * rng.random(20_000)
        for x in xs:
            back = cqi.dequantize_cqi(cqi.quantize_cqi(float(x), lo, cfg), lo, cfg)
            assert abs(back - x) <= 0.5 * cfg.step_db * (1.0 + 1e-12)

    def test_brute_oracle_round_trip_agrees(self):
        cfg = make_cfg()
        rng = np.random.default_rng(20)
        lo = -3.0
        for x in lo + 4.8 * rng.random(2_000):
            idx = cqi.quantize_cqi(float(x), lo, cfg)
            assert cqi.dequantize_cqi(idx, lo, cfg) == pytest.approx(
                ref.brute_dequantize(idx, lo, cfg.step_db), rel=1e-12)


class TestReportQueue:
    def test_one_tti_delay(self):
        q = cqi.ReportQueue(1)
        assert q.push(5) is None
        assert q.push(6) == 5
        assert q.push(7) == 6

    def test_three_tti_delay(self):
        q = cqi.ReportQueue(3)
        outs = [q.push(i) for i in range(6)]
        assert outs == [None, None, None, 0, 1, 2]

    def test_rejects_delay_below_one(self):
        with pytest.raises(ValueError):
            cqi.ReportQueue(0)
        with pytest.raises(ValueError):
            cqi.ReportQueue(-1)
