from __future__ import annotations

import numpy as np
import pytest

from conftest import make_series
from oracles import brute_force_peaks, column_means, windowed_mean_clipped, windowed_mean_symmetric

from frisson.errors import InvalidInputError, InvalidParameterError, ShapeMismatchError
from frisson.signal_core import (
    AggregateSeries,
    EdaSeries,
    FrissonSeries,
    PeakDescriptor,
    PipelineConfig,
    aggregate,
    detect_peaks,
    normalize,
    process_session,
    quantize,
    remove_baseline,
    smooth,
)


# -- config -------------------------------------------------------------------


def test_config_defaults_match_deployment_constants():
    cfg = PipelineConfig()
    assert cfg.sample_rate_hz == 5
    assert cfg.baseline_window_samples == 50
    assert cfg.peak_min_distance_s == 5.0
    assert cfg.peak_min_prominence == 0.6
    assert cfg.peak_min_distance_samples == 25
    assert cfg.quantize_halfwidth_samples == 12


@pytest.mark.parametrize(
    "overrides",
    [
        {"sample_rate_hz": 0},
        {"smooth_window_samples": 4},
        {"smooth_window_samples": 0},
        {"baseline_window_samples": 0},
        {"peak_min_prominence": 0.0},
        {"peak_min_prominence": 1.5},
        {"peak_min_distance_s": 0},
        {"quantize_halfwidth_s": -1},
    ],
)
def test_config_rejects_invalid_values(overrides):
    with pytest.raises(InvalidParameterError):
        PipelineConfig(**overrides)


def test_config_from_mapping_rejects_unknown_keys():
    with pytest.raises(InvalidParameterError, match="unknown"):
        PipelineConfig.from_mapping({"sample_rate_hz": 5, "bogus": 1})
    cfg = PipelineConfig.from_mapping({"peak_min_prominence": 0.5})
    assert cfg.peak_min_prominence == 0.5


# -- series types ---------------------------------------------------------------


def test_eda_series_rejects_empty_and_nonfinite():
    with pytest.raises(InvalidInputError):
        EdaSeries(0, 5, ())
    with pytest.raises(InvalidInputError):
        EdaSeries(0, 5, (1.0, float("nan")))
    with pytest.raises(InvalidInputError):
        EdaSeries(0, 5, (1.0, float("inf")))


def test_frisson_series_is_strictly_binary():
    FrissonSeries(5, (0, 1, 1, 0))
    with pytest.raises(InvalidInputError):
        FrissonSeries(5, (0, 2))
    with pytest.raises(InvalidInputError):
        FrissonSeries(5, (0.5,))


def test_aggregate_series_checks_range_and_granularity():
    AggregateSeries("v", 5, 4, (0.0, 0.25, 1.0))
    with pytest.raises(InvalidInputError):
        AggregateSeries("v", 5, 4, (1.2,))
    with pytest.raises(InvalidInputError):
        AggregateSeries("v", 5, 4, (0.3,))  # not a multiple of 1/4


# -- smooth ---------------------------------------------------------------------


def test_smooth_constant_series_is_identity():
    out = smooth(make_series([3, 3, 3, 3, 3]), 3)
    assert out.values == (3.0, 3.0, 3.0, 3.0, 3.0)


def test_smooth_impulse_truncates_symmetrically():
    out = smooth(make_series([0, 0, 1, 0, 0]), 3)
    assert np.allclose(out.values, (0.0, 1 / 3, 1 / 3, 1 / 3, 0.0), atol=1e-12)
    assert out.values[0] == 0.0 and out.values[4] == 0.0


def test_smooth_matches_brute_force_oracle(rng):
    values = rng.normal(0, 1, 200).tolist()
    series = make_series(values)
    out = smooth(series, 5)
    expected = windowed_mean_symmetric(values, 5)
    assert np.max(np.abs(np.array(out.values) - np.array(expected))) < 1e-12
    assert out.start_wall_ms == series.start_wall_ms
    assert out.sample_rate_hz == series.sample_rate_hz


def test_smooth_rejects_bad_windows():
    series = make_series([1, 2, 3])
    with pytest.raises(InvalidParameterError):
        smooth(series, 2)
    with pytest.raises(InvalidParameterError):
        smooth(series, 0)
    with pytest.raises(InvalidParameterError):
        smooth(series, 5)


# -- remove_baseline --------------------------------------------------------------


def test_remove_baseline_zeroes_constant_series():
    out = remove_baseline(make_series([7.5] * 60), 50)
    assert np.allclose(out.values, 0.0, atol=1e-12)


def test_remove_baseline_impulse_matches_oracle():
    values = [0, 0, 0, 10, 0, 0, 0]
    out = remove_baseline(make_series(values), 7)
    expected = [v - b for v, b in zip(values, windowed_mean_clipped(values, 7))]
    assert np.allclose(out.values, expected, atol=1e-12)
    # full window fits only at the center
    assert out.values[3] == pytest.approx(10 - 10 / 7, abs=1e-12)


def test_remove_baseline_is_zero_on_linear_ramp_interior():
    out = remove_baseline(make_series(range(100)), 3)
    assert np.allclose(out.values[1:-1], 0.0, atol=1e-12)


def test_remove_baseline_random_matches_oracle(rng):
    values = rng.normal(0, 2, 200).tolist()
    out = remove_baseline(make_series(values), 50)
    expected = [v - b for v, b in zip(values, windowed_mean_clipped(values, 50))]
    assert np.max(np.abs(np.array(out.values) - np.array(expected))) < 1e-12


def test_remove_baseline_rejects_bad_window():
    with pytest.raises(InvalidParameterError):
        remove_baseline(make_series([1, 2]), 0)


# -- normalize --------------------------------------------------------------------


def test_normalize_affine_example():
    assert normalize(make_series([2, 4, 6])).values == (0.0, 0.5, 1.0)


def test_normalize_constant_maps_to_zeros():
    assert normalize(make_series([7, 7, 7])).values == (0.0, 0.0, 0.0)


def test_normalize_random_bounds_and_order(rng):
    values = rng.normal(0, 3, 500)
    out = np.array(normalize(make_series(values)).values)
    assert out.min() == 0.0
    assert out.max() == 1.0
    assert np.all((out >= 0) & (out <= 1))
    assert np.array_equal(np.argsort(out, kind="stable"), np.argsort(values, kind="stable"))


# -- detect_peaks ------------------------------------------------------------------


def test_flat_series_has_no_peaks(cfg):
    assert detect_peaks(make_series([0.5] * 50), cfg) == []


def test_single_triangle_has_full_prominence(cfg):
    values = [0.0] * 20 + [1.0] + [0.0] * 20
    peaks = detect_peaks(make_series(values), cfg)
    assert len(peaks) == 1
    assert peaks[0].index == 20
    assert peaks[0].prominence == 1.0


def test_plateau_reports_leftmost_index(cfg):
    values = [0.0] * 10 + [1.0, 1.0, 1.0] + [0.0] * 10
    peaks = detect_peaks(make_series(values), cfg)
    assert [p.index for p in peaks] == [10]


def test_close_pair_keeps_only_taller_peak(cfg):
    values = [0.0] * 71
    values[30] = 1.0
    values[40] = 0.9
    peaks = detect_peaks(make_series(values), cfg)
    assert [p.index for p in peaks] == [30]
    oracle = brute_force_peaks(values, cfg.peak_min_prominence, cfg.peak_min_distance_samples)
    assert [(p.index, p.prominence) for p in peaks] == [(i, pr) for i, _, pr, _, _ in oracle]


def test_spaced_pair_keeps_both(cfg):
    values = [0.0] * 71
    values[20] = 1.0
    values[50] = 0.9
    peaks = detect_peaks(make_series(values), cfg)
    assert [p.index for p in peaks] == [20, 50]


def test_detect_peaks_matches_oracle_on_random_series(cfg, rng):
    for _ in range(20):
        n = int(rng.integers(50, 600))
        values = normalize(make_series(rng.random(n))).values
        got = detect_peaks(make_series(values), cfg)
        expected = brute_force_peaks(
            values, cfg.peak_min_prominence, cfg.peak_min_distance_samples
        )
        assert [
            (p.index, p.height, p.prominence, p.left_base, p.right_base) for p in got
        ] == expected


def test_detect_peaks_low_threshold_stresses_pruning(rng):
    cfg = PipelineConfig(peak_min_prominence=0.05, peak_min_distance_s=1.0)
    for _ in range(10):
        values = normalize(make_series(rng.random(400))).values
        got = detect_peaks(make_series(values), cfg)
        expected = brute_force_peaks(values, 0.05, cfg.peak_min_distance_samples)
        assert [(p.index, p.prominence) for p in got] == [
            (i, pr) for i, _, pr, _, _ in expected
        ]
        indices = [p.index for p in got]
        assert all(
            b - a >= cfg.peak_min_distance_samples for a, b in zip(indices, indices[1:])
        )


def test_quantized_plateaus_tie_break_by_index(cfg):
    # two equal-height peaks 10 apart: descending-height iteration hits the
    # lower index first, so it wins
    values = [0.0] * 40
    values[12] = 1.0
    values[22] = 1.0
    peaks = detect_peaks(make_series(values), cfg)
    assert [p.index for p in peaks] == [12]


# -- quantize ---------------------------------------------------------------------


def _peak(index: int) -> PeakDescriptor:
    return PeakDescriptor(index, 1.0, 1.0, index, index)


def test_quantize_window_is_plus_minus_halfwidth(cfg):
    out = quantize(200, [_peak(100)], cfg)
    ones = [i for i, v in enumerate(out.values) if v == 1]
    assert ones == list(range(88, 113))
    assert out.grid_hz == cfg.sample_rate_hz


def test_quantize_no_peaks_is_all_zero(cfg):
    out = quantize(30, [], cfg)
    assert set(out.values) == {0}


def test_quantize_merges_overlapping_windows(cfg):
    out = quantize(40, [_peak(10), _peak(20)], cfg)
    ones = [i for i, v in enumerate(out.values) if v == 1]
    assert ones == list(range(0, 33))


def test_quantize_rejects_out_of_range_peaks(cfg):
    with pytest.raises(InvalidInputError):
        quantize(50, [_peak(50)], cfg)


def test_quantize_run_count_bounded_by_peaks(cfg, rng):
    for _ in range(20):
        indices = sorted(set(rng.integers(0, 400, size=6).tolist()))
        out = quantize(400, [_peak(i) for i in indices], cfg)
        runs = 0
        prev = 0
        for v in out.values:
            if v == 1 and prev == 0:
                runs += 1
            prev = v
        assert runs <= len(indices)


# -- process_session ----------------------------------------------------------------


def test_constant_input_yields_no_frissons(cfg):
    out = process_session(make_series([4.2] * 300), cfg)
    assert set(out.values) == {0}
    assert len(out) == 300


def test_pipeline_preserves_length(cfg, rng):
    series = make_series(rng.normal(0, 1, 523))
    assert len(process_session(series, cfg)) == len(series)


def test_pipeline_is_affine_invariant(cfg, rng):
    base = rng.normal(0, 1, 400)
    reference = process_session(make_series(base), cfg)
    for a in (0.5, 2.0, 10.0):
        for b in (-5.0, 0.0, 3.0):
            out = process_session(make_series(a * base + b), cfg)
            assert out.values == reference.values


def test_pipeline_is_deterministic(cfg, rng):
    values = rng.normal(0, 1, 400).tolist()
    first = process_session(make_series(values), cfg)
    second = process_session(make_series(values), cfg)
    assert first == second


# -- aggregate ---------------------------------------------------------------------


def _binary(values) -> FrissonSeries:
    return FrissonSeries(5, tuple(values))


def test_aggregate_matches_hand_count():
    series = [_binary([1, 0]) for _ in range(5)] + [_binary([0, 0]) for _ in range(15)]
    agg = aggregate("clip", series)
    assert agg.n_viewers == 20
    assert agg.values[0] == 0.25
    assert agg.values[1] == 0.0


def test_aggregate_of_single_series_is_identity():
    series = _binary([0, 1, 1, 0])
    agg = aggregate("clip", [series])
    assert agg.values == (0.0, 1.0, 1.0, 0.0)
    assert agg.n_viewers == 1


def test_aggregate_matches_summation_oracle(rng):
    matrix = (rng.random((20, 1500)) < 0.3).astype(int).tolist()
    agg = aggregate("clip", [_binary(row) for row in matrix])
    expected = column_means(matrix)
    assert np.max(np.abs(np.array(agg.values) - np.array(expected))) < 1e-12
    scaled = np.array(agg.values) * agg.n_viewers
    assert np.max(np.abs(scaled - np.round(scaled))) < 1e-9


def test_aggregate_rejects_mismatched_series():
    with pytest.raises(ShapeMismatchError):
        aggregate("clip", [_binary([0, 1]), _binary([0, 1, 1])])
    with pytest.raises(ShapeMismatchError):
        aggregate("clip", [_binary([0, 1]), FrissonSeries(4, (0, 1))])
    with pytest.raises(InvalidInputError):
        aggregate("clip", [])
