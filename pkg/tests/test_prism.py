"""Composite quality index: SI-SNR, normalization, aggregation, CSV I/O."""

import json
from pathlib import Path

import numpy as np
import pytest

from dpdfnet.prism import (
    CSV_HEADER,
    METRIC_COLUMNS,
    MetricTable,
    format_report,
    load_metric_csv,
    minmax_normalize,
    prism_report,
    prism_score,
    si_snr,
)

REFERENCE_CSV = Path(__file__).parent / "data" / "reference_metrics.csv"

# Published composite scores for the reference systems, in file order.
PUBLISHED = {
    "Noisy": 0.04, "DTLN": 0.46, "GTCRN": 0.49, "RNNoise": 0.51,
    "NSNet2": 0.51, "FullSubNet": 0.63, "aTENNuate": 0.69, "DPCRN": 0.69,
    "CleanUNet": 0.69, "DEMUCS": 0.71, "DeepFilterNet2": 0.76,
    "DeepFilterNet3": 0.82, "Baseline": 0.80, "Baseline+OA": 0.84,
    "Baseline+OA+FT": 0.91, "DPDFNet-2": 0.95, "DPDFNet-4": 0.98,
    "DPDFNet-8": 1.00,
}


class TestSiSnr:
    def test_hand_example(self):
        # projection of [1, 0] onto [1, -1] leaves equal signal and error power
        assert si_snr(np.array([1.0, 0.0]), np.array([1.0, -1.0])) == pytest.approx(0.0, abs=1e-12)

    def test_perfect_estimate_clamps(self):
        x = np.random.default_rng(0).standard_normal(100)
        assert si_snr(x, x) == 120.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        ref = rng.standard_normal(500)
        est = ref + 0.1 * rng.standard_normal(500)
        a = si_snr(est, ref)
        b = si_snr(3.7 * est, ref)
        assert a == pytest.approx(b, abs=1e-9)

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError):
            si_snr(np.ones(10), np.zeros(10))

    def test_worse_estimates_score_lower(self):
        rng = np.random.default_rng(2)
        ref = rng.standard_normal(1000)
        noise = rng.standard_normal(1000)
        small = si_snr(ref + 0.01 * noise, ref)
        large = si_snr(ref + 0.5 * noise, ref)
        assert small > large


class TestMinmax:
    def test_basic(self):
        assert np.allclose(minmax_normalize(np.array([1.0, 3.0, 2.0])), [0.0, 1.0, 0.5])

    def test_constant_column_maps_to_half(self):
        assert np.allclose(minmax_normalize(np.array([2.0, 2.0])), [0.5, 0.5])

    def test_endpoints(self):
        out = minmax_normalize(np.array([10.0, -5.0, 0.0]))
        assert out.min() == 0.0 and out.max() == 1.0

    def test_requires_two_entries(self):
        with pytest.raises(ValueError):
            minmax_normalize(np.array([1.0]))


class TestMetricTable:
    def test_nonfinite_cell_named(self):
        values = np.ones((2, len(METRIC_COLUMNS)))
        values[1, 3] = np.nan
        with pytest.raises(ValueError, match="sig"):
            MetricTable(models=("a", "b"), values=values)

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            MetricTable(models=("a", "b"), values=np.ones((2, 3)))

    def test_column_lookup(self):
        values = np.arange(2 * len(METRIC_COLUMNS), dtype=float).reshape(2, -1)
        table = MetricTable(models=("a", "b"), values=values)
        assert np.array_equal(table.column("pesq"), values[:, 0])
        assert np.array_equal(table.column("loud"), values[:, -1])


class TestAggregation:
    def test_reference_table_reproduces_published_scores(self):
        table = load_metric_csv(REFERENCE_CSV)
        scores = prism_score(table)
        for model, want in PUBLISHED.items():
            assert scores[model] == pytest.approx(want, abs=0.015), model
        assert scores["DPDFNet-8"] == 1.0

    def test_two_model_dominance(self):
        values = np.vstack([np.full(len(METRIC_COLUMNS), 2.0),
                            np.full(len(METRIC_COLUMNS), 1.0)])
        scores = prism_score(MetricTable(models=("good", "bad"), values=values))
        assert scores["good"] == 1.0 and scores["bad"] == 0.0

    def test_duplicate_rows_share_scores(self):
        table = load_metric_csv(REFERENCE_CSV)
        dup = MetricTable(models=table.models + ("Copy",),
                          values=np.vstack([table.values, table.values[-1]]))
        scores = prism_score(dup)
        assert scores["Copy"] == pytest.approx(scores[table.models[-1]], abs=1e-12)

    def test_affine_rescaling_of_one_column_is_absorbed(self):
        table = load_metric_csv(REFERENCE_CSV)
        scaled = table.values.copy()
        scaled[:, 0] = 10.0 * scaled[:, 0] - 3.0  # pesq in different units
        before = prism_score(table)
        after = prism_score(MetricTable(models=table.models, values=scaled))
        for model in table.models:
            assert after[model] == pytest.approx(before[model], abs=1e-12)

    def test_hand_mixed_winner(self):
        # row a wins all intrusive metrics, row b wins all non-intrusive ones
        values = np.ones((2, len(METRIC_COLUMNS)))
        values[0, :3] = 1.0   # pesq stoi sisnr
        values[1, :3] = 0.0
        values[0, 3:] = 0.0   # dnsmos + nisqa families
        values[1, 3:] = 1.0
        report = prism_report(MetricTable(models=("a", "b"), values=values))
        assert report["a"]["intrusive"] == 1.0
        assert report["a"]["non_intrusive"] == 0.0
        assert report["a"]["prism"] == 0.5
        assert report["b"]["prism"] == 0.5

    def test_report_families(self):
        table = load_metric_csv(REFERENCE_CSV)
        report = prism_report(table)
        for model in table.models:
            row = report[model]
            assert row["non_intrusive"] == pytest.approx(
                (row["dnsmos"] + row["nisqa"]) / 2.0, abs=1e-12)
            assert row["prism"] == pytest.approx(
                (row["intrusive"] + row["non_intrusive"]) / 2.0, abs=1e-12)


class TestCsv:
    def test_header_is_fixed(self):
        assert CSV_HEADER == ("model",) + METRIC_COLUMNS
        assert ",".join(CSV_HEADER) == (
            "model,pesq,stoi,sisnr,sig,bak,ovl,p808,mos,noi,dis,col,loud")

    def test_loads_reference(self):
        table = load_metric_csv(REFERENCE_CSV)
        assert len(table.models) == 18
        assert table.values.shape == (18, 12)

    def test_bad_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("model,pesq\nfoo,1.0\n")
        with pytest.raises(ValueError, match="header"):
            load_metric_csv(bad)

    def test_bad_cell_reports_line(self, tmp_path):
        bad = tmp_path / "bad.csv"
        rows = ["1.0"] * 12
        bad.write_text(",".join(CSV_HEADER) + "\n"
                       + "a," + ",".join(rows) + "\n"
                       + "b,oops," + ",".join(rows[1:]) + "\n")
        with pytest.raises(ValueError, match=r":3: bad value 'oops'"):
            load_metric_csv(bad)

    def test_single_row_rejected(self, tmp_path):
        bad = tmp_path / "one.csv"
        bad.write_text(",".join(CSV_HEADER) + "\n" + "a," + ",".join(["1.0"] * 12) + "\n")
        with pytest.raises(ValueError):
            load_metric_csv(bad)

    def test_empty_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("")
        with pytest.raises(ValueError):
            load_metric_csv(bad)


class TestFormatting:
    def test_json_round_trips(self):
        table = load_metric_csv(REFERENCE_CSV)
        report = prism_report(table)
        parsed = json.loads(format_report(report, "json"))
        assert parsed["DPDFNet-8"]["prism"] == pytest.approx(1.0)

    def test_text_contains_models_and_scores(self):
        table = load_metric_csv(REFERENCE_CSV)
        text = format_report(prism_report(table), "text")
        assert "DPDFNet-8" in text and "Noisy" in text

    def test_csv_output_parses(self):
        table = load_metric_csv(REFERENCE_CSV)
        out = format_report(prism_report(table), "csv")
        lines = out.strip().splitlines()
        assert len(lines) == 19  # header + 18 models
        assert lines[0].startswith("model,")
