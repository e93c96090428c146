"""SI-SNR and the PRISM composite score.

PRISM condenses a table of per-model quality metrics into one number per
model: min-max normalize each metric column across models, average within
metric families (intrusive, DNSMOS, NISQA), then average hierarchically —
non-intrusive = mean(DNSMOS, NISQA) and PRISM = mean(intrusive,
non-intrusive).  Every column is higher-is-better, and all rows (the noisy
condition included) take part in the normalization.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

#: Metric columns, in CSV order.
METRIC_COLUMNS = ("pesq", "stoi", "sisnr", "sig", "bak", "ovl", "p808",
                  "mos", "noi", "dis", "col", "loud")

#: Metric families used by the hierarchical average.
INTRUSIVE = ("pesq", "stoi", "sisnr")
DNSMOS = ("sig", "bak", "ovl", "p808")
NISQA = ("mos", "noi", "dis", "col", "loud")

CSV_HEADER = ("model",) + METRIC_COLUMNS

SI_SNR_CLAMP_DB = 120.0


def si_snr(estimate, reference) -> float:
    """Scale-invariant SNR of `estimate` against `reference`, in dB.

    The estimate is projected onto the reference; the returned ratio compares
    projected energy to residual energy, clamped to +120 dB when the residual
    vanishes (estimate equal to, or a positive multiple of, the reference).
    """
    y = np.asarray(estimate, dtype=np.float64)
    s = np.asarray(reference, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise ValueError(f"expected equal-length 1-D signals, got {y.shape} vs {s.shape}")
    ref_energy = float(np.dot(s, s))
    if ref_energy == 0.0:
        raise ValueError("reference signal is identically zero")
    target = (np.dot(y, s) / ref_energy) * s
    target_energy = float(np.dot(target, target))
    residual = y - target
    residual_energy = float(np.dot(residual, residual))
    if residual_energy < 1e-12 * target_energy:
        return SI_SNR_CLAMP_DB
    if target_energy == 0.0:
        return -SI_SNR_CLAMP_DB
    return float(10.0 * np.log10(target_energy / residual_energy))


def minmax_normalize(column) -> np.ndarray:
    """Map a column to [0, 1] with min → 0 and max → 1; constant columns → 0.5."""
    v = np.asarray(column, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a 1-D column with at least 2 entries")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.full(v.shape, 0.5)
    return (v - lo) / (hi - lo)


@dataclass(frozen=True)
class MetricTable:
    """Per-model metric values; one row per model, columns as METRIC_COLUMNS."""

    models: tuple
    values: np.ndarray  # [n_models, len(METRIC_COLUMNS)]

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "models", tuple(self.models))
        if vals.ndim != 2 or vals.shape != (len(self.models), len(METRIC_COLUMNS)):
            raise ValueError(
                f"expected [{len(self.models)}, {len(METRIC_COLUMNS)}] values, "
                f"got shape {vals.shape}"
            )
        if len(self.models) < 2:
            raise ValueError("need at least 2 rows to normalize")
        if not np.all(np.isfinite(vals)):
            row, col = np.argwhere(~np.isfinite(vals))[0]
            raise ValueError(
                f"non-finite value for model '{self.models[row]}', "
                f"column '{METRIC_COLUMNS[col]}'"
            )

    def column(self, name: str) -> np.ndarray:
        return self.values[:, METRIC_COLUMNS.index(name)]


def _group_mean(table: MetricTable, normalized: np.ndarray, names) -> np.ndarray:
    idx = [METRIC_COLUMNS.index(n) for n in names]
    return normalized[:, idx].mean(axis=1)


def prism_score(table: MetricTable) -> dict:
    """PRISM score per model, as an ordered name → value mapping."""
    return {name: row["prism"] for name, row in prism_report(table).items()}


def prism_report(table: MetricTable) -> dict:
    """Full breakdown: family composites, non-intrusive mean, and PRISM."""
    normalized = np.column_stack(
        [minmax_normalize(table.values[:, j]) for j in range(len(METRIC_COLUMNS))]
    )
    intrusive = _group_mean(table, normalized, INTRUSIVE)
    dnsmos = _group_mean(table, normalized, DNSMOS)
    nisqa = _group_mean(table, normalized, NISQA)
    non_intrusive = (dnsmos + nisqa) / 2.0
    prism = (intrusive + non_intrusive) / 2.0
    report = {}
    for i, name in enumerate(table.models):
        report[name] = {
            "intrusive": float(intrusive[i]),
            "dnsmos": float(dnsmos[i]),
            "nisqa": float(nisqa[i]),
            "non_intrusive": float(non_intrusive[i]),
            "prism": float(prism[i]),
        }
    return report


def load_metric_csv(path) -> MetricTable:
    """Parse a metric table; the header must match CSV_HEADER exactly."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(
                f"{path}: bad header {header!r}; expected {','.join(CSV_HEADER)}"
            )
        models, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}"
                )
            name = row[0].strip()
            vals = []
            for col, cell in zip(METRIC_COLUMNS, row[1:]):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: bad value {cell!r} for model '{name}', "
                        f"column '{col}'"
                    ) from None
            models.append(name)
            rows.append(vals)
    if len(models) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(models)}")
    return MetricTable(tuple(models), np.array(rows, dtype=np.float64))


def format_report(report: dict, fmt: str = "text") -> str:
    """Render a prism_report mapping as text, JSON, or CSV."""
    if fmt == "json":
        return json.dumps(report, indent=2)
    header = ("model", "intrusive", "dnsmos", "nisqa", "non_intrusive", "prism")
    if fmt == "csv":
        lines = [",".join(header)]
        for name, row in report.items():
            lines.append(",".join([name] + [f"{row[k]:.4f}" for k in header[1:]]))
        return "\n".join(lines)
    if fmt == "text":
        width = max(len("model"), *(len(n) for n in report))
        lines = [f"{'model':<{width}}  " + "  ".join(f"{h:>13}" for h in header[1:])]
        for name, row in report.items():
            cells = "  ".join(f"{row[k]:>13.4f}" for k in header[1:])
            lines.append(f"{name:<{width}}  {cells}")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")
