"""Rectangular ERB-scale filterbank: band-energy analysis and gain synthesis.

Band edges are equally spaced on the ERB-rate scale
``erb(f) = 21.4 * log10(1 + 0.00437 f)`` and snapped to FFT bins.  Bands are
contiguous and non-overlapping; at low frequencies the ERB spacing drops below
one bin, so edges are greedily widened to keep every band at least one bin
wide.  Analysis averages member bins; synthesis broadcasts each band value
back to its bins (transposed, column-normalized), so analysis(synthesis(g))
is the identity on band vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal import StftConfig

#: Regularizer added to band power before the log.
ERB_EPS = 1e-10
#: Lower clamp of the compressed features in dB.
ERB_FLOOR_DB = -100.0


def hz_to_erb(hz):
    """Frequency (Hz) to ERB-rate units."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(hz, dtype=np.float64))


def erb_to_hz(erb):
    """Inverse of :func:`hz_to_erb`."""
    return (10.0 ** (np.asarray(erb, dtype=np.float64) / 21.4) - 1.0) / 0.00437


@dataclass(frozen=True)
class ErbFilterbank:
    """Band layout plus the averaging analysis matrix.

    band_edges are bin indices, length bands+1, strictly increasing, covering
    [0, fft_bins) exactly; band b owns bins [band_edges[b], band_edges[b+1]).
    """

    band_edges: np.ndarray
    fft_bins: int
    matrix: np.ndarray = field(init=False, repr=False)
    bin_to_band: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.asarray(self.band_edges, dtype=np.int64)
        object.__setattr__(self, "band_edges", edges)
        if edges.ndim != 1 or edges.size < 3:
            raise ValueError("band_edges must be a 1-D index vector with >= 2 bands")
        if edges[0] != 0 or edges[-1] != self.fft_bins:
            raise ValueError(
                f"band_edges must start at 0 and end at fft_bins={self.fft_bins}, "
                f"got [{edges[0]}, {edges[-1]}]"
            )
        if np.any(np.diff(edges) < 1):
            raise ValueError("every band must span at least one bin")
        widths = np.diff(edges)
        matrix = np.zeros((self.bands, self.fft_bins), dtype=np.float64)
        bin_to_band = np.empty(self.fft_bins, dtype=np.int64)
        for b in range(self.bands):
            lo, hi = edges[b], edges[b + 1]
            matrix[b, lo:hi] = 1.0 / widths[b]
            bin_to_band[lo:hi] = b
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "bin_to_band", bin_to_band)

    @property
    def bands(self) -> int:
        return self.band_edges.size - 1

    @property
    def band_widths(self) -> np.ndarray:
        return np.diff(self.band_edges)


def build_erb_filterbank(config: StftConfig, bands: int = 32) -> ErbFilterbank:
    """Construct the ERB-spaced rectangular bank for an analysis setup.

    Edges land on a uniform ERB-rate grid between DC and Nyquist, rounded to
    bins; a forward pass enforces the one-bin minimum width (widening the
    lowest bands), a backward clamp keeps room for the remaining bands, and a
    final smoothing pass restores non-decreasing widths if rounding ever
    produced an inversion.
    """
    fft_bins = config.fft_bins
    if bands < 2:
        raise ValueError(f"need at least 2 bands, got {bands}")
    if bands > fft_bins:
        raise ValueError(f"cannot split {fft_bins} bins into {bands} bands")
    grid = np.linspace(0.0, float(hz_to_erb(config.sample_rate / 2.0)), bands + 1)
    raw = np.round(erb_to_hz(grid) / config.bin_hz).astype(np.int64)
    edges = np.zeros(bands + 1, dtype=np.int64)
    edges[bands] = fft_bins
    for b in range(1, bands):
        e = min(int(raw[b]), fft_bins - (bands - b))
        edges[b] = max(e, edges[b - 1] + 1)
    widths = np.diff(edges)
    # rounding can in principle produce a wider band followed by a narrower
    # one; shift single bins downward until widths are non-decreasing
    changed = True
    while changed:
        changed = False
        for b in range(bands - 1):
            if widths[b] > widths[b + 1]:
                widths[b] -= 1
                widths[b + 1] += 1
                changed = True
    edges = np.concatenate(([0], np.cumsum(widths)))
    return ErbFilterbank(band_edges=edges, fft_bins=fft_bins)


def erb_compress(power_spec, fb: ErbFilterbank) -> np.ndarray:
    """Per-band mean power in dB: 10*log10(mean + 1e-10), clamped at -100 dB.

    power_spec is a real non-negative [T, fft_bins] array (|X|^2).
    """
    p = np.asarray(power_spec, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != fb.fft_bins:
        raise ValueError(f"expected [T, {fb.fft_bins}] power array, got shape {p.shape}")
    if p.size and np.min(p) < 0:
        raise ValueError("power spectrum has negative entries")
    band_power = p @ fb.matrix.T
    feats = 10.0 * np.log10(band_power + ERB_EPS)
    return np.maximum(feats, ERB_FLOOR_DB)


def erb_interpolate(gains, fb: ErbFilterbank) -> np.ndarray:
    """Expand per-band gains in [0, 1] to a full-resolution [.., fft_bins] mask.

    Each bin takes the value of the band that owns it, so an all-ones gain
    vector expands to an exactly-all-ones mask.
    """
    g = np.asarray(gains, dtype=np.float64)
    if g.shape[-1] != fb.bands:
        raise ValueError(f"expected {fb.bands} band gains, got shape {g.shape}")
    if g.size and (np.min(g) < 0.0 or np.max(g) > 1.0):
        raise ValueError("band gains must lie in [0, 1]")
    return g[..., fb.bin_to_band]
