"""Spectral verification losses.

Multi-resolution compressed-spectrum loss plus an over-attenuation variant
that only counts bins where the output magnitude fell below the target.
Forward computation only — these are used as verification metrics, not for
training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal import StftConfig, stft

#: Default analysis window sizes in milliseconds.
MR_WINDOWS_MS = (5.0, 10.0, 20.0, 40.0)


@dataclass(frozen=True)
class MrLossConfig:
    """Resolutions and weighting for the spectral losses."""

    window_sizes_ms: tuple = MR_WINDOWS_MS
    compression: float = 0.3
    mr_weight: float = 500.0
    oa_weight: float = 500.0
    sample_rate: int = 16000

    def __post_init__(self):
        if not 0.0 < self.compression <= 1.0:
            raise ValueError(f"compression must lie in (0, 1], got {self.compression}")
        if not self.window_sizes_ms or any(w <= 0 for w in self.window_sizes_ms):
            raise ValueError("window sizes must be positive")
        if self.mr_weight < 0 or self.oa_weight < 0:
            raise ValueError("loss weights must be nonnegative")

    def stft_configs(self) -> list:
        """One STFT per resolution: stated window, half-window hop."""
        configs = []
        for ms in self.window_sizes_ms:
            window = int(round(self.sample_rate * ms / 1000.0))
            if window % 2:
                raise ValueError(f"window of {ms} ms is odd at {self.sample_rate} Hz")
            configs.append(StftConfig(sample_rate=self.sample_rate, window_len=window,
                                      hop=window // 2, fft_bins=window // 2 + 1))
        return configs


DEFAULT_LOSS_CONFIG = MrLossConfig()


def compress_spectrum(z, c: float):
    """Return (|Z|^c, |Z|^c · e^{j∠Z}); the phase of a zero bin counts as 0."""
    if c <= 0:
        raise ValueError(f"compression must be positive, got {c}")
    z = np.asarray(z, dtype=np.complex128)
    mag = np.abs(z)
    mag_c = mag**c
    phasor = np.zeros_like(z)
    nz = mag > 0
    phasor[nz] = z[nz] * (mag[nz] ** (c - 1.0))
    return mag_c, phasor


def _resolution_terms(y, s, config: MrLossConfig):
    """Yield per-resolution (mag_y, mag_s, phasor_y, phasor_s) tuples."""
    for stft_cfg in config.stft_configs():
        spec_y = stft(y, stft_cfg).data
        spec_s = stft(s, stft_cfg).data
        mag_y, ph_y = compress_spectrum(spec_y, config.compression)
        mag_s, ph_s = compress_spectrum(spec_s, config.compression)
        yield mag_y, mag_s, ph_y, ph_s


def _check_pair(y, s):
    y = np.asarray(y, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if y.ndim != 1 or s.ndim != 1:
        raise ValueError("expected 1-D sample arrays")
    if y.size != s.size:
        raise ValueError(f"length mismatch: {y.size} vs {s.size}")
    return y, s


def mr_loss(y, s, config: MrLossConfig = DEFAULT_LOSS_CONFIG) -> float:
    """Sum over resolutions of squared compressed-magnitude and phasor gaps.

    Plain unaveraged sums; zero exactly when y == s.
    """
    y, s = _check_pair(y, s)
    total = 0.0
    for mag_y, mag_s, ph_y, ph_s in _resolution_terms(y, s, config):
        total += np.sum((mag_y - mag_s) ** 2)
        total += np.sum(np.abs(ph_y - ph_s) ** 2)
    return float(total)


def oa_mask(s_spec, y_spec) -> np.ndarray:
    """Binary mask marking bins where the target magnitude exceeds the output's."""
    s_spec = np.asarray(s_spec)
    y_spec = np.asarray(y_spec)
    if s_spec.shape != y_spec.shape:
        raise ValueError(f"shape mismatch: {s_spec.shape} vs {y_spec.shape}")
    return (np.abs(s_spec) > np.abs(y_spec)).astype(np.float64)


def oa_loss(y, s, config: MrLossConfig = DEFAULT_LOSS_CONFIG) -> float:
    """Over-attenuation loss: the mr_loss terms restricted to under-shot bins."""
    y, s = _check_pair(y, s)
    total = 0.0
    for mag_y, mag_s, ph_y, ph_s in _resolution_terms(y, s, config):
        mask = mag_s > mag_y  # |S|^c > |Y|^c iff |S| > |Y| for positive exponents
        total += np.sum(((mag_y - mag_s) * mask) ** 2)
        total += np.sum(np.abs((ph_y - ph_s) * mask) ** 2)
    return float(total)


def total_loss(y, s, config: MrLossConfig = DEFAULT_LOSS_CONFIG) -> float:
    """Weighted combination of the two losses."""
    return config.mr_weight * mr_loss(y, s, config) + config.oa_weight * oa_loss(y, s, config)
