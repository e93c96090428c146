"""Windowing and short-time analysis/synthesis for the 16 kHz streaming front end.

The engine operates on 20 ms Vorbis-windowed frames with a 10 ms hop.  The
Vorbis window is power-complementary at 50% overlap, so the same window is
used for analysis and synthesis and overlap-add reconstructs interior samples
exactly (up to float rounding).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StftConfig:
    """Frame layout of the analysis/synthesis chain.

    The hop is pinned to half the window and the one-sided spectrum size to
    ``window_len/2 + 1`` (no zero padding before the FFT).
    """

    sample_rate: int = 16000
    window_len: int = 320
    hop: int = 160
    fft_bins: int = 161

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.window_len < 2 or self.window_len % 2:
            raise ValueError(f"window_len must be even and >= 2, got {self.window_len}")
        if self.hop != self.window_len // 2:
            raise ValueError(
                f"hop must equal window_len/2 ({self.window_len // 2}), got {self.hop}"
            )
        if self.fft_bins != self.window_len // 2 + 1:
            raise ValueError(
                f"fft_bins must equal window_len/2 + 1 ({self.window_len // 2 + 1}), "
                f"got {self.fft_bins}"
            )

    @property
    def bin_hz(self) -> float:
        """Width of one frequency bin in Hz."""
        return self.sample_rate / self.window_len

    def frame_count(self, n_samples: int) -> int:
        """Number of analysis frames for an ``n_samples``-long signal (ceil)."""
        if n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        return -(-n_samples // self.hop)


#: Default analysis setup: 20 ms window / 10 ms hop at 16 kHz, 161 bins.
STFT_16K = StftConfig()


@dataclass(frozen=True)
class ComplexSpectrogram:
    """Complex time-frequency matrix: frames on axis 0, bins on axis 1."""

    data: np.ndarray
    config: StftConfig

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"spectrogram data must be 2-D, got shape {self.data.shape}")
        if self.data.shape[1] != self.config.fft_bins:
            raise ValueError(
                f"spectrogram has {self.data.shape[1]} bins, config expects "
                f"{self.config.fft_bins}"
            )

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    def power(self) -> np.ndarray:
        """Per-bin power |X|^2 as a real [T, F] array."""
        return (self.data.real ** 2 + self.data.imag ** 2)


def vorbis_window(length: int) -> np.ndarray:
    """Vorbis window w[n] = sin(pi/2 * sin^2(pi*(n+0.5)/L)).

    Symmetric, and power complementary at 50% overlap:
    w[n]^2 + w[n + L/2]^2 == 1, which makes analysis+synthesis with the same
    window an exact COLA pair.
    """
    if length < 2 or length % 2:
        raise ValueError(f"window length must be even and >= 2, got {length}")
    n = np.arange(length, dtype=np.float64)
    inner = np.sin(np.pi * (n + 0.5) / length)
    return np.sin(0.5 * np.pi * inner * inner)


def _frame_signal(x: np.ndarray, config: StftConfig) -> np.ndarray:
    """Slice a 1-D signal into [T, window_len] frames, zero-padding the tail.

    Frame k covers samples [k*hop, k*hop + window_len); T = ceil(len/hop), so
    trailing partial content still produces a frame.
    """
    n_frames = config.frame_count(x.size)
    if n_frames == 0:
        return np.zeros((0, config.window_len), dtype=np.float64)
    padded_len = (n_frames - 1) * config.hop + config.window_len
    padded = np.zeros(padded_len, dtype=np.float64)
    padded[: x.size] = x
    view = np.lib.stride_tricks.sliding_window_view(padded, config.window_len)
    return view[:: config.hop].copy()  # writable (the strided view is read-only)


def stft(samples, config: StftConfig = STFT_16K) -> ComplexSpectrogram:
    """Windowed one-sided FFT analysis of a mono signal.

    Frame k depends only on samples below (k+2)*hop; an empty input yields an
    empty (0-frame) spectrogram.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"stft expects a 1-D mono signal, got shape {x.shape}")
    if x.size and not np.all(np.isfinite(x)):
        raise ValueError("stft input contains non-finite samples")
    frames = _frame_signal(x, config)
    frames *= vorbis_window(config.window_len)
    return ComplexSpectrogram(np.fft.rfft(frames, axis=1), config)


def istft(spec: ComplexSpectrogram, config: StftConfig | None = None) -> np.ndarray:
    """Overlap-add synthesis with the same Vorbis window used for analysis.

    Returns T*hop samples; istft(stft(x)) reproduces x exactly on
    [hop, T*hop) and bit-near-exactly in float64.  The final half window of
    the last frame falls beyond T*hop and is dropped (the next frame would
    have completed it).
    """
    if config is not None and config != spec.config:
        raise ValueError(
            f"config mismatch: spectrogram built with {spec.config}, istft given {config}"
        )
    cfg = spec.config
    n_frames = spec.n_frames
    if n_frames == 0:
        return np.zeros(0, dtype=np.float64)
    win = vorbis_window(cfg.window_len)
    frames = np.fft.irfft(spec.data, n=cfg.window_len, axis=1) * win
    out = np.zeros((n_frames - 1) * cfg.hop + cfg.window_len, dtype=np.float64)
    for k in range(n_frames):
        start = k * cfg.hop
        out[start : start + cfg.window_len] += frames[k]
    return out[: n_frames * cfg.hop]
