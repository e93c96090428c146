"""Evaluation-clip construction and audio augmentations.

SNR-exact speech/noise mixing, random second-order coloration filters, gain
perturbation, early/late impulse-response splitting, and long low-SNR clip
assembly with silence gaps.  Every randomized operation is deterministic
under its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

#: Frame length for speech-activity measurement (10 ms at 16 kHz).
ACTIVITY_FRAME_MS = 10.0
#: Frames quieter than this (dB re full scale 1.0) don't count as speech.
ACTIVITY_THRESHOLD_DB = -40.0

GAIN_RANGE_DB = (-10.0, 10.0)
BIQUAD_GAIN_RANGE_DB = (-6.0, 6.0)
BIQUAD_FREQ_RANGE_HZ = (100.0, 7000.0)


@dataclass(frozen=True)
class MixSpec:
    """Target layout for an evaluation clip."""

    snr_db: float
    clip_duration: float = 150.0
    max_silence_gap: float = 15.0
    sample_rate: int = 16000

    def __post_init__(self):
        if self.clip_duration <= 0:
            raise ValueError(f"clip duration must be positive, got {self.clip_duration}")
        if self.max_silence_gap < 0:
            raise ValueError(f"max silence gap must be >= 0, got {self.max_silence_gap}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")


def _active_speech_power(x: np.ndarray, sample_rate: int) -> float:
    """Mean power over frames louder than the activity threshold; 0 if none."""
    frame = max(1, int(round(sample_rate * ACTIVITY_FRAME_MS / 1000.0)))
    n_frames = x.size // frame
    if n_frames == 0:
        powers = np.array([np.mean(x**2)]) if x.size else np.zeros(0)
    else:
        powers = np.mean(x[: n_frames * frame].reshape(n_frames, frame) ** 2, axis=1)
    if powers.size == 0:
        return 0.0
    threshold = 10.0 ** (ACTIVITY_THRESHOLD_DB / 10.0)
    active = powers > threshold
    if not np.any(active):
        return 0.0
    return float(np.mean(powers[active]))


def _loop_to_length(noise: np.ndarray, length: int, offset: int) -> np.ndarray:
    """Cyclically read `length` samples from `noise` starting at `offset`."""
    idx = (offset + np.arange(length)) % noise.size
    return noise[idx]


def mix_at_snr(speech, noise, snr_db: float, seed: int = 0):
    """Mix noise under speech at an exact SNR.

    Speech power is measured over speech-active frames only (so silence gaps
    don't dilute it); noise power over the whole clip.  The noise is looped or
    truncated to the speech length, starting at a seed-chosen offset.  Returns
    (mixture, speech, scaled_noise) with mixture == speech + scaled_noise.
    """
    s = np.asarray(speech, dtype=np.float64)
    n = np.asarray(noise, dtype=np.float64)
    if s.ndim != 1 or n.ndim != 1 or s.size == 0 or n.size == 0:
        raise ValueError("speech and noise must be non-empty 1-D arrays")
    sample_rate = 16000
    p_speech = _active_speech_power(s, sample_rate)
    if p_speech == 0.0:
        raise ValueError("speech is silent (no frames above the activity threshold)")
    rng = np.random.default_rng(seed)
    offset = int(rng.integers(0, n.size))
    n_fit = _loop_to_length(n, s.size, offset)
    p_noise = float(np.mean(n_fit**2))
    if p_noise == 0.0:
        raise ValueError("noise is silent over the mixed span")
    scale = np.sqrt(p_speech / p_noise * 10.0 ** (-snr_db / 10.0))
    n_scaled = scale * n_fit
    return s + n_scaled, s, n_scaled


def measure_snr(speech, noise, sample_rate: int = 16000) -> float:
    """Active-speech power over noise power, in dB (for verifying mixes)."""
    s = np.asarray(speech, dtype=np.float64)
    n = np.asarray(noise, dtype=np.float64)
    p_speech = _active_speech_power(s, sample_rate)
    p_noise = float(np.mean(n**2))
    if p_speech == 0.0 or p_noise == 0.0:
        raise ValueError("cannot measure SNR of silent signals")
    return float(10.0 * np.log10(p_speech / p_noise))


@dataclass(frozen=True)
class BiquadCoeffs:
    """Normalized second-order section (a0 == 1); poles must be stable."""

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    def __post_init__(self):
        roots = np.roots([1.0, self.a1, self.a2])
        if roots.size and np.max(np.abs(roots)) >= 1.0:
            raise ValueError(f"unstable filter: pole magnitude {np.max(np.abs(roots)):.4f}")

    IDENTITY = None  # filled in below


BiquadCoeffs.IDENTITY = BiquadCoeffs(1.0, 0.0, 0.0, 0.0, 0.0)


def _peaking(f0: float, gain_db: float, q: float, sample_rate: int) -> BiquadCoeffs:
    amp = 10.0 ** (gain_db / 40.0)
    w0 = 2.0 * np.pi * f0 / sample_rate
    alpha = np.sin(w0) / (2.0 * q)
    a0 = 1.0 + alpha / amp
    return BiquadCoeffs(
        b0=(1.0 + alpha * amp) / a0,
        b1=(-2.0 * np.cos(w0)) / a0,
        b2=(1.0 - alpha * amp) / a0,
        a1=(-2.0 * np.cos(w0)) / a0,
        a2=(1.0 - alpha / amp) / a0,
    )


def _shelf(f0: float, gain_db: float, sample_rate: int, high: bool) -> BiquadCoeffs:
    amp = 10.0 ** (gain_db / 40.0)
    w0 = 2.0 * np.pi * f0 / sample_rate
    cos_w0 = np.cos(w0)
    alpha = np.sin(w0) / 2.0 * np.sqrt(2.0)  # shelf slope S = 1
    sq = 2.0 * np.sqrt(amp) * alpha
    if high:
        b0 = amp * ((amp + 1) + (amp - 1) * cos_w0 + sq)
        b1 = -2.0 * amp * ((amp - 1) + (amp + 1) * cos_w0)
        b2 = amp * ((amp + 1) + (amp - 1) * cos_w0 - sq)
        a0 = (amp + 1) - (amp - 1) * cos_w0 + sq
        a1 = 2.0 * ((amp - 1) - (amp + 1) * cos_w0)
        a2 = (amp + 1) - (amp - 1) * cos_w0 - sq
    else:
        b0 = amp * ((amp + 1) - (amp - 1) * cos_w0 + sq)
        b1 = 2.0 * amp * ((amp - 1) - (amp + 1) * cos_w0)
        b2 = amp * ((amp + 1) - (amp - 1) * cos_w0 - sq)
        a0 = (amp + 1) + (amp - 1) * cos_w0 + sq
        a1 = -2.0 * ((amp - 1) + (amp + 1) * cos_w0)
        a2 = (amp + 1) + (amp - 1) * cos_w0 - sq
    return BiquadCoeffs(b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0)


def random_biquad(seed: int, sample_rate: int = 16000) -> BiquadCoeffs:
    """Random stable coloration filter: peaking or shelving, mild gain.

    Gain uniform in ±6 dB, center/corner frequency log-uniform in
    [100, 7000] Hz.
    """
    rng = np.random.default_rng(seed)
    kind = rng.integers(0, 3)  # 0 = peaking, 1 = low shelf, 2 = high shelf
    lo, hi = BIQUAD_FREQ_RANGE_HZ
    f0 = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
    gain_db = float(rng.uniform(*BIQUAD_GAIN_RANGE_DB))
    if kind == 0:
        q = float(rng.uniform(0.5, 1.5))
        return _peaking(f0, gain_db, q, sample_rate)
    return _shelf(f0, gain_db, sample_rate, high=(kind == 2))


def apply_biquad(x, coeffs: BiquadCoeffs) -> np.ndarray:
    """Run the difference equation over the signal (zero initial state)."""
    x = np.asarray(x, dtype=np.float64)
    return lfilter([coeffs.b0, coeffs.b1, coeffs.b2], [1.0, coeffs.a1, coeffs.a2], x)


def random_gain(x, seed: int) -> np.ndarray:
    """Scale by a uniform random offset in ±10 dB."""
    rng = np.random.default_rng(seed)
    gain_db = rng.uniform(*GAIN_RANGE_DB)
    return np.asarray(x, dtype=np.float64) * 10.0 ** (gain_db / 20.0)


def split_rir(rir, split_ms: float = 50.0, fade_ms: float = 5.0,
              sample_rate: int = 16000):
    """Split an impulse response at (direct-path peak + split_ms).

    Returns (early, late), both the full length of the input, blended with a
    raised-cosine crossfade of `fade_ms` so that early + late == rir exactly.
    """
    h = np.asarray(rir, dtype=np.float64)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("impulse response must be a non-empty 1-D array")
    peak = int(np.argmax(np.abs(h)))
    split = peak + int(round(split_ms * sample_rate / 1000.0))
    fade = max(1, int(round(fade_ms * sample_rate / 1000.0)))
    weight = np.ones(h.size)
    if split < h.size:
        ramp = 0.5 * (1.0 + np.cos(np.pi * np.arange(fade) / fade))
        end = min(split + fade, h.size)
        weight[split:end] = ramp[: end - split]
        weight[end:] = 0.0
    early = h * weight
    late = h - early
    return early, late


def assemble_eval_clip(segments, noise, spec: MixSpec, seed: int = 0):
    """Build a long evaluation clip from speech segments over a noise bed.

    Segments are laid out in order with silence gaps uniform in
    [0, max_silence_gap] seconds and a per-segment gain perturbation of
    ±10 dB; a segment crossing the clip end is trimmed.  Raises if the
    material runs out more than one maximum gap before the end.  Returns
    (mixture, clean, meta): the noisy clip, the aligned speech-only
    reference, and a JSON-ready placement record.
    """
    segs = [np.asarray(s, dtype=np.float64) for s in segments]
    if not segs or any(s.ndim != 1 or s.size == 0 for s in segs):
        raise ValueError("need at least one non-empty 1-D speech segment")
    noise = np.asarray(noise, dtype=np.float64)
    sr = spec.sample_rate
    total = int(round(spec.clip_duration * sr))
    max_gap = int(round(spec.max_silence_gap * sr))

    rng = np.random.default_rng(seed)
    clean = np.zeros(total)
    placements = []
    pos = 0
    for i, seg in enumerate(segs):
        pos += int(rng.integers(0, max_gap + 1))
        if pos >= total:
            break
        gain_db = float(rng.uniform(*GAIN_RANGE_DB))
        placed = seg[: total - pos] * 10.0 ** (gain_db / 20.0)
        clean[pos : pos + placed.size] = placed
        placements.append({
            "segment": i,
            "start": pos,
            "length": int(placed.size),
            "gain_db": round(gain_db, 4),
        })
        pos += seg.size
    if pos < total - max_gap:
        short = (total - max_gap) - pos
        raise ValueError(
            f"insufficient speech material: {short} samples "
            f"({short / sr:.1f} s) short of the clip duration"
        )

    mix_seed = int(rng.integers(0, 2**32))
    mixture, _, _ = mix_at_snr(clean, noise, spec.snr_db, seed=mix_seed)
    meta = {
        "seed": seed,
        "snr_db": spec.snr_db,
        "sample_rate": sr,
        "clip_samples": total,
        "segments": placements,
        "noise_seed": mix_seed,
    }
    return mixture, clean, meta
