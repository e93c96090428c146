"""Thin WAV layer: mono 16-bit PCM or 32-bit float, no resampling.

Reads into float64 in [-1, 1]; rejects anything the engine can't honestly
process (multichannel, unsupported encodings).  Sample-rate policy is the
caller's job — read_wav returns the file's rate untouched.
"""

from __future__ import annotations

import numpy as np
from scipy.io import wavfile


def read_wav(path):
    """Return (samples: float64 1-D, sample_rate). PCM16 is scaled by 1/32768."""
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ValueError(f"{path}: not a readable WAV file ({exc})") from exc
    if data.ndim != 1:
        raise ValueError(f"{path}: expected mono audio, got {data.shape[1]} channels")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    elif data.dtype == np.float64:
        samples = data.copy()
    else:
        raise ValueError(
            f"{path}: unsupported sample format {data.dtype}; "
            "use 16-bit PCM or 32-bit float"
        )
    return samples, int(rate)


def write_wav(path, samples, sample_rate: int, encoding: str = "pcm16") -> None:
    """Write mono audio as 16-bit PCM (values clipped to [-1, 1]) or float32."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected 1-D mono samples, got shape {x.shape}")
    if encoding == "pcm16":
        scaled = np.clip(x, -1.0, 1.0) * 32767.0
        wavfile.write(path, sample_rate, np.round(scaled).astype(np.int16))
    elif encoding == "float32":
        wavfile.write(path, sample_rate, x.astype(np.float32))
    else:
        raise ValueError(f"unknown encoding {encoding!r}; use 'pcm16' or 'float32'")
