"""WAV round-trip and rejection tests."""

import numpy as np
import pytest
from scipy.io import wavfile

from dpdfnet.wavio import read_wav, write_wav


def test_pcm16_round_trip(tmp_path):
    path = tmp_path / "a.wav"
    x = 0.5 * np.sin(2 * np.pi * 440.0 * np.arange(1600) / 16000.0)
    write_wav(path, x, 16000)
    got, rate = read_wav(path)
    assert rate == 16000
    assert got.dtype == np.float64
    assert np.max(np.abs(got - x)) <= 1.0 / 32767.0


def test_float32_round_trip(tmp_path):
    path = tmp_path / "b.wav"
    x = np.random.default_rng(0).standard_normal(800) * 0.1
    write_wav(path, x, 16000, encoding="float32")
    got, rate = read_wav(path)
    assert rate == 16000
    assert np.max(np.abs(got - x)) <= 1e-7


def test_pcm16_clips_out_of_range(tmp_path):
    path = tmp_path / "c.wav"
    write_wav(path, np.array([2.0, -2.0]), 16000)
    got, _ = read_wav(path)
    assert np.max(np.abs(got)) <= 1.0


def test_stereo_rejected(tmp_path):
    path = tmp_path / "st.wav"
    wavfile.write(path, 16000, np.zeros((100, 2), dtype=np.int16))
    with pytest.raises(ValueError, match="channel"):
        read_wav(path)


def test_unsupported_dtype_rejected(tmp_path):
    path = tmp_path / "u8.wav"
    wavfile.write(path, 16000, np.zeros(100, dtype=np.uint8))
    with pytest.raises(ValueError):
        read_wav(path)


def test_unknown_encoding_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_wav(tmp_path / "x.wav", np.zeros(10), 16000, encoding="pcm24")


def test_missing_file(tmp_path):
    with pytest.raises((OSError, FileNotFoundError)):
        read_wav(tmp_path / "nope.wav")
