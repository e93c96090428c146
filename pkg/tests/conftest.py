"""Shared test helpers: brute-force spectral oracles and a rigged model."""

import numpy as np

from dpdfnet.model import ModelConfig


def naive_dft(frame):
    """O(L^2) real-input DFT, kept deliberately independent of np.fft."""
    frame = np.asarray(frame, dtype=np.float64)
    length = frame.size
    n = np.arange(length)
    k = n[: length // 2 + 1]
    basis = np.exp(-2j * np.pi * np.outer(k, n) / length)
    return basis @ frame


def naive_stft(x, window_len, hop):
    """Brute-force analysis: explicit framing, explicit window, naive DFT."""
    x = np.asarray(x, dtype=np.float64)
    n_frames = -(-x.size // hop)
    padded = np.zeros((n_frames - 1) * hop + window_len)
    padded[: x.size] = x
    n = np.arange(window_len) + 0.5
    window = np.sin(0.5 * np.pi * np.sin(np.pi * n / window_len) ** 2)
    rows = []
    for k in range(n_frames):
        rows.append(naive_dft(window * padded[k * hop : k * hop + window_len]))
    return np.array(rows)


class IdentityModel:
    """Model stand-in that requests no change: unit gains, identity filters."""

    def __init__(self, config=None):
        self.config = config or ModelConfig()

    def new_state(self):
        return None

    def forward(self, erb_feats, df_spec, state):
        n_frames = np.asarray(erb_feats).shape[0]
        gains = np.ones((n_frames, self.config.erb_bands))
        coefs = np.zeros((n_frames, self.config.df_order + 1, self.config.df_bins),
                         dtype=np.complex128)
        coefs[:, self.config.lookahead, :] = 1.0
        return gains, coefs, state
