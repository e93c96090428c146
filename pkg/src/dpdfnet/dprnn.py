"""Dual-path recurrent block: bidirectional intra-frame pass over frequency,
then a causal shared-parameter inter-frame pass over time.

Both stages follow RNN -> position-wise FC -> LayerNorm with a residual
connection (out = x + LN(FC(RNN(x)))).  The intra stage treats every frame
independently (so it never breaks causality); the inter stage runs one GRU
per frequency index with shared weights and carries its states across calls,
which is what makes chunked processing equal whole-sequence processing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn.ops import GruParams, gru_sequence, layer_norm


@dataclass(frozen=True)
class DprnnBlockParams:
    """Weights of one dual-path block over [B, T, F, D] features.

    The intra GRUs run over F with hidden D/2 per direction (concatenated back
    to D); the inter GRU runs over T with hidden D, shared across frequencies.
    """

    intra_fw: GruParams
    intra_bw: GruParams
    intra_fc_w: np.ndarray
    intra_fc_b: np.ndarray
    intra_ln_gain: np.ndarray
    intra_ln_bias: np.ndarray
    inter_gru: GruParams
    inter_fc_w: np.ndarray
    inter_fc_b: np.ndarray
    inter_ln_gain: np.ndarray
    inter_ln_bias: np.ndarray

    def __post_init__(self):
        d = self.feature_dim
        if self.intra_fw.hidden * 2 != d or self.intra_bw.hidden * 2 != d:
            raise ValueError("intra GRU hidden size must be D/2 per direction")
        if self.inter_gru.input_dim != d or self.inter_gru.hidden != d:
            raise ValueError("inter GRU must map D -> D")
        if self.intra_fc_w.shape != (d, d) or self.inter_fc_w.shape != (d, d):
            raise ValueError("FC layers must map D -> D")

    @property
    def feature_dim(self) -> int:
        return self.intra_fw.input_dim

    @property
    def param_count(self) -> int:
        return (
            self.intra_fw.param_count
            + self.intra_bw.param_count
            + self.intra_fc_w.size + self.intra_fc_b.size
            + self.intra_ln_gain.size + self.intra_ln_bias.size
            + self.inter_gru.param_count
            + self.inter_fc_w.size + self.inter_fc_b.size
            + self.inter_ln_gain.size + self.inter_ln_bias.size
        )


def init_inter_state(batch: int, freqs: int, feature_dim: int) -> np.ndarray:
    """Fresh zero state for the inter stage: one hidden vector per frequency."""
    return np.zeros((batch, freqs, feature_dim), dtype=np.float64)


def dprnn_intra(x, params: DprnnBlockParams):
    """Bidirectional pass along frequency within each frame; stateless."""
    x = np.asarray(x, dtype=np.float64)
    b, t, f, d = x.shape
    if d != params.feature_dim:
        raise ValueError(f"feature dim {d} does not match params ({params.feature_dim})")
    if t == 0:
        return x.copy()
    seq = x.reshape(b * t, f, d).transpose(1, 0, 2)  # [F, B*T, D]
    fw, _ = gru_sequence(seq, params.intra_fw)
    bw_rev, _ = gru_sequence(seq[::-1], params.intra_bw)
    h = np.concatenate([fw, bw_rev[::-1]], axis=-1)  # [F, B*T, D]
    y = h @ params.intra_fc_w + params.intra_fc_b
    y = layer_norm(y, params.intra_ln_gain, params.intra_ln_bias)
    y = y.transpose(1, 0, 2).reshape(b, t, f, d)
    return x + y


def dprnn_inter(x, params: DprnnBlockParams, state=None):
    """Causal pass along time, one shared-weight GRU per frequency index.

    state: [B, F, D] hidden states (zeros when None).  Returns (out, state').
    """
    x = np.asarray(x, dtype=np.float64)
    b, t, f, d = x.shape
    if d != params.feature_dim:
        raise ValueError(f"feature dim {d} does not match params ({params.feature_dim})")
    if state is None:
        state = init_inter_state(b, f, d)
    else:
        state = np.asarray(state, dtype=np.float64)
        if state.shape != (b, f, d):
            raise ValueError(
                f"inter state shape {state.shape} does not match (B={b}, F={f}, D={d})"
            )
    if t == 0:
        return x.copy(), state.copy()
    seq = x.transpose(1, 0, 2, 3).reshape(t, b * f, d)  # [T, B*F, D]
    h, h_last = gru_sequence(seq, params.inter_gru, state.reshape(b * f, d))
    y = h @ params.inter_fc_w + params.inter_fc_b
    y = layer_norm(y, params.inter_ln_gain, params.inter_ln_bias)
    y = y.reshape(t, b, f, d).transpose(1, 0, 2, 3)
    return x + y, h_last.reshape(b, f, d)


def dprnn_block(x, params: DprnnBlockParams, state=None):
    """Full block: intra (frequency) stage then inter (time) stage."""
    y = dprnn_intra(x, params)
    return dprnn_inter(y, params, state)
