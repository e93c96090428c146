"""Inference building blocks: GRU, grouped linear, layer norm, conv blocks.

Tensor layout convention for convolutional paths is [B, T, F, D]
(batch, frames, frequency, channels/features).  All ops here are causal in T
by construction: convs have kernel extent 1 in time, recurrences run forward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _activate(x, activation):
    if activation is None or activation == "linear":
        return x
    if activation == "relu":
        return np.maximum(x, 0.0)
    if activation == "sigmoid":
        return sigmoid(x)
    raise ValueError(f"unknown activation {activation!r}")


# ---------------------------------------------------------------------------
# GRU


@dataclass(frozen=True)
class GruParams:
    """Single-layer GRU weights.

    w_in: [input_dim, 3*hidden], w_rec: [hidden, 3*hidden], bias: [3*hidden],
    gate order (update z, reset r, candidate).  One bias per gate; the reset
    gate scales the recurrent contribution inside the candidate:
        z = sigmoid(Wz x + Uz h + bz)
        r = sigmoid(Wr x + Ur h + br)
        c = tanh(Wc x + bc + r * (Uc h))
        h' = (1 - z) * c + z * h
    """

    w_in: np.ndarray
    w_rec: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        if self.w_in.ndim != 2 or self.w_rec.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("GruParams tensors have wrong ranks")
        hidden = self.w_rec.shape[0]
        if self.w_rec.shape[1] != 3 * hidden:
            raise ValueError(f"w_rec must be [H, 3H], got {self.w_rec.shape}")
        if self.w_in.shape[1] != 3 * hidden or self.bias.shape[0] != 3 * hidden:
            raise ValueError("w_in/bias gate width does not match w_rec")

    @property
    def input_dim(self) -> int:
        return self.w_in.shape[0]

    @property
    def hidden(self) -> int:
        return self.w_rec.shape[0]

    @property
    def param_count(self) -> int:
        return self.w_in.size + self.w_rec.size + self.bias.size


def gru_sequence(x, params: GruParams, h0=None):
    """Batched GRU over [S, B, input_dim] with initial state [B, hidden]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != params.input_dim:
        raise ValueError(
            f"expected [S, B, {params.input_dim}] input, got shape {x.shape}"
        )
    steps, batch, _ = x.shape
    if h0 is None:
        h0 = np.zeros((batch, params.hidden), dtype=np.float64)
    else:
        h0 = np.asarray(h0, dtype=np.float64)
        if h0.shape != (batch, params.hidden):
            raise ValueError(
                f"state shape {h0.shape} does not match (B={batch}, H={params.hidden})"
            )
    x_proj = x @ params.w_in + params.bias
    return kernels.gru_core(x_proj, params.w_rec, h0)


def gru_forward(x, params: GruParams, state=None):
    """Single-sequence GRU: x [T, input_dim], state [hidden] (zeros if None).

    Returns ([T, hidden] outputs, final [hidden] state).  Zero-length input
    passes the state through untouched.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"gru_forward expects [T, input_dim], got shape {x.shape}")
    h0 = None if state is None else np.asarray(state, dtype=np.float64)[None, :]
    out, h = gru_sequence(x[:, None, :], params, h0)
    return out[:, 0, :], h[0]


# ---------------------------------------------------------------------------
# grouped linear


@dataclass(frozen=True)
class GroupedLinearParams:
    """Block-diagonal affine map.

    weight: [groups, out_per_group, in_per_group]; each block acts on its
    input slice as ``block @ x_slice``.  bias: [groups * out_per_group] or None.
    """

    weight: np.ndarray
    bias: np.ndarray | None = None

    def __post_init__(self):
        if self.weight.ndim != 3:
            raise ValueError(f"weight must be [G, out, in], got shape {self.weight.shape}")
        if self.bias is not None and self.bias.shape != (self.out_dim,):
            raise ValueError(
                f"bias shape {self.bias.shape} does not match out_dim {self.out_dim}"
            )

    @property
    def groups(self) -> int:
        return self.weight.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weight.shape[0] * self.weight.shape[2]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0] * self.weight.shape[1]

    @property
    def param_count(self) -> int:
        return self.weight.size + (0 if self.bias is None else self.bias.size)


def grouped_linear(x, params: GroupedLinearParams, groups: int | None = None):
    """Apply a grouped linear map along the last axis.

    ``groups`` is accepted for call-site clarity and must agree with the
    parameter block count when given.
    """
    if groups is not None and groups != params.groups:
        raise ValueError(f"groups={groups} but params carry {params.groups} blocks")
    x = np.asarray(x, dtype=np.float64)
    g, out_g, in_g = params.weight.shape
    if x.shape[-1] != g * in_g:
        raise ValueError(
            f"input feature dim {x.shape[-1]} not divisible into {g} groups of {in_g}"
        )
    xg = x.reshape(x.shape[:-1] + (g, in_g))
    y = np.einsum("...gi,goi->...go", xg, params.weight)
    y = y.reshape(x.shape[:-1] + (g * out_g,))
    if params.bias is not None:
        y = y + params.bias
    return y


# ---------------------------------------------------------------------------
# layer norm


def layer_norm(x, gain, bias, eps: float = 1e-5):
    """Normalize over the last axis (population variance) then apply affine."""
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps) * gain + bias


# ---------------------------------------------------------------------------
# separable conv blocks (kernel extent 1 in time, 3 in frequency)


@dataclass(frozen=True)
class ConvBlockParams:
    """Depthwise (1x3 over F) + pointwise 1x1 + folded-norm affine + activation.

    dw: [3, in_channels] depthwise taps; pw: [in_channels, out_channels];
    pw_bias/scale/shift: [out_channels].  scale/shift are the inference-folded
    batch-norm affine.
    """

    dw: np.ndarray
    pw: np.ndarray
    pw_bias: np.ndarray
    scale: np.ndarray
    shift: np.ndarray
    activation: str | None = "relu"

    def __post_init__(self):
        if self.dw.ndim != 2 or self.dw.shape[0] != 3:
            raise ValueError(f"depthwise kernel must be [3, Din], got {self.dw.shape}")
        if self.pw.shape[0] != self.dw.shape[1]:
            raise ValueError("pointwise input channels do not match depthwise")
        dout = self.pw.shape[1]
        for name in ("pw_bias", "scale", "shift"):
            if getattr(self, name).shape != (dout,):
                raise ValueError(f"{name} must have shape ({dout},)")

    @property
    def in_channels(self) -> int:
        return self.dw.shape[1]

    @property
    def out_channels(self) -> int:
        return self.pw.shape[1]

    @property
    def param_count(self) -> int:
        return (
            self.dw.size + self.pw.size + self.pw_bias.size
            + self.scale.size + self.shift.size
        )


def _depthwise_freq(x, kern, stride: int):
    """Per-channel conv over the frequency axis, zero padding one bin each side.

    Output position j taps input positions j*stride + {-1, 0, +1}; output
    length is ceil(F / stride).
    """
    b, t, f, d = x.shape
    fo = (f - 1) // stride + 1
    xp = np.zeros((b, t, f + 2, d), dtype=np.float64)
    xp[:, :, 1:-1, :] = x
    out = np.zeros((b, t, fo, d), dtype=np.float64)
    for i in range(3):
        out += kern[i] * xp[:, :, i : i + (fo - 1) * stride + 1 : stride, :]
    return out


def _depthwise_freq_adjoint(y, kern):
    """Exact adjoint of the stride-2 depthwise conv for even input length.

    Maps [B, T, Fy, D] to [B, T, 2*Fy, D]; <conv(x), y> == <x, adjoint(y)>.
    """
    b, t, fy, d = y.shape
    f = 2 * fy
    buf = np.zeros((b, t, f + 2, d), dtype=np.float64)
    for i in range(3):
        buf[:, :, i : i + (fy - 1) * 2 + 1 : 2, :] += kern[i] * y
    return buf[:, :, 1 : f + 1, :]


def conv_block_forward(x, params: ConvBlockParams, stride: int = 1):
    """Separable conv block on [B, T, F, Din] -> [B, T, ceil(F/stride), Dout]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[3] != params.in_channels:
        raise ValueError(
            f"expected [B, T, F, {params.in_channels}] input, got shape {x.shape}"
        )
    if stride not in (1, 2):
        raise ValueError(f"stride must be 1 or 2, got {stride}")
    y = _depthwise_freq(x, params.dw, stride)
    y = y @ params.pw + params.pw_bias
    y = y * params.scale + params.shift
    return _activate(y, params.activation)


def conv_block_transposed(x, params: ConvBlockParams):
    """Upsampling twin: adjoint stride-2 depthwise, then pointwise/affine/act.

    Doubles the frequency axis: [B, T, F, Din] -> [B, T, 2F, Dout].
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[3] != params.in_channels:
        raise ValueError(
            f"expected [B, T, F, {params.in_channels}] input, got shape {x.shape}"
        )
    y = _depthwise_freq_adjoint(x, params.dw)
    y = y @ params.pw + params.pw_bias
    y = y * params.scale + params.shift
    return _activate(y, params.activation)
