"""Model definition: two-branch encoder, fusion GRU, gain and filter decoders.

Architecture (all causal in time):

* ERB branch: [T, 32] log-power band features -> 4 separable conv blocks
  (channels 64, frequency stride 1,2,2,2 so F runs 32->32->16->8->4) -> k
  dual-path blocks.
* DF branch: complex [T, 96] low-band spectrum as re/im channels -> same conv
  stack (96->96->48->24->12) -> k dual-path blocks.
* Fusion: both branches flattened over (F, D), concatenated, grouped linear
  (8 groups) to 512, one GRU hidden 512.
* ERB decoder: GRU 512->128, GRU 128->256, reshape to [4, 64], three stride-2
  transposed conv blocks with additive U-Net skips from the encoder, and a
  final 64->1 sigmoid conv block producing band gains in [0, 1].
* DF decoder: grouped linear 512->256, GRU 256->128, GRU 128->128, grouped
  linear to 2*(N+1)*96 combined with a grouped-linear skip from the flattened
  DF encoder output; reshaped to complex filter coefficients [T, N+1, 96].

Weights are stored as float32 in a binary container (magic ``DPDFNETW``) and
upcast to float64 for compute.  Initialization draws uniform(-1/sqrt(fan_in),
+1/sqrt(fan_in)) from numpy's PCG64 generator in manifest order, so equal
seeds give bit-identical models.
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

from .dprnn import DprnnBlockParams, dprnn_block, init_inter_state
from .nn.ops import (
    ConvBlockParams,
    GroupedLinearParams,
    GruParams,
    conv_block_forward,
    conv_block_transposed,
    grouped_linear,
    gru_forward,
)

MAGIC = b"DPDFNETW"
FORMAT_VERSION = 1

#: decay of the running feature statistics, per frame
NORM_DECAY = 0.99
#: initial running mean of the dB band features
ERB_NORM_INIT_DB = -60.0
#: scale dividing the mean-removed dB features
ERB_NORM_SCALE = 40.0
#: initial running power of the DF input bins
DF_NORM_INIT = 1.0
DF_NORM_EPS = 1e-10

#: frames per processed second under the 10 ms hop; used by the MAC estimate
FRAMES_PER_SECOND = 100


class WeightContainerError(Exception):
    """Base class for weight container problems."""


class BadMagicError(WeightContainerError):
    """The byte stream does not start with the container magic."""


class TruncatedContainerError(WeightContainerError):
    """The byte stream ends before the declared content."""


class TensorShapeError(WeightContainerError):
    """A tensor is missing, unexpected, or has the wrong shape."""


class NonFiniteWeightError(WeightContainerError):
    """A tensor payload contains NaN or infinity."""


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters; defaults give the k=0 baseline."""

    dprnn_blocks: int = 0
    conv_channels: int = 64
    erb_bands: int = 32
    df_bins: int = 96
    df_order: int = 5
    lookahead: int = 2
    fusion_hidden: int = 512
    glinear_groups: int = 8
    erb_dec_hidden: int = 128
    df_dec_hidden: int = 128

    def __post_init__(self):
        if self.dprnn_blocks < 0:
            raise ValueError("dprnn_blocks must be >= 0")
        if self.conv_channels < 2 or self.conv_channels % 2:
            raise ValueError("conv_channels must be even and >= 2")
        if self.erb_bands < 8 or self.erb_bands % 8:
            raise ValueError("erb_bands must be a positive multiple of 8")
        if self.df_bins < 8 or self.df_bins % 8:
            raise ValueError("df_bins must be a positive multiple of 8")
        if self.df_order < 1:
            raise ValueError("df_order must be >= 1")
        if not 0 <= self.lookahead <= self.df_order:
            raise ValueError("lookahead must lie in [0, df_order]")
        g = self.glinear_groups
        for name, dim in (
            ("fusion input", self.fusion_in),
            ("fusion_hidden", self.fusion_hidden),
            ("df decoder embed", self.df_dec_embed),
            ("df decoder output", self.df_out_dim),
            ("df branch flat", self.df_flat_dim),
        ):
            if dim % g:
                raise ValueError(f"{name} ({dim}) not divisible by glinear_groups={g}")

    # -- derived shape helpers -------------------------------------------

    @property
    def conv_strides(self) -> tuple:
        return (1, 2, 2, 2)

    def _freq_path(self, f0: int) -> tuple:
        freqs = []
        f = f0
        for s in self.conv_strides:
            f = -(-f // s)
            freqs.append(f)
        return tuple(freqs)

    @property
    def erb_freqs(self) -> tuple:
        """Frequency sizes after each ERB-branch conv block."""
        return self._freq_path(self.erb_bands)

    @property
    def df_freqs(self) -> tuple:
        return self._freq_path(self.df_bins)

    @property
    def erb_flat_dim(self) -> int:
        return self.erb_freqs[-1] * self.conv_channels

    @property
    def df_flat_dim(self) -> int:
        return self.df_freqs[-1] * self.conv_channels

    @property
    def fusion_in(self) -> int:
        return self.erb_flat_dim + self.df_flat_dim

    @property
    def df_dec_embed(self) -> int:
        return self.fusion_hidden // 2

    @property
    def df_out_dim(self) -> int:
        return 2 * (self.df_order + 1) * self.df_bins


class TensorSpec(NamedTuple):
    name: str
    shape: tuple
    init: str  # "uniform" | "ones" | "zeros"
    fan_in: int | None


def _conv_specs(name, din, dout):
    return [
        TensorSpec(f"{name}.dw", (3, din), "uniform", 3),
        TensorSpec(f"{name}.pw", (din, dout), "uniform", din),
        TensorSpec(f"{name}.pw_bias", (dout,), "uniform", din),
        TensorSpec(f"{name}.scale", (dout,), "ones", None),
        TensorSpec(f"{name}.shift", (dout,), "zeros", None),
    ]


def _gru_specs(name, din, hidden):
    return [
        TensorSpec(f"{name}.w_in", (din, 3 * hidden), "uniform", din),
        TensorSpec(f"{name}.w_rec", (hidden, 3 * hidden), "uniform", hidden),
        TensorSpec(f"{name}.bias", (3 * hidden,), "uniform", din),
    ]


def _fc_specs(name, din, dout):
    return [
        TensorSpec(f"{name}.w", (din, dout), "uniform", din),
        TensorSpec(f"{name}.b", (dout,), "uniform", din),
    ]


def _ln_specs(name, dim):
    return [
        TensorSpec(f"{name}.gain", (dim,), "ones", None),
        TensorSpec(f"{name}.bias", (dim,), "zeros", None),
    ]


def _glin_specs(name, din, dout, groups):
    return [
        TensorSpec(f"{name}.w", (groups, dout // groups, din // groups), "uniform", din // groups),
        TensorSpec(f"{name}.b", (dout,), "uniform", din // groups),
    ]


def _dprnn_specs(name, dim):
    specs = []
    specs += _gru_specs(f"{name}.intra_fw", dim, dim // 2)
    specs += _gru_specs(f"{name}.intra_bw", dim, dim // 2)
    specs += _fc_specs(f"{name}.intra_fc", dim, dim)
    specs += _ln_specs(f"{name}.intra_ln", dim)
    specs += _gru_specs(f"{name}.inter_gru", dim, dim)
    specs += _fc_specs(f"{name}.inter_fc", dim, dim)
    specs += _ln_specs(f"{name}.inter_ln", dim)
    return specs


def weight_manifest(config: ModelConfig) -> list:
    """Ordered tensor inventory; also the PRNG draw order at initialization."""
    ch = config.conv_channels
    specs = []
    for branch, cin in (("erb", 1), ("df", 2)):
        dins = [cin, ch, ch, ch]
        for i, din in enumerate(dins):
            specs += _conv_specs(f"enc.{branch}_conv{i + 1}", din, ch)
    for branch in ("erb", "df"):
        for j in range(config.dprnn_blocks):
            specs += _dprnn_specs(f"enc.{branch}_dprnn{j}", ch)
    g = config.glinear_groups
    specs += _glin_specs("fusion.glin", config.fusion_in, config.fusion_hidden, g)
    specs += _gru_specs("fusion.gru", config.fusion_hidden, config.fusion_hidden)
    specs += _gru_specs("erb_dec.gru1", config.fusion_hidden, config.erb_dec_hidden)
    specs += _gru_specs("erb_dec.gru2", config.erb_dec_hidden, config.erb_flat_dim)
    for i in range(3):
        specs += _conv_specs(f"erb_dec.tconv{i + 1}", ch, ch)
    specs += _conv_specs("erb_dec.out_conv", ch, 1)
    specs += _glin_specs("df_dec.glin_in", config.fusion_hidden, config.df_dec_embed, g)
    specs += _gru_specs("df_dec.gru1", config.df_dec_embed, config.df_dec_hidden)
    specs += _gru_specs("df_dec.gru2", config.df_dec_hidden, config.df_dec_hidden)
    specs += _glin_specs("df_dec.glin_out", config.df_dec_hidden, config.df_out_dim, g)
    specs += _glin_specs("df_dec.glin_skip", config.df_flat_dim, config.df_out_dim, g)
    return specs


class ModelWeights:
    """Named float32 tensors plus the config they belong to.

    Construction validates the tensor set against the config's manifest and
    normalizes storage order to manifest order.
    """

    def __init__(self, config: ModelConfig, tensors: dict):
        self.config = config
        manifest = weight_manifest(config)
        known = {spec.name for spec in manifest}
        extra = set(tensors) - known
        if extra:
            raise TensorShapeError(f"unexpected tensor(s): {sorted(extra)}")
        ordered = {}
        for spec in manifest:
            if spec.name not in tensors:
                raise TensorShapeError(f"missing tensor {spec.name!r}")
            arr = np.asarray(tensors[spec.name], dtype=np.float32)
            if arr.shape != spec.shape:
                raise TensorShapeError(
                    f"tensor {spec.name!r} has shape {arr.shape}, expected {spec.shape}"
                )
            ordered[spec.name] = arr
        self.tensors = ordered

    @property
    def names(self) -> list:
        return list(self.tensors)

    def param_count(self) -> int:
        return sum(t.size for t in self.tensors.values())

    # -- binary container -------------------------------------------------

    def save(self, sink) -> None:
        """Write the container: magic, u32-LE length-prefixed JSON manifest,
        then raw little-endian float32 payloads in manifest order."""
        for name, arr in self.tensors.items():
            if not np.all(np.isfinite(arr)):
                raise NonFiniteWeightError(f"tensor {name!r} contains non-finite values")
        manifest = {
            "format_version": FORMAT_VERSION,
            "config": asdict(self.config),
            "tensors": [
                {"name": name, "shape": list(arr.shape)}
                for name, arr in self.tensors.items()
            ],
        }
        blob = json.dumps(manifest).encode("utf-8")
        close = False
        if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
            sink = open(sink, "wb")
            close = True
        try:
            sink.write(MAGIC)
            sink.write(struct.pack("<I", len(blob)))
            sink.write(blob)
            for arr in self.tensors.values():
                sink.write(arr.astype("<f4", copy=False).tobytes())
        finally:
            if close:
                sink.close()

    @classmethod
    def load(cls, source) -> "ModelWeights":
        if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
            with open(source, "rb") as fh:
                raw = fh.read()
        else:
            raw = source.read()
        if len(raw) < len(MAGIC):
            raise TruncatedContainerError("container shorter than the magic header")
        if raw[: len(MAGIC)] != MAGIC:
            raise BadMagicError(
                f"bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}"
            )
        off = len(MAGIC)
        if len(raw) < off + 4:
            raise TruncatedContainerError("container ends inside the manifest length")
        (mlen,) = struct.unpack_from("<I", raw, off)
        off += 4
        if len(raw) < off + mlen:
            raise TruncatedContainerError("container ends inside the manifest")
        try:
            manifest = json.loads(raw[off : off + mlen].decode("utf-8"))
            config = ModelConfig(**manifest["config"])
            records = manifest["tensors"]
        except (ValueError, KeyError, TypeError) as exc:
            raise WeightContainerError(f"malformed manifest: {exc}") from exc
        off += mlen
        tensors = {}
        for rec in records:
            try:
                name, shape = rec["name"], tuple(rec["shape"])
            except (KeyError, TypeError) as exc:
                raise WeightContainerError(f"malformed tensor record {rec!r}") from exc
            nbytes = 4 * int(np.prod(shape, dtype=np.int64)) if shape else 4
            if len(raw) < off + nbytes:
                raise TruncatedContainerError(
                    f"payload for tensor {name!r} is truncated"
                )
            arr = np.frombuffer(raw, dtype="<f4", count=nbytes // 4, offset=off)
            tensors[name] = arr.reshape(shape)
            off += nbytes
        if off != len(raw):
            raise WeightContainerError(
                f"{len(raw) - off} trailing bytes after the last tensor payload"
            )
        weights = cls(config, tensors)
        for name, arr in weights.tensors.items():
            if not np.all(np.isfinite(arr)):
                raise NonFiniteWeightError(f"tensor {name!r} contains non-finite values")
        return weights


def init_weights(config: ModelConfig, seed: int) -> ModelWeights:
    """Draw fresh weights; deterministic and bit-identical per (config, seed)."""
    rng = np.random.default_rng(seed)
    tensors = {}
    for spec in weight_manifest(config):
        if spec.init == "uniform":
            bound = 1.0 / math.sqrt(spec.fan_in)
            tensors[spec.name] = rng.uniform(-bound, bound, spec.shape).astype(np.float32)
        elif spec.init == "ones":
            tensors[spec.name] = np.ones(spec.shape, dtype=np.float32)
        else:
            tensors[spec.name] = np.zeros(spec.shape, dtype=np.float32)
    return ModelWeights(config, tensors)


def save_weights(model_or_weights, sink) -> None:
    weights = getattr(model_or_weights, "weights", model_or_weights)
    weights.save(sink)


def load_weights(source) -> ModelWeights:
    return ModelWeights.load(source)


# ---------------------------------------------------------------------------
# runtime state


class ModelState:
    """All recurrent state: GRU hidden vectors, per-frequency inter states of
    every dual-path block, and the running feature-normalization statistics.

    reset() restores the exact cold-start condition (zero hidden states,
    normalizer statistics at their documented init constants)."""

    def __init__(self, config: ModelConfig):
        self.config = config
        self.reset()

    def reset(self) -> None:
        cfg = self.config
        ch = cfg.conv_channels
        self.erb_norm_mean = np.full(cfg.erb_bands, ERB_NORM_INIT_DB, dtype=np.float64)
        self.df_norm_pow = np.full(cfg.df_bins, DF_NORM_INIT, dtype=np.float64)
        self.erb_inter = [
            init_inter_state(1, cfg.erb_freqs[-1], ch) for _ in range(cfg.dprnn_blocks)
        ]
        self.df_inter = [
            init_inter_state(1, cfg.df_freqs[-1], ch) for _ in range(cfg.dprnn_blocks)
        ]
        self.fusion_h = np.zeros(cfg.fusion_hidden, dtype=np.float64)
        self.erb_dec_h1 = np.zeros(cfg.erb_dec_hidden, dtype=np.float64)
        self.erb_dec_h2 = np.zeros(cfg.erb_flat_dim, dtype=np.float64)
        self.df_dec_h1 = np.zeros(cfg.df_dec_hidden, dtype=np.float64)
        self.df_dec_h2 = np.zeros(cfg.df_dec_hidden, dtype=np.float64)


def _ema(x, m0, decay):
    """Running mean m[t] = decay*m[t-1] + (1-decay)*x[t] along axis 0.

    First-order IIR, evaluated with lfilter so that carrying the final value
    as the next chunk's m0 reproduces the unchunked result bit-for-bit.
    """
    zi = decay * np.asarray(m0, dtype=np.float64)[None, :]
    y, _ = lfilter([1.0 - decay], [1.0, -decay], x, axis=0, zi=zi)
    return y, y[-1].copy()


# ---------------------------------------------------------------------------
# model


class Model:
    """Inference-ready model: float64 parameter structures built from a
    float32 weight container."""

    def __init__(self, weights: ModelWeights):
        self.weights = weights
        self.config = weights.config
        t = {name: arr.astype(np.float64) for name, arr in weights.tensors.items()}

        def conv(name, activation="relu"):
            return ConvBlockParams(
                dw=t[f"{name}.dw"], pw=t[f"{name}.pw"], pw_bias=t[f"{name}.pw_bias"],
                scale=t[f"{name}.scale"], shift=t[f"{name}.shift"],
                activation=activation,
            )

        def gru(name):
            return GruParams(
                w_in=t[f"{name}.w_in"], w_rec=t[f"{name}.w_rec"], bias=t[f"{name}.bias"]
            )

        def glin(name):
            return GroupedLinearParams(weight=t[f"{name}.w"], bias=t[f"{name}.b"])

        def dprnn(name):
            return DprnnBlockParams(
                intra_fw=gru(f"{name}.intra_fw"),
                intra_bw=gru(f"{name}.intra_bw"),
                intra_fc_w=t[f"{name}.intra_fc.w"], intra_fc_b=t[f"{name}.intra_fc.b"],
                intra_ln_gain=t[f"{name}.intra_ln.gain"], intra_ln_bias=t[f"{name}.intra_ln.bias"],
                inter_gru=gru(f"{name}.inter_gru"),
                inter_fc_w=t[f"{name}.inter_fc.w"], inter_fc_b=t[f"{name}.inter_fc.b"],
                inter_ln_gain=t[f"{name}.inter_ln.gain"], inter_ln_bias=t[f"{name}.inter_ln.bias"],
            )

        cfg = self.config
        self.erb_convs = [conv(f"enc.erb_conv{i + 1}") for i in range(4)]
        self.df_convs = [conv(f"enc.df_conv{i + 1}") for i in range(4)]
        self.erb_dprnn = [dprnn(f"enc.erb_dprnn{j}") for j in range(cfg.dprnn_blocks)]
        self.df_dprnn = [dprnn(f"enc.df_dprnn{j}") for j in range(cfg.dprnn_blocks)]
        self.fusion_glin = glin("fusion.glin")
        self.fusion_gru = gru("fusion.gru")
        self.erb_dec_gru1 = gru("erb_dec.gru1")
        self.erb_dec_gru2 = gru("erb_dec.gru2")
        self.erb_tconvs = [conv(f"erb_dec.tconv{i + 1}") for i in range(3)]
        self.erb_out_conv = conv("erb_dec.out_conv", activation="sigmoid")
        self.df_glin_in = glin("df_dec.glin_in")
        self.df_gru1 = gru("df_dec.gru1")
        self.df_gru2 = gru("df_dec.gru2")
        self.df_glin_out = glin("df_dec.glin_out")
        self.df_glin_skip = glin("df_dec.glin_skip")

    def new_state(self) -> ModelState:
        return ModelState(self.config)

    def forward(self, erb_feats, df_spec, state: ModelState):
        """One (chunk of) forward step(s).

        erb_feats: [T, erb_bands] dB features; df_spec: complex [T, df_bins].
        Returns (gains [T, erb_bands] in [0,1], coefs complex
        [T, df_order+1, df_bins], state).  The state object is updated in
        place and returned; chunked calls with a carried state reproduce the
        whole-sequence result.
        """
        cfg = self.config
        erb_feats = np.asarray(erb_feats, dtype=np.float64)
        df_spec = np.asarray(df_spec, dtype=np.complex128)
        if erb_feats.ndim != 2 or erb_feats.shape[1] != cfg.erb_bands:
            raise ValueError(
                f"expected [T, {cfg.erb_bands}] band features, got {erb_feats.shape}"
            )
        if df_spec.ndim != 2 or df_spec.shape[1] != cfg.df_bins:
            raise ValueError(
                f"expected [T, {cfg.df_bins}] complex DF input, got {df_spec.shape}"
            )
        if erb_feats.shape[0] != df_spec.shape[0]:
            raise ValueError("band features and DF input disagree on frame count")
        n_frames = erb_feats.shape[0]
        if n_frames == 0:
            gains = np.zeros((0, cfg.erb_bands), dtype=np.float64)
            coefs = np.zeros((0, cfg.df_order + 1, cfg.df_bins), dtype=np.complex128)
            return gains, coefs, state

        # encoder input normalization (running statistics live in the state)
        means, state.erb_norm_mean = _ema(erb_feats, state.erb_norm_mean, NORM_DECAY)
        erb_in = (erb_feats - means) / ERB_NORM_SCALE
        powers, state.df_norm_pow = _ema(
            df_spec.real**2 + df_spec.imag**2, state.df_norm_pow, NORM_DECAY
        )
        df_in = df_spec / np.sqrt(powers + DF_NORM_EPS)

        e = erb_in[None, :, :, None]
        d = np.stack([df_in.real, df_in.imag], axis=-1)[None]
        erb_skips = []
        for blk, stride in zip(self.erb_convs, cfg.conv_strides):
            e = conv_block_forward(e, blk, stride)
            erb_skips.append(e)
        for blk, stride in zip(self.df_convs, cfg.conv_strides):
            d = conv_block_forward(d, blk, stride)
        for j, blk in enumerate(self.erb_dprnn):
            e, state.erb_inter[j] = dprnn_block(e, blk, state.erb_inter[j])
        for j, blk in enumerate(self.df_dprnn):
            d, state.df_inter[j] = dprnn_block(d, blk, state.df_inter[j])

        erb_flat = e.reshape(n_frames, cfg.erb_flat_dim)
        df_flat = d.reshape(n_frames, cfg.df_flat_dim)
        fused = grouped_linear(
            np.concatenate([erb_flat, df_flat], axis=-1), self.fusion_glin
        )
        emb, state.fusion_h = gru_forward(fused, self.fusion_gru, state.fusion_h)

        # ERB decoder
        h1, state.erb_dec_h1 = gru_forward(emb, self.erb_dec_gru1, state.erb_dec_h1)
        h2, state.erb_dec_h2 = gru_forward(h1, self.erb_dec_gru2, state.erb_dec_h2)
        g = h2.reshape(1, n_frames, cfg.erb_freqs[-1], cfg.conv_channels)
        g = g + erb_skips[3]
        for tconv, skip in zip(self.erb_tconvs, (erb_skips[2], erb_skips[1], erb_skips[0])):
            g = conv_block_transposed(g, tconv) + skip
        gains = conv_block_forward(g, self.erb_out_conv, stride=1)[0, :, :, 0]

        # DF decoder
        c = grouped_linear(emb, self.df_glin_in)
        c, state.df_dec_h1 = gru_forward(c, self.df_gru1, state.df_dec_h1)
        c, state.df_dec_h2 = gru_forward(c, self.df_gru2, state.df_dec_h2)
        flat = grouped_linear(c, self.df_glin_out) + grouped_linear(
            df_flat, self.df_glin_skip
        )
        ri = flat.reshape(n_frames, cfg.df_order + 1, cfg.df_bins, 2)
        coefs = ri[..., 0] + 1j * ri[..., 1]
        return gains, coefs, state


def build_model(config: ModelConfig | None = None, *, seed: int | None = None,
                weights: ModelWeights | None = None) -> Model:
    """Assemble a model from a seed (random init) or an existing container."""
    if weights is not None:
        if seed is not None:
            raise ValueError("pass either seed or weights, not both")
        if config is not None and config != weights.config:
            raise ValueError("explicit config disagrees with the weights container")
        return Model(weights)
    if seed is None:
        raise ValueError("need a seed (random init) or a weights container")
    return Model(init_weights(config or ModelConfig(), seed))


# ---------------------------------------------------------------------------
# bookkeeping


def count_params(model) -> int:
    """Total scalar parameter count of a Model or ModelWeights."""
    weights = getattr(model, "weights", model)
    return weights.param_count()


def _conv_macs(f_out, din, dout):
    return f_out * (3 * din + din * dout)


def _tconv_macs(f_in, din, dout):
    # adjoint depthwise: 3 taps per input position; pointwise at 2*f_in
    return 3 * f_in * din + 2 * f_in * din * dout


def _gru_macs(din, hidden):
    return 3 * (din * hidden + hidden * hidden)


def _dprnn_macs(freqs, dim):
    half = dim // 2
    intra = freqs * (2 * _gru_macs(dim, half) + dim * dim)
    inter = freqs * (_gru_macs(dim, dim) + dim * dim)
    return intra + inter


def macs_per_frame(config: ModelConfig) -> int:
    """Multiply-accumulate ops for one frame.

    Convention: one MAC per multiply-add inside depthwise taps, pointwise /
    dense / grouped matmuls, and GRU gate projections (3*(i*h + h^2) per
    step).  Elementwise gates, norms, and activations are not counted.
    """
    cfg = config
    ch = cfg.conv_channels
    total = 0
    for f0, cin in ((cfg.erb_bands, 1), (cfg.df_bins, 2)):
        freqs = cfg._freq_path(f0)
        dins = [cin, ch, ch, ch]
        for f_out, din in zip(freqs, dins):
            total += _conv_macs(f_out, din, ch)
    for f0 in (cfg.erb_bands, cfg.df_bins):
        total += cfg.dprnn_blocks * _dprnn_macs(cfg._freq_path(f0)[-1], ch)
    g = cfg.glinear_groups
    total += cfg.fusion_in * cfg.fusion_hidden // g
    total += _gru_macs(cfg.fusion_hidden, cfg.fusion_hidden)
    total += _gru_macs(cfg.fusion_hidden, cfg.erb_dec_hidden)
    total += _gru_macs(cfg.erb_dec_hidden, cfg.erb_flat_dim)
    f = cfg.erb_freqs[-1]
    for _ in range(3):
        total += _tconv_macs(f, ch, ch)
        f *= 2
    total += _conv_macs(cfg.erb_bands, ch, 1)
    total += cfg.fusion_hidden * cfg.df_dec_embed // g
    total += _gru_macs(cfg.df_dec_embed, cfg.df_dec_hidden)
    total += _gru_macs(cfg.df_dec_hidden, cfg.df_dec_hidden)
    total += cfg.df_dec_hidden * cfg.df_out_dim // g
    total += cfg.df_flat_dim * cfg.df_out_dim // g
    return total


def estimate_macs(model, seconds: float = 1.0) -> int:
    """MAC count for ``seconds`` of audio at 100 frames per second."""
    if seconds < 0:
        raise ValueError("seconds must be non-negative")
    config = model if isinstance(model, ModelConfig) else model.config
    return int(round(macs_per_frame(config) * FRAMES_PER_SECOND * seconds))
