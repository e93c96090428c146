"""End-to-end enhancement: analysis, gain masking, deep filtering, synthesis.

Offline and streaming paths share every numerical stage; the stream simply
feeds frames through the same stateful model as they complete and applies the
deep filter once its ``lookahead`` future frames exist.  Output is aligned
with the input (stream output == offline output sample-for-sample); the
algorithmic latency of ``window_len + lookahead*hop`` samples (640 at 16 kHz
= 40 ms) is visible as emission timing: output sample t is released only
after input sample t + 640 has been pushed.
"""

from __future__ import annotations

import numpy as np

from .erb import ErbFilterbank, build_erb_filterbank, erb_compress, erb_interpolate
from .signal import STFT_16K, ComplexSpectrogram, StftConfig, istft, stft, vorbis_window


def apply_erb_mask(spec: ComplexSpectrogram, gains, fb: ErbFilterbank) -> ComplexSpectrogram:
    """Scale each bin by its band's gain; all-ones gains leave spec unchanged."""
    gains = np.asarray(gains, dtype=np.float64)
    if gains.ndim != 2 or gains.shape[0] != spec.n_frames:
        raise ValueError(
            f"expected [T={spec.n_frames}, {fb.bands}] gains, got shape {gains.shape}"
        )
    mask = erb_interpolate(gains, fb)
    return ComplexSpectrogram(spec.data * mask, spec.config)


def deep_filter(spec: ComplexSpectrogram, coefs, order: int, lookahead: int) -> ComplexSpectrogram:
    """Apply complex FIR filters along time to the lower bins.

    Y(k, f) = sum_i C(k, i, f) * X(k - i + lookahead, f) for f below the
    coefficient band count; out-of-range source frames count as zero; upper
    bins pass through unchanged.
    """
    coefs = np.asarray(coefs, dtype=np.complex128)
    if not 0 <= lookahead <= order:
        raise ValueError(f"lookahead must lie in [0, {order}], got {lookahead}")
    n_frames = spec.n_frames
    if coefs.ndim != 3 or coefs.shape[0] != n_frames or coefs.shape[1] != order + 1:
        raise ValueError(
            f"expected [T={n_frames}, {order + 1}, df_bins] coefficients, "
            f"got shape {coefs.shape}"
        )
    df_bins = coefs.shape[2]
    if df_bins > spec.config.fft_bins:
        raise ValueError(
            f"coefficient band count {df_bins} exceeds {spec.config.fft_bins} bins"
        )
    src = spec.data[:, :df_bins]
    filtered = np.zeros((n_frames, df_bins), dtype=np.complex128)
    for i in range(order + 1):
        shift = i - lookahead  # output frame k draws on source frame k - shift
        if shift >= 0:
            filtered[shift:] += coefs[shift:, i, :] * src[: n_frames - shift]
        else:
            filtered[: n_frames + shift] += coefs[: n_frames + shift, i, :] * src[-shift:]
    out = np.concatenate([filtered, spec.data[:, df_bins:]], axis=1)
    return ComplexSpectrogram(out, spec.config)


def _analysis_frames(frames: np.ndarray, window: np.ndarray, fb: ErbFilterbank, model):
    """Shared per-frame front end: FFT, band features, DF input slice."""
    spec = np.fft.rfft(frames * window, axis=1)
    power = spec.real**2 + spec.imag**2
    feats = erb_compress(power, fb)
    return spec, feats, spec[:, : model.config.df_bins]


def enhance_offline(samples, model, stft_config: StftConfig = STFT_16K,
                    filterbank: ErbFilterbank | None = None) -> np.ndarray:
    """Enhance a whole signal with a fresh model state.

    Output has exactly the input's length.  With all-ones gains and identity
    filter coefficients the pipeline reduces to istft(stft(x)).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D mono signal, got shape {x.shape}")
    if model.config.df_bins > stft_config.fft_bins:
        raise ValueError("model df_bins exceeds the analysis bin count")
    fb = filterbank or build_erb_filterbank(stft_config, model.config.erb_bands)
    spec = stft(x, stft_config)
    feats = erb_compress(spec.power(), fb)
    gains, coefs, _ = model.forward(feats, spec.data[:, : model.config.df_bins],
                                    model.new_state())
    masked = apply_erb_mask(spec, gains, fb)
    filtered = deep_filter(masked, coefs, model.config.df_order, model.config.lookahead)
    return istft(filtered)[: x.size]


class EnhancerStream:
    """Push-based streaming enhancer.

    Push arbitrary chunk sizes (single samples included); enhanced samples
    come back as they clear the 640-sample algorithmic latency.  flush() pads
    with zeros to drain the look-ahead and overlap-add buffers and returns the
    remainder, after which total output length equals total input length and
    matches :func:`enhance_offline` of the same signal.  Each stream owns its
    model state, so several streams may share one model.
    """

    def __init__(self, model, stft_config: StftConfig = STFT_16K,
                 filterbank: ErbFilterbank | None = None):
        if model.config.df_bins > stft_config.fft_bins:
            raise ValueError("model df_bins exceeds the analysis bin count")
        self._cfg = stft_config
        self._model = model
        self._fb = filterbank or build_erb_filterbank(stft_config, model.config.erb_bands)
        self._window = vorbis_window(stft_config.window_len)
        self._state = model.new_state()
        order = model.config.df_order
        look = model.config.lookahead
        self._order = order
        self._look = look
        fft_bins = stft_config.fft_bins
        self._yg_hist = np.zeros((order, fft_bins), dtype=np.complex128)
        self._coef_hist = np.zeros((look, order + 1, model.config.df_bins),
                                   dtype=np.complex128)
        self._carry = np.zeros(0, dtype=np.float64)
        self._chunks = []
        self._chunks_len = 0
        self._frames_done = 0
        self._ola = np.zeros(stft_config.window_len, dtype=np.float64)
        self._ready = []
        self._ready_len = 0
        self._n_in = 0
        self._released = 0
        self._flushed = False

    @property
    def latency_samples(self) -> int:
        """Algorithmic latency: one window plus lookahead hops (640 at 16 kHz)."""
        return self._cfg.window_len + self._look * self._cfg.hop

    def push(self, chunk) -> np.ndarray:
        """Feed samples; returns whatever output cleared the latency (maybe empty)."""
        if self._flushed:
            raise RuntimeError("stream already flushed")
        x = np.asarray(chunk, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError(f"expected a 1-D chunk, got shape {x.shape}")
        if x.size:
            self._chunks.append(x)
            self._chunks_len += x.size
            self._n_in += x.size
        self._process_ready_frames()
        return self._release(max(0, self._n_in - self.latency_samples))

    def flush(self) -> np.ndarray:
        """Drain with zero padding; afterwards total output == total input."""
        if self._flushed:
            return np.zeros(0, dtype=np.float64)
        n_real = self._n_in
        pad = self.latency_samples + self._cfg.window_len
        self._chunks.append(np.zeros(pad, dtype=np.float64))
        self._chunks_len += pad
        self._process_ready_frames()
        self._flushed = True
        return self._release(n_real)

    # -- internals ---------------------------------------------------------

    def _process_ready_frames(self) -> None:
        window, hop = self._cfg.window_len, self._cfg.hop
        avail = self._carry.size + self._chunks_len
        if avail < window:
            return
        n_frames = (avail - window) // hop + 1
        buf = np.concatenate([self._carry] + self._chunks)
        self._chunks = []
        self._chunks_len = 0
        view = np.lib.stride_tricks.sliding_window_view(buf, window)
        frames = np.ascontiguousarray(view[: n_frames * hop : hop])
        self._carry = buf[n_frames * hop :].copy()
        self._run_frames(frames)

    def _run_frames(self, frames: np.ndarray) -> None:
        model = self._model
        look, order = self._look, self._order
        df_bins = model.config.df_bins
        spec, feats, df_in = _analysis_frames(frames, self._window, self._fb, model)
        gains, coefs, self._state = model.forward(feats, df_in, self._state)
        y_gain = spec * erb_interpolate(gains, self._fb)

        j0 = self._frames_done
        j1 = j0 + frames.shape[0]
        ext_yg = np.concatenate([self._yg_hist, y_gain])        # frames j0-order .. j1-1
        ext_coef = np.concatenate([self._coef_hist, coefs])     # frames j0-look .. j1-1
        k0 = max(0, j0 - look)
        k1 = j1 - look
        if k1 > k0:
            n_emit = k1 - k0
            coef_block = ext_coef[k0 - (j0 - look) : k0 - (j0 - look) + n_emit]
            filtered = np.zeros((n_emit, df_bins), dtype=np.complex128)
            for i in range(order + 1):
                s0 = k0 - i + look - (j0 - order)
                filtered += coef_block[:, i, :] * ext_yg[s0 : s0 + n_emit, :df_bins]
            pass_idx = k0 - (j0 - order)
            out = np.concatenate(
                [filtered, ext_yg[pass_idx : pass_idx + n_emit, df_bins:]], axis=1
            )
            self._overlap_add(out)
        self._yg_hist = ext_yg[ext_yg.shape[0] - order :] if order else ext_yg[:0]
        self._coef_hist = ext_coef[ext_coef.shape[0] - look :] if look else ext_coef[:0]
        self._frames_done = j1

    def _overlap_add(self, spec_frames: np.ndarray) -> None:
        window, hop = self._cfg.window_len, self._cfg.hop
        sigs = np.fft.irfft(spec_frames, n=window, axis=1) * self._window
        for sig in sigs:
            self._ola += sig
            self._ready.append(self._ola[:hop].copy())
            self._ready_len += hop
            self._ola[:-hop] = self._ola[hop:]
            self._ola[-hop:] = 0.0

    def _release(self, target_total: int) -> np.ndarray:
        want = min(target_total, self._released + self._ready_len) - self._released
        if want <= 0:
            return np.zeros(0, dtype=np.float64)
        out = np.concatenate(self._ready) if len(self._ready) > 1 else self._ready[0]
        emit, rest = out[:want], out[want:]
        self._ready = [rest] if rest.size else []
        self._ready_len = rest.size
        self._released += want
        return emit
