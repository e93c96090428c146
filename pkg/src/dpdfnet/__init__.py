"""Causal streaming speech enhancement with band gains and deep filtering."""

from .erb import ErbFilterbank, build_erb_filterbank, erb_compress, erb_interpolate
from .losses import MrLossConfig, compress_spectrum, mr_loss, oa_loss, total_loss
from .model import (
    Model,
    ModelConfig,
    ModelWeights,
    build_model,
    count_params,
    estimate_macs,
    init_weights,
    load_weights,
    save_weights,
)
from .pipeline import EnhancerStream, apply_erb_mask, deep_filter, enhance_offline
from .prism import MetricTable, load_metric_csv, minmax_normalize, prism_score, si_snr
from .signal import STFT_16K, ComplexSpectrogram, StftConfig, istft, stft, vorbis_window

__version__ = "0.1.0"

__all__ = [
    "ComplexSpectrogram",
    "EnhancerStream",
    "ErbFilterbank",
    "MetricTable",
    "Model",
    "ModelConfig",
    "ModelWeights",
    "MrLossConfig",
    "STFT_16K",
    "StftConfig",
    "apply_erb_mask",
    "build_erb_filterbank",
    "build_model",
    "compress_spectrum",
    "count_params",
    "deep_filter",
    "enhance_offline",
    "erb_compress",
    "erb_interpolate",
    "estimate_macs",
    "init_weights",
    "istft",
    "load_metric_csv",
    "load_weights",
    "minmax_normalize",
    "mr_loss",
    "oa_loss",
    "prism_score",
    "save_weights",
    "si_snr",
    "stft",
    "total_loss",
    "vorbis_window",
]
