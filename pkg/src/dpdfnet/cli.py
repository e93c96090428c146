"""Command-line front end.

Subcommands: enhance (WAV → enhanced WAV via the streaming path), bench
(real-time factor, params, MACs), prism (metric CSV → composite report),
mix (evaluation-clip assembly), inspect (weight container manifest).

All operational failures print one diagnostic line to stderr and exit 2.
Only mono 16 kHz WAV input is accepted; other rates are rejected, never
resampled.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import corpus, prism, wavio
from .model import (
    FORMAT_VERSION,
    ModelConfig,
    WeightContainerError,
    build_model,
    count_params,
    estimate_macs,
    load_weights,
)
from .nn import kernels
from .pipeline import EnhancerStream, enhance_offline
from .signal import STFT_16K

REQUIRED_RATE = 16000


def _read_input_wav(path):
    samples, rate = wavio.read_wav(path)
    if rate != REQUIRED_RATE:
        raise ValueError(
            f"{path}: sample rate {rate} Hz unsupported; expected {REQUIRED_RATE} Hz mono "
            "(resample externally)"
        )
    return samples


def _load_model(args):
    if args.model is not None:
        return build_model(weights=load_weights(args.model))
    return build_model(ModelConfig(dprnn_blocks=args.k), seed=args.seed)


def _add_model_args(parser):
    parser.add_argument("--model", help="weight container path")
    parser.add_argument("--k", type=int, default=0,
                        help="dual-path blocks per branch for a random build (default 0)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for a random build (default 0)")


def _cmd_enhance(args) -> int:
    samples = _read_input_wav(args.input)
    model = _load_model(args)
    if args.chunk < 1:
        raise ValueError(f"chunk size must be >= 1, got {args.chunk}")
    stream = EnhancerStream(model)
    pieces = [stream.push(samples[i : i + args.chunk])
              for i in range(0, samples.size, args.chunk)]
    pieces.append(stream.flush())
    out = np.concatenate(pieces) if pieces else np.zeros(0)
    wavio.write_wav(args.output, out, REQUIRED_RATE, encoding=args.encoding)
    print(f"wrote {args.output} ({out.size} samples, {out.size / REQUIRED_RATE:.2f} s)")
    return 0


def _bench_one(model, samples, runs: int):
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        enhance_offline(samples, model)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def _cmd_bench(args) -> int:
    if args.runs < 1:
        raise ValueError(f"runs must be >= 1, got {args.runs}")
    model = _load_model(args)
    duration = float(args.seconds)
    rng = np.random.default_rng(0)
    samples = 0.05 * rng.standard_normal(int(duration * REQUIRED_RATE))

    backends = ["compiled", "numpy"] if args.backend == "both" else [args.backend]
    rows = []
    for backend in backends:
        if backend == "compiled" and args.backend == "both" \
                and not kernels.compiled_available():
            continue  # report numpy alone rather than fail the comparison
        with kernels.use_backend(backend):
            median = _bench_one(model, samples, args.runs)
            active = kernels.active_backend()
        rows.append({
            "backend": active,
            "seconds_audio": duration,
            "median_proc_s": round(median, 4),
            "rtf": round(median / duration, 4),
        })
    info = {
        "blocks": model.config.dprnn_blocks,
        "params": count_params(model),
        "macs_per_s": estimate_macs(model),
        "runs": args.runs,
        "results": rows,
    }
    if args.format == "json":
        print(json.dumps(info, indent=2))
    elif args.format == "csv":
        print("backend,seconds_audio,median_proc_s,rtf,params,macs_per_s")
        for row in rows:
            print(f"{row['backend']},{row['seconds_audio']},{row['median_proc_s']},"
                  f"{row['rtf']},{info['params']},{info['macs_per_s']}")
    else:
        print(f"model: k={info['blocks']}  params={info['params']:,}  "
              f"macs/s={info['macs_per_s']:,}")
        for row in rows:
            print(f"  {row['backend']:>8}: {row['median_proc_s']:.4f} s for "
                  f"{row['seconds_audio']:.1f} s audio  (RTF {row['rtf']:.4f})")
    return 0


def _cmd_prism(args) -> int:
    table = prism.load_metric_csv(args.table)
    report = prism.prism_report(table)
    print(prism.format_report(report, args.format))
    return 0


def _worker_count(n_jobs: int) -> int:
    cap = os.environ.get("DPDFNET_THREADS")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ValueError(f"DPDFNET_THREADS must be an integer, got {cap!r}") from None
        if cap < 1:
            raise ValueError(f"DPDFNET_THREADS must be >= 1, got {cap}")
        return min(n_jobs, cap)
    return min(n_jobs, os.cpu_count() or 1)


def _cmd_mix(args) -> int:
    speech = [_read_input_wav(p) for p in args.speech]
    noise = _read_input_wav(args.noise)
    spec = corpus.MixSpec(snr_db=args.snr, clip_duration=args.duration,
                          max_silence_gap=args.max_gap)
    os.makedirs(args.out, exist_ok=True)

    def build(i: int) -> str:
        mixture, clean, meta = corpus.assemble_eval_clip(speech, noise, spec,
                                                         seed=args.seed + i)
        stem = os.path.join(args.out, f"clip_{i:03d}")
        wavio.write_wav(stem + ".wav", mixture, REQUIRED_RATE, encoding="float32")
        wavio.write_wav(stem + ".clean.wav", clean, REQUIRED_RATE, encoding="float32")
        with open(stem + ".json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
        return stem

    if args.count == 1:
        stems = [build(0)]
    else:
        with ThreadPoolExecutor(max_workers=_worker_count(args.count)) as pool:
            stems = list(pool.map(build, range(args.count)))
    for stem in stems:
        print(f"wrote {stem}.wav / .clean.wav / .json")
    return 0


def _cmd_inspect(args) -> int:
    weights = load_weights(args.container)
    cfg = weights.config
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": {
            "dprnn_blocks": cfg.dprnn_blocks,
            "conv_channels": cfg.conv_channels,
            "erb_bands": cfg.erb_bands,
            "df_bins": cfg.df_bins,
            "df_order": cfg.df_order,
            "lookahead": cfg.lookahead,
        },
        "params": weights.param_count(),
        "tensors": [{"name": n, "shape": list(weights.tensors[n].shape)}
                    for n in weights.names],
    }
    if args.format == "json":
        print(json.dumps(manifest, indent=2))
    elif args.format == "csv":
        print("name,shape,size")
        for t in manifest["tensors"]:
            shape = "x".join(str(d) for d in t["shape"])
            print(f"{t['name']},{shape},{int(np.prod(t['shape']))}")
    else:
        print(f"format_version: {manifest['format_version']}")
        print(f"config: {manifest['config']}")
        print(f"params: {manifest['params']:,}")
        for t in manifest["tensors"]:
            print(f"  {t['name']:<28} {t['shape']}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpdfnet",
        description="Streaming speech enhancement: band gains plus deep filtering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="denoise a WAV file (streaming path)")
    p.add_argument("input", help="mono 16 kHz WAV (PCM16 or float32)")
    p.add_argument("output", help="output WAV path")
    _add_model_args(p)
    p.add_argument("--chunk", type=int, default=1600,
                   help="streaming chunk size in samples (default 1600)")
    p.add_argument("--encoding", choices=("pcm16", "float32"), default="pcm16")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("bench", help="measure real-time factor, params, MACs")
    _add_model_args(p)
    p.add_argument("--seconds", type=float, default=10.0)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--backend", choices=("auto", "compiled", "numpy", "both"),
                   default="auto")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("prism", help="composite score report from a metric CSV")
    p.add_argument("table", help=f"CSV with header {','.join(prism.CSV_HEADER)}")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=_cmd_prism)

    p = sub.add_parser("mix", help="assemble low-SNR evaluation clips")
    p.add_argument("--speech", nargs="+", required=True, help="speech segment WAVs")
    p.add_argument("--noise", required=True, help="noise bed WAV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--snr", type=float, default=5.0)
    p.add_argument("--duration", type=float, default=150.0, help="clip seconds")
    p.add_argument("--max-gap", type=float, default=15.0, help="max silence gap seconds")
    p.add_argument("--count", type=int, default=1, help="number of clips")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("inspect", help="dump a weight container manifest")
    p.add_argument("container", help="weight container path")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=_cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, WeightContainerError, OSError) as exc:
        print(f"dpdfnet: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
