"""Compare the compiled GRU kernel against the NumPy fallback.

Times the raw recurrence kernel on model-sized problems, then the full
enhancement engine end to end, under each backend.  Run from the repo root:

    python benchmarks/bench_backends.py --seconds 10 --runs 5
"""

import argparse
import time

import numpy as np

from dpdfnet.model import ModelConfig, build_model, count_params, estimate_macs
from dpdfnet.nn import kernels
from dpdfnet.pipeline import enhance_offline


def time_median(fn, runs):
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_kernel(steps, hidden, runs):
    """Median time of the bare recurrence on a [steps, 1, 3*hidden] problem."""
    rng = np.random.default_rng(0)
    x_proj = rng.standard_normal((steps, 1, 3 * hidden))
    w_rec = 0.1 * rng.standard_normal((hidden, 3 * hidden))
    h0 = np.zeros((1, hidden))
    results = {}
    for backend in ("compiled", "numpy"):
        if backend == "compiled" and not kernels.compiled_available():
            continue
        with kernels.use_backend(backend):
            kernels.gru_core(x_proj, w_rec, h0)  # warm-up
            results[backend] = time_median(
                lambda: kernels.gru_core(x_proj, w_rec, h0), runs)
    return results


def bench_engine(seconds, k, runs):
    """Median wall time to enhance `seconds` of audio under each backend."""
    rng = np.random.default_rng(1)
    samples = 0.05 * rng.standard_normal(int(seconds * 16000))
    model = build_model(ModelConfig(dprnn_blocks=k), seed=0)
    results = {}
    for backend in ("compiled", "numpy"):
        if backend == "compiled" and not kernels.compiled_available():
            continue
        with kernels.use_backend(backend):
            enhance_offline(samples[:16000], model)  # warm-up
            results[backend] = time_median(
                lambda: enhance_offline(samples, model), runs)
    return results, model


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seconds", type=float, default=10.0,
                        help="audio duration for the end-to-end timing")
    parser.add_argument("--runs", type=int, default=5,
                        help="repetitions; the median is reported")
    parser.add_argument("--k", type=int, default=0,
                        help="extra dual-path block pairs in the model")
    args = parser.parse_args()

    if not kernels.compiled_available():
        print("note: compiled extension not built; numpy numbers only\n")

    print("== recurrence kernel (1000 steps) ==")
    for hidden in (64, 96, 256):
        res = bench_kernel(1000, hidden, args.runs)
        line = "  ".join(f"{b}: {t * 1e3:8.2f} ms" for b, t in res.items())
        if len(res) == 2:
            line += f"  speedup: {res['numpy'] / res['compiled']:.2f}x"
        print(f"hidden={hidden:<4d} {line}")

    print(f"\n== enhancement engine ({args.seconds:g} s audio, k={args.k}) ==")
    res, model = bench_engine(args.seconds, args.k, args.runs)
    print(f"params {count_params(model):,}   "
          f"macs/s {estimate_macs(model) / 1e9:.3f} G")
    for backend, t in res.items():
        print(f"{backend:>8}: {t:6.2f} s   RTF {t / args.seconds:.3f}")
    if len(res) == 2:
        print(f" speedup: {res['numpy'] / res['compiled']:.2f}x")


if __name__ == "__main__":
    main()
