"""Release gate: one checked criterion per test, one printed verdict line each.

Every test computes its quantities at the stated tolerance, prints a single
``criterion NN [PASS|FAIL]`` line (bypassing capture so the verdict always
shows), and then asserts.  Run with plain pytest; the printed lines form the
sign-off summary.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from dpdfnet.cli import main as cli_main
from dpdfnet.corpus import (
    MixSpec,
    apply_biquad,
    assemble_eval_clip,
    measure_snr,
    mix_at_snr,
    random_biquad,
    split_rir,
)
from dpdfnet.losses import mr_loss, oa_loss
from dpdfnet.model import ModelConfig, build_model, count_params, estimate_macs
from dpdfnet.pipeline import EnhancerStream, enhance_offline
from dpdfnet.signal import STFT_16K, istft, stft

from conftest import IdentityModel
from test_losses import brute_force_mr, brute_force_oa
from test_prism import PUBLISHED

REFERENCE_CSV = Path(__file__).parent / "data" / "reference_metrics.csv"


def verdict(capsys, num, name, ok, detail):
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


def test_criterion_01_composite_score_reproduction(capsys):
    t0 = time.perf_counter()
    assert cli_main(["prism", str(REFERENCE_CSV), "--format", "json"]) == 0
    elapsed = time.perf_counter() - t0
    report = json.loads(capsys.readouterr().out)
    scores = {m: report[m]["prism"] for m in report}
    deviations = {m: abs(scores[m] - PUBLISHED[m]) for m in PUBLISHED}
    worst = max(deviations, key=deviations.get)
    ok = (
        max(deviations.values()) <= 0.015
        and scores["DPDFNet-8"] == 1.0
        and abs(scores["Noisy"] - 0.04) <= 0.015
        and abs(scores["DeepFilterNet2"] - 0.76) <= 0.015
        and elapsed < 1.0
    )
    verdict(capsys, 1, "composite score reproduction", ok,
            f"max |Δ| {deviations[worst]:.4f} ({worst}), top anchor "
            f"{scores['DPDFNet-8']:.4f}, {elapsed:.2f} s")


def test_criterion_02_stft_round_trip(capsys):
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = np.inf
    w = STFT_16K.window_len
    for _ in range(10):
        x = rng.standard_normal(16000)
        y = istft(stft(x))[: x.size]
        err = y[w:-w] - x[w:-w]
        snr = 10.0 * np.log10(np.sum(x[w:-w] ** 2) / np.sum(err**2))
        worst = min(worst, snr)
    elapsed = time.perf_counter() - t0
    ok = worst >= 120.0 and elapsed < 1.0
    verdict(capsys, 2, "analysis/synthesis round trip", ok,
            f"min SNR {worst:.1f} dB over 10 signals, {elapsed:.2f} s")


def test_criterion_03_identity_pipeline(capsys):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16000)
    y = enhance_offline(x, IdentityModel())
    w = STFT_16K.window_len
    err = np.max(np.abs(y[w:-w] - x[w:-w]))
    ok = y.size == x.size and err <= 1e-5
    verdict(capsys, 3, "identity settings pass audio through", ok,
            f"max interior |Δ| {err:.2e}")


def test_criterion_04_streaming_equals_offline(capsys):
    rng = np.random.default_rng(2)
    x = 0.1 * rng.standard_normal(160000)  # 10 s
    t0 = time.perf_counter()
    worst = {}
    for k in (0, 2, 4, 8):
        model = build_model(ModelConfig(dprnn_blocks=k), seed=k)
        offline = enhance_offline(x, model)
        stream = EnhancerStream(model)
        outs = [stream.push(x[i : i + 1]) for i in range(x.size)]
        outs.append(stream.flush())
        streamed = np.concatenate(outs)
        worst[k] = (np.max(np.abs(streamed - offline))
                    if streamed.size == offline.size else np.inf)
    elapsed = time.perf_counter() - t0
    ok = all(v <= 1e-5 for v in worst.values()) and elapsed < 60.0
    detail = ", ".join(f"k={k}: {v:.1e}" for k, v in worst.items())
    verdict(capsys, 4, "sample-by-sample streaming equals offline", ok,
            f"{detail}, {elapsed:.1f} s")


def test_criterion_05_causality_and_latency(capsys):
    rng = np.random.default_rng(3)
    model = build_model(ModelConfig(), seed=1)
    x = 0.1 * rng.standard_normal(32000)
    horizon = EnhancerStream(model).latency_samples
    causal = True
    for t in (4000, 16000, 27000):
        x2 = x.copy()
        x2[t + horizon :] += rng.standard_normal(x.size - t - horizon)
        if not np.array_equal(enhance_offline(x, model)[: t + 1],
                              enhance_offline(x2, model)[: t + 1]):
            causal = False

    # availability test: sample i is emitted only once input i+latency arrived
    stream = EnhancerStream(IdentityModel())
    emitted = []
    for _ in range(1000):
        emitted.append(stream.push(np.zeros(1)).size)
    counts = np.cumsum(emitted)
    boundary = int(np.argmax(counts > 0))  # 0-indexed push that first emits
    exact = (counts[638] == 0 and counts[639] == 0 and counts[640] == 1
             and counts[999] == 1000 - 640)
    ok = causal and exact and horizon == 640 and boundary == 640
    verdict(capsys, 5, "look-ahead causality and 640-sample latency", ok,
            f"prefixes intact {causal}, first emission after push "
            f"{boundary + 1}, latency {horizon}")


def test_criterion_06_loss_oracle(capsys):
    rng = np.random.default_rng(4)
    s = rng.standard_normal(3200)  # 0.2 s
    y = s + 0.1 * rng.standard_normal(3200)
    rel_mr = abs(mr_loss(y, s) - brute_force_mr(s, y)) / brute_force_mr(s, y)
    rel_oa = abs(oa_loss(y, s) - brute_force_oa(s, y)) / brute_force_oa(s, y)

    props = True
    for _ in range(100):
        n = int(rng.integers(800, 3200))
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        if mr_loss(a, a) != 0.0 or oa_loss(a, a) != 0.0:
            props = False
        if oa_loss(b, a) > mr_loss(b, a) + 1e-9:
            props = False
    ok = rel_mr <= 1e-6 and rel_oa <= 1e-6 and props
    verdict(capsys, 6, "losses match brute-force reference", ok,
            f"rel err mr {rel_mr:.1e} / oa {rel_oa:.1e}, 100-pair properties {props}")


def test_criterion_07_parameter_accounting(capsys):
    target = 2_310_000
    counts = {k: count_params(build_model(ModelConfig(dprnn_blocks=k), seed=0))
              for k in (0, 2, 4, 8)}
    rel = abs(counts[0] - target) / target
    linear = (counts[8] - counts[4]) == 2 * (counts[4] - counts[2])
    macs = estimate_macs(build_model(ModelConfig(), seed=0))
    ok = rel <= 0.20 and linear and 0.1e9 <= macs <= 1.0e9
    verdict(capsys, 7, "parameter and MAC accounting", ok,
            f"k=0 params {counts[0]:,} ({rel * 100:+.1f}% vs {target:,}), "
            f"linear growth {linear}, {macs / 1e9:.3f} G MAC/s")


def test_criterion_08_corpus_fidelity(capsys):
    rng = np.random.default_rng(5)
    worst_snr_err = 0.0
    for trial in range(20):
        snr = float(rng.uniform(-5.0, 20.0))
        s = 0.3 * rng.standard_normal(16000)
        n = rng.standard_normal(12000)
        _, clean, noise = mix_at_snr(s, n, snr, seed=trial)
        worst_snr_err = max(worst_snr_err, abs(measure_snr(clean, noise) - snr))

    rir = rng.standard_normal(8000) * np.exp(-np.arange(8000) / 800.0)
    early, late = split_rir(rir)
    rir_err = np.max(np.abs(early + late - rir))

    segs = [0.3 * rng.standard_normal(8000) for _ in range(4)]
    bed = rng.standard_normal(16000)
    spec = MixSpec(snr_db=5.0, clip_duration=2.0, max_silence_gap=0.3)
    a = assemble_eval_clip(segs, bed, spec, seed=11)
    b = assemble_eval_clip(segs, bed, spec, seed=11)
    deterministic = (np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
                     and a[2] == b[2])

    ok = worst_snr_err <= 0.1 and rir_err <= 1e-9 and deterministic
    verdict(capsys, 8, "corpus mixing fidelity", ok,
            f"max SNR error {worst_snr_err:.3f} dB over 20 trials, "
            f"rir split residual {rir_err:.1e}, deterministic {deterministic}")


def test_criterion_09_multilingual_smoke(capsys):
    # twelve synthetic language stand-ins: white speech shaped by per-language
    # EQ and pitch so each segment has a distinct spectral envelope
    rng = np.random.default_rng(6)
    segments = []
    dur = int(1.2 * 16000)
    for lang in range(12):
        carrier = 0.2 * rng.standard_normal(dur)
        tone = 0.1 * np.sin(2 * np.pi * (120 + 15 * lang) * np.arange(dur) / 16000.0)
        segments.append(apply_biquad(carrier + tone, random_biquad(lang)))
    bed = rng.standard_normal(32000)
    # 12 x 1.2 s of speech against a 14.4 s clip with tiny gaps: every
    # language always lands and the material always reaches the clip end
    spec = MixSpec(snr_db=5.0, clip_duration=14.4, max_silence_gap=0.05)
    mixture, clean, meta = assemble_eval_clip(segments, bed, spec, seed=7)

    model = build_model(ModelConfig(), seed=13)
    out = enhance_offline(mixture, model)
    ok = (len(meta["segments"]) == 12 and out.size == mixture.size
          and np.all(np.isfinite(out)))
    verdict(capsys, 9, "twelve-language clip smoke test", ok,
            f"{len(meta['segments'])} segments placed, output "
            f"{out.size} samples, finite {bool(np.all(np.isfinite(out)))}")


def test_criterion_10_real_time_factor(capsys):
    rng = np.random.default_rng(7)
    x = 0.05 * rng.standard_normal(160000)  # 10 s
    model = build_model(ModelConfig(), seed=2)
    enhance_offline(x[:16000], model)  # warm-up
    t0 = time.perf_counter()
    enhance_offline(x, model)
    rtf = (time.perf_counter() - t0) / 10.0
    ok = rtf < 1.0
    verdict(capsys, 10, "baseline runs faster than real time", ok,
            f"RTF {rtf:.3f} on 10 s of audio")
