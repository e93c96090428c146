"""Full-model tests: construction, weight container, forward contracts."""

import io

import numpy as np
import pytest

from dpdfnet.model import (
    BadMagicError,
    MAGIC,
    Model,
    ModelConfig,
    ModelWeights,
    NonFiniteWeightError,
    TensorShapeError,
    TruncatedContainerError,
    build_model,
    count_params,
    estimate_macs,
    init_weights,
    load_weights,
    macs_per_frame,
    save_weights,
    weight_manifest,
)


def random_inputs(rng, n_frames, config=None):
    config = config or ModelConfig()
    feats = rng.uniform(-80.0, 0.0, size=(n_frames, config.erb_bands))
    spec = rng.standard_normal((n_frames, config.df_bins)) * 0.1 \
        + 1j * rng.standard_normal((n_frames, config.df_bins)) * 0.1
    return feats, spec


# ---------------------------------------------------------------------------
# config and manifest
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(dprnn_blocks=-1)
    with pytest.raises(ValueError):
        ModelConfig(erb_bands=30)  # not a multiple of 8
    with pytest.raises(ValueError):
        ModelConfig(lookahead=9)  # exceeds df_order


def test_manifest_names_unique_and_complete():
    config = ModelConfig(dprnn_blocks=2)
    specs = weight_manifest(config)
    names = [s.name for s in specs]
    assert len(names) == len(set(names))
    assert any("dprnn" in n for n in names)
    assert sum(int(np.prod(s.shape)) for s in specs) == init_weights(config, 0).param_count()


def test_no_dprnn_tensors_at_k0():
    names = [s.name for s in weight_manifest(ModelConfig(dprnn_blocks=0))]
    assert not any("dprnn" in n for n in names)


# ---------------------------------------------------------------------------
# initialization determinism
# ---------------------------------------------------------------------------


def test_same_seed_bit_identical():
    a = init_weights(ModelConfig(), 42)
    b = init_weights(ModelConfig(), 42)
    assert a.names == b.names
    for name in a.names:
        assert np.array_equal(a.tensors[name], b.tensors[name]), name


def test_different_seeds_differ():
    a = init_weights(ModelConfig(), 0)
    b = init_weights(ModelConfig(), 1)
    assert any(not np.array_equal(a.tensors[n], b.tensors[n]) for n in a.names)


def test_init_respects_fan_in_bound():
    config = ModelConfig()
    weights = init_weights(config, 7)
    for spec in weight_manifest(config):
        arr = weights.tensors[spec.name]
        if spec.init == "uniform":
            assert np.max(np.abs(arr)) <= 1.0 / np.sqrt(spec.fan_in) + 1e-6, spec.name
        elif spec.init == "ones":
            assert np.all(arr == 1.0), spec.name
        else:
            assert not np.any(arr), spec.name


# ---------------------------------------------------------------------------
# weight container
# ---------------------------------------------------------------------------


def test_save_load_round_trip_bit_exact(tmp_path):
    weights = init_weights(ModelConfig(dprnn_blocks=2), 3)
    path = tmp_path / "w.bin"
    weights.save(path)
    loaded = load_weights(path)
    assert loaded.config == weights.config
    for name in weights.names:
        assert np.array_equal(loaded.tensors[name], weights.tensors[name]), name


def test_save_load_via_file_object():
    weights = init_weights(ModelConfig(), 5)
    buf = io.BytesIO()
    save_weights(weights, buf)
    buf.seek(0)
    loaded = load_weights(buf)
    assert loaded.param_count() == weights.param_count()


def test_bad_magic_rejected():
    weights = init_weights(ModelConfig(), 1)
    buf = io.BytesIO()
    weights.save(buf)
    raw = bytearray(buf.getvalue())
    raw[:8] = b"NOTMAGIC"
    with pytest.raises(BadMagicError):
        load_weights(io.BytesIO(bytes(raw)))


def test_truncated_container_rejected():
    weights = init_weights(ModelConfig(), 1)
    buf = io.BytesIO()
    weights.save(buf)
    raw = buf.getvalue()
    for cut in (4, len(MAGIC) + 2, len(raw) // 2, len(raw) - 1):
        with pytest.raises(TruncatedContainerError):
            load_weights(io.BytesIO(raw[:cut]))


def test_wrong_shape_names_the_tensor():
    weights = init_weights(ModelConfig(), 1)
    tensors = dict(weights.tensors)
    bad = "enc.erb_conv1.dw"
    tensors[bad] = np.zeros((2, 2), dtype=np.float32)
    with pytest.raises(TensorShapeError, match=bad.replace(".", r"\.")):
        ModelWeights(weights.config, tensors)


def test_missing_and_extra_tensors_rejected():
    weights = init_weights(ModelConfig(), 1)
    tensors = dict(weights.tensors)
    removed = tensors.pop("fusion.gru.w_in")
    with pytest.raises(TensorShapeError, match="fusion.gru.w_in"):
        ModelWeights(weights.config, tensors)
    tensors["fusion.gru.w_in"] = removed
    tensors["bogus"] = np.zeros(1, dtype=np.float32)
    with pytest.raises(TensorShapeError, match="bogus"):
        ModelWeights(weights.config, tensors)


def test_non_finite_weights_rejected():
    weights = init_weights(ModelConfig(), 1)
    name = weights.names[0]
    weights.tensors[name] = weights.tensors[name].copy()
    weights.tensors[name].flat[0] = np.nan
    with pytest.raises(NonFiniteWeightError, match=name.replace(".", r"\.")):
        weights.save(io.BytesIO())


def test_build_model_argument_errors():
    with pytest.raises(ValueError):
        build_model(ModelConfig())  # neither seed nor weights
    weights = init_weights(ModelConfig(), 2)
    with pytest.raises(ValueError):
        build_model(ModelConfig(), seed=2, weights=weights)
    with pytest.raises(ValueError):
        build_model(ModelConfig(dprnn_blocks=2), weights=weights)


# ---------------------------------------------------------------------------
# forward contracts
# ---------------------------------------------------------------------------


def test_forward_shapes_and_ranges():
    rng = np.random.default_rng(0)
    model = build_model(ModelConfig(), seed=1)
    feats, spec = random_inputs(rng, 20)
    gains, coefs, state = model.forward(feats, spec, model.new_state())
    assert gains.shape == (20, 32)
    assert coefs.shape == (20, 6, 96)
    assert np.all(gains >= 0.0) and np.all(gains <= 1.0)
    assert np.all(np.isfinite(coefs.view(np.float64)))


def test_forward_empty_input():
    model = build_model(ModelConfig(), seed=1)
    gains, coefs, _ = model.forward(np.zeros((0, 32)), np.zeros((0, 96), complex),
                                    model.new_state())
    assert gains.shape == (0, 32) and coefs.shape == (0, 6, 96)


def test_chunked_forward_equals_whole():
    rng = np.random.default_rng(4)
    model = build_model(ModelConfig(dprnn_blocks=2), seed=9)
    feats, spec = random_inputs(rng, 100, model.config)
    g_whole, c_whole, _ = model.forward(feats, spec, model.new_state())
    state = model.new_state()
    g1, c1, state = model.forward(feats[:50], spec[:50], state)
    g2, c2, state = model.forward(feats[50:], spec[50:], state)
    assert np.max(np.abs(np.vstack([g1, g2]) - g_whole)) < 1e-5
    assert np.max(np.abs(np.vstack([c1, c2]) - c_whole)) < 1e-5


def test_forward_causality():
    rng = np.random.default_rng(5)
    model = build_model(ModelConfig(dprnn_blocks=2), seed=2)
    feats, spec = random_inputs(rng, 30, model.config)
    g_base, c_base, _ = model.forward(feats, spec, model.new_state())
    feats2 = feats.copy()
    spec2 = spec.copy()
    feats2[20:] += rng.uniform(1.0, 2.0, size=feats2[20:].shape)
    spec2[20:] *= 3.0
    g_new, c_new, _ = model.forward(feats2, spec2, model.new_state())
    assert np.array_equal(g_new[:20], g_base[:20])
    assert np.array_equal(c_new[:20], c_base[:20])


def test_reset_restores_cold_start():
    rng = np.random.default_rng(6)
    model = build_model(ModelConfig(), seed=3)
    feats, spec = random_inputs(rng, 10)
    state = model.new_state()
    g1, c1, state = model.forward(feats, spec, state)
    state.reset()
    g2, c2, _ = model.forward(feats, spec, state)
    assert np.array_equal(g1, g2) and np.array_equal(c1, c2)


def test_state_isolation_across_instances():
    rng = np.random.default_rng(7)
    model = build_model(ModelConfig(), seed=3)
    feats, spec = random_inputs(rng, 15)
    sa, sb = model.new_state(), model.new_state()
    ga, _, sa = model.forward(feats, spec, sa)
    model.forward(rng.standard_normal((15, 32)), spec * 2, sb)  # perturb only sb
    ga2, _, _ = model.forward(feats, spec, model.new_state())
    assert np.array_equal(ga, ga2)


# ---------------------------------------------------------------------------
# accounting
# ---------------------------------------------------------------------------


def test_param_count_baseline_band():
    n = count_params(build_model(ModelConfig(), seed=0))
    assert n == 2617932
    assert 0.8 * 2.31e6 <= n <= 1.2 * 2.31e6


def test_param_count_linear_in_blocks():
    counts = {k: init_weights(ModelConfig(dprnn_blocks=k), 0).param_count()
              for k in (0, 2, 4, 8)}
    assert counts[8] - counts[4] == 2 * (counts[4] - counts[2])
    assert counts[2] - counts[0] == 2 * 2 * 51968  # two branches, two blocks


def test_macs_baseline_band_and_monotone():
    per_s = estimate_macs(build_model(ModelConfig(), seed=0))
    assert 0.1e9 <= per_s <= 1.0e9
    macs = [macs_per_frame(ModelConfig(dprnn_blocks=k)) for k in (0, 2, 4, 8)]
    assert macs == sorted(macs) and len(set(macs)) == 4


def test_macs_scale_with_duration():
    model = build_model(ModelConfig(), seed=0)
    assert estimate_macs(model, seconds=2.0) == 2 * estimate_macs(model, seconds=1.0)
