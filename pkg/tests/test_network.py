import numpy as np
import pytest

from gazeid import convops
from gazeid.errors import (
    CheckpointFormatError,
    ConfigError,
    InputTooShortError,
    InvalidInputError,
)
from gazeid.network import (
    TINY_CONFIG,
    Embedding,
    NetworkConfig,
    forward,
    forward_batch,
    init_params,
    load_checkpoint,
    save_checkpoint,
)
from gazeid.signal import NormStats, VelocitySequence

STATS = NormStats((0.0, 0.0), (1.0, 1.0))


def seq_of(n, seed=0):
    rng = np.random.default_rng(seed)
    return VelocitySequence(125.0, rng.normal(size=n), rng.normal(size=n))


class TestConfig:
    def test_receptive_field_default(self):
        cfg = NetworkConfig()
        # 1 + (k-1) * sum(dilations) = 1 + 2*255
        assert cfg.receptive_field == 511

    def test_channel_bookkeeping(self):
        cfg = NetworkConfig()
        assert cfg.layer_in_channels(0) == 2
        assert cfg.layer_in_channels(3) == 2 + 3 * 32
        assert cfg.total_feature_channels == 2 + 8 * 32

    def test_rejects_even_kernel(self):
        with pytest.raises(ConfigError):
            NetworkConfig(kernel_size=4)

    def test_rejects_dilation_mismatch(self):
        with pytest.raises(ConfigError):
            NetworkConfig(n_conv_layers=3, dilations=(1, 2))

    def test_dict_roundtrip(self):
        cfg = TINY_CONFIG
        assert NetworkConfig.from_dict(cfg.to_dict()) == cfg


class TestConvBackends:
    @pytest.mark.parametrize("dilation", [1, 2, 8])
    def test_backends_agree(self, dilation):
        if not convops.HAVE_EXT:
            pytest.skip("compiled extension not built")
        rng = np.random.default_rng(dilation)
        x = rng.normal(size=(3, 64, 5))
        w = rng.normal(size=(7, 5, 3))
        b = rng.normal(size=7)
        gy = rng.normal(size=(3, 64, 7))
        impls = convops.backends()
        y0 = impls["numpy"].conv1d_forward(x, w, b, dilation)
        y1 = impls["ext"].conv1d_forward(x, w, b, dilation)
        assert np.allclose(y0, y1, atol=1e-12)
        gx0 = impls["numpy"].conv1d_grad_input(gy, w, dilation)
        gx1 = impls["ext"].conv1d_grad_input(gy, w, dilation)
        assert np.allclose(gx0, gx1, atol=1e-12)
        gw0, gb0 = impls["numpy"].conv1d_grad_weights(gy, x, 3, dilation)
        gw1, gb1 = impls["ext"].conv1d_grad_weights(gy, x, 3, dilation)
        assert np.allclose(gw0, gw1, atol=1e-12)
        assert np.allclose(gb0, gb1, atol=1e-12)

    def test_forward_identity_kernel(self):
        # single-tap center weight 1 reproduces the input channel
        x = np.random.default_rng(0).normal(size=(2, 20, 1))
        w = np.array([[[0.0, 1.0, 0.0]]])
        y = convops.conv1d_forward(x, w, np.zeros(1), 1)
        assert np.allclose(y, x)

    def test_forward_shift_kernel(self):
        # weight on the left tap shifts the signal right by the dilation
        x = np.arange(10, dtype=np.float64).reshape(1, 10, 1)
        w = np.array([[[1.0, 0.0, 0.0]]])
        y = convops.conv1d_forward(x, w, np.zeros(1), 2)
        assert np.allclose(y[0, 2:, 0], x[0, :-2, 0])
        assert np.allclose(y[0, :2, 0], 0.0)  # zero padding


class TestForward:
    def test_unit_norm_and_shape(self):
        params = init_params(TINY_CONFIG, STATS, 0)
        emb = forward(params, seq_of(TINY_CONFIG.input_len))
        assert emb.v.shape == (TINY_CONFIG.embedding_dim,)
        assert np.linalg.norm(emb.v) == pytest.approx(1.0, abs=1e-9)
        assert emb.model_id == params.model_id

    def test_deterministic(self):
        params = init_params(TINY_CONFIG, STATS, 0)
        a = forward(params, seq_of(40, seed=5))
        b = forward(params, seq_of(40, seed=5))
        assert np.array_equal(a.v, b.v)

    def test_variable_lengths(self):
        cfg = NetworkConfig(
            n_conv_layers=3, filters_per_layer=4, dilations=(1, 2, 4),
            embedding_dim=16, input_len=1125,
        )
        params = init_params(cfg, STATS, 1)
        for n in (1080, 1125, 2000):
            emb = forward(params, seq_of(n, seed=n))
            assert np.linalg.norm(emb.v) == pytest.approx(1.0, abs=1e-9)

    def test_input_too_short(self):
        params = init_params(TINY_CONFIG, STATS, 0)
        with pytest.raises(InputTooShortError):
            forward(params, seq_of(TINY_CONFIG.receptive_field - 1))

    def test_non_finite_rejected(self):
        params = init_params(TINY_CONFIG, STATS, 0)
        seq = seq_of(40)
        seq.vx[3] = np.nan
        with pytest.raises(InvalidInputError):
            forward(params, seq)

    def test_train_mode_uses_batch_stats(self):
        params = init_params(TINY_CONFIG, STATS, 0)
        x = np.random.default_rng(2).normal(size=(4, 32, 2))
        e_train, cache = forward_batch(params, x, train=True)
        e_eval, none = forward_batch(params, x, train=False)
        assert cache is not None and none is None
        # fresh params have running stats (0, 1) != batch stats
        assert not np.allclose(e_train, e_eval)

    def test_batch_row_independence_eval(self):
        # eval-mode embeddings do not depend on batch composition
        params = init_params(TINY_CONFIG, STATS, 0)
        rng = np.random.default_rng(8)
        x = rng.normal(size=(4, 32, 2))
        full, _ = forward_batch(params, x, train=False)
        solo, _ = forward_batch(params, x[2:3], train=False)
        assert np.allclose(full[2], solo[0])


class TestEmbeddingType:
    def test_rejects_non_unit(self):
        with pytest.raises(InvalidInputError):
            Embedding(v=np.array([1.0, 1.0]), model_id="x")

    def test_accepts_unit(self):
        v = np.array([0.6, 0.8])
        e = Embedding(v=v, model_id="x")
        assert np.allclose(e.v, v)


class TestCheckpoint:
    def test_roundtrip_bit_exact(self, tmp_path):
        params = init_params(TINY_CONFIG, NormStats((0.5, -0.25), (2.0, 3.0)), 7)
        path = tmp_path / "model.bin"
        save_checkpoint(params, path)
        loaded = load_checkpoint(path)
        assert loaded.model_id == params.model_id
        assert loaded.config == params.config
        assert loaded.norm_stats == params.norm_stats
        for (n1, a), (n2, b) in zip(params.tensors(), loaded.tensors()):
            assert n1 == n2
            assert np.array_equal(a, b)

    def test_same_params_same_bytes(self, tmp_path):
        params = init_params(TINY_CONFIG, STATS, 7)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save_checkpoint(params, p1)
        save_checkpoint(params, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)

    def test_rejects_truncation(self, tmp_path):
        params = init_params(TINY_CONFIG, STATS, 7)
        path = tmp_path / "model.bin"
        save_checkpoint(params, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-16])
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)

    def test_rejects_corruption(self, tmp_path):
        params = init_params(TINY_CONFIG, STATS, 7)
        path = tmp_path / "model.bin"
        save_checkpoint(params, path)
        blob = bytearray(path.read_bytes())
        blob[-9] ^= 0xFF  # flip a bit inside the last tensor
        path.write_bytes(bytes(blob))
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)

    def test_rejects_trailing_bytes(self, tmp_path):
        params = init_params(TINY_CONFIG, STATS, 7)
        path = tmp_path / "model.bin"
        save_checkpoint(params, path)
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(CheckpointFormatError):
            load_checkpoint(path)
