"""Densely connected dilated 1D conv network producing unit-norm embeddings.

Every conv layer sees the channel-concatenation of the raw input and all
previous layers' outputs.  Each layer is conv -> batch norm -> ReLU; the
final feature stack is global-average-pooled over time and projected to
the embedding dimension, then L2-normalized.  Forward and backward passes
are written against the convops kernel interface so the compiled and
numpy backends are interchangeable.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import convops
from .errors import (
    CheckpointFormatError,
    ConfigError,
    InputTooShortError,
    InvalidInputError,
)
from .signal import NormStats, VelocitySequence

BN_EPS = 1e-5
BN_MOMENTUM = 0.1
CHECKPOINT_MAGIC = b"GZMB"
CHECKPOINT_VERSION = 1

EMBEDDING_DIM = 128


@dataclass(frozen=True)
class NetworkConfig:
    n_conv_layers: int = 8
    filters_per_layer: int = 32
    kernel_size: int = 3
    dilations: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128)
    embedding_dim: int = EMBEDDING_DIM
    input_len: int = 1125
    input_channels: int = 2

    def __post_init__(self):
        if len(self.dilations) != self.n_conv_layers:
            raise ConfigError("dilations length must equal n_conv_layers")
        counts = (
            self.n_conv_layers,
            self.filters_per_layer,
            self.kernel_size,
            self.embedding_dim,
            self.input_len,
            self.input_channels,
            *self.dilations,
        )
        if any(c < 1 for c in counts):
            raise ConfigError("all config counts must be >= 1")
        if self.kernel_size % 2 == 0:
            raise ConfigError("kernel_size must be odd (same padding)")

    @property
    def receptive_field(self) -> int:
        return 1 + (self.kernel_size - 1) * sum(self.dilations)

    def layer_in_channels(self, i: int) -> int:
        return self.input_channels + i * self.filters_per_layer

    @property
    def total_feature_channels(self) -> int:
        return self.input_channels + self.n_conv_layers * self.filters_per_layer

    def to_dict(self) -> dict:
        return {
            "n_conv_layers": self.n_conv_layers,
            "filters_per_layer": self.filters_per_layer,
            "kernel_size": self.kernel_size,
            "dilations": list(self.dilations),
            "embedding_dim": self.embedding_dim,
            "input_len": self.input_len,
            "input_channels": self.input_channels,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        return cls(
            n_conv_layers=d["n_conv_layers"],
            filters_per_layer=d["filters_per_layer"],
            kernel_size=d["kernel_size"],
            dilations=tuple(d["dilations"]),
            embedding_dim=d["embedding_dim"],
            input_len=d["input_len"],
            input_channels=d["input_channels"],
        )


# Downsized configuration used by the gradient-check gate.
TINY_CONFIG = NetworkConfig(
    n_conv_layers=3,
    filters_per_layer=4,
    kernel_size=3,
    dilations=(1, 2, 4),
    embedding_dim=16,
    input_len=32,
    input_channels=2,
)


@dataclass(frozen=True)
class Embedding:
    """Unit-norm biometric template plus the hash of the producing model."""

    v: np.ndarray
    model_id: str

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        object.__setattr__(self, "v", v)
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-6:
            raise InvalidInputError(f"embedding norm {norm} not within 1e-6 of 1")


class ModelParams:
    """All trainable tensors, batch-norm running stats, and frozen NormStats.

    Tensor declaration order (the checkpoint serialization order) is, per
    layer: conv weight, conv bias, bn gamma, bn beta, bn running mean,
    bn running var; then the projection weight and bias.
    """

    def __init__(self, config: NetworkConfig, norm_stats: NormStats):
        self.config = config
        self.norm_stats = norm_stats
        self.conv_w: list[np.ndarray] = []
        self.conv_b: list[np.ndarray] = []
        self.bn_gamma: list[np.ndarray] = []
        self.bn_beta: list[np.ndarray] = []
        self.bn_mean: list[np.ndarray] = []
        self.bn_var: list[np.ndarray] = []
        self.fc_w: np.ndarray | None = None
        self.fc_b: np.ndarray | None = None

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        """(name, array) pairs in declaration order."""
        out = []
        for i in range(self.config.n_conv_layers):
            out += [
                (f"conv{i}.w", self.conv_w[i]),
                (f"conv{i}.b", self.conv_b[i]),
                (f"bn{i}.gamma", self.bn_gamma[i]),
                (f"bn{i}.beta", self.bn_beta[i]),
                (f"bn{i}.mean", self.bn_mean[i]),
                (f"bn{i}.var", self.bn_var[i]),
            ]
        out += [("fc.w", self.fc_w), ("fc.b", self.fc_b)]
        return out

    def trainable(self) -> list[tuple[str, np.ndarray]]:
        return [
            (name, arr)
            for name, arr in self.tensors()
            if ".mean" not in name and ".var" not in name
        ]

    @property
    def model_id(self) -> str:
        h = hashlib.sha256()
        for _, arr in self.tensors():
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        return h.hexdigest()[:16]

    def copy(self) -> "ModelParams":
        other = ModelParams(self.config, self.norm_stats)
        other.conv_w = [a.copy() for a in self.conv_w]
        other.conv_b = [a.copy() for a in self.conv_b]
        other.bn_gamma = [a.copy() for a in self.bn_gamma]
        other.bn_beta = [a.copy() for a in self.bn_beta]
        other.bn_mean = [a.copy() for a in self.bn_mean]
        other.bn_var = [a.copy() for a in self.bn_var]
        other.fc_w = self.fc_w.copy()
        other.fc_b = self.fc_b.copy()
        return other


def init_params(config: NetworkConfig, norm_stats: NormStats, seed: int) -> ModelParams:
    """Fan-in-scaled uniform initialization, deterministic given seed."""
    rng = np.random.default_rng(seed)
    p = ModelParams(config, norm_stats)
    f = config.filters_per_layer
    for i in range(config.n_conv_layers):
        cin = config.layer_in_channels(i)
        limit = (1.0 / (cin * config.kernel_size)) ** 0.5
        p.conv_w.append(rng.uniform(-limit, limit, size=(f, cin, config.kernel_size)))
        p.conv_b.append(np.zeros(f))
        p.bn_gamma.append(np.ones(f))
        p.bn_beta.append(np.zeros(f))
        p.bn_mean.append(np.zeros(f))
        p.bn_var.append(np.ones(f))
    ctot = config.total_feature_channels
    limit = (1.0 / ctot) ** 0.5
    p.fc_w = rng.uniform(-limit, limit, size=(ctot, config.embedding_dim))
    p.fc_b = np.zeros(config.embedding_dim)
    return p


def forward_batch(params: ModelParams, x: np.ndarray, train: bool = False):
    """Run the network on a time-major (batch, time, channels) array.

    Returns (embeddings, cache); cache is None unless train=True, in which
    case batch statistics are used for normalization and everything needed
    by backward_batch is retained.
    """
    cfg = params.config
    feats = [np.ascontiguousarray(x, dtype=np.float64)]
    cache = {"inputs": [], "zhat": [], "invstd": [], "act": [], "bn_batch": []}
    for i in range(cfg.n_conv_layers):
        xin = feats[0] if len(feats) == 1 else np.concatenate(feats, axis=2)
        z = convops.conv1d_forward(xin, params.conv_w[i], params.conv_b[i], cfg.dilations[i])
        if train:
            mu = z.mean(axis=(0, 1))
            var = z.var(axis=(0, 1))
        else:
            mu = params.bn_mean[i]
            var = params.bn_var[i]
        invstd = 1.0 / np.sqrt(var + BN_EPS)
        zhat = (z - mu) * invstd
        h = params.bn_gamma[i] * zhat + params.bn_beta[i]
        act = np.maximum(h, 0.0)
        feats.append(act)
        if train:
            cache["inputs"].append(xin)
            cache["zhat"].append(zhat)
            cache["invstd"].append(invstd)
            cache["act"].append(act)
            cache["bn_batch"].append((mu, var))

    stack = np.concatenate(feats, axis=2)
    pooled = stack.mean(axis=1)
    raw = pooled @ params.fc_w + params.fc_b
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms = np.maximum(norms, 1e-12)
    emb = raw / norms
    if not train:
        return emb, None
    cache.update({"feats": feats, "pooled": pooled, "emb": emb, "norms": norms, "T": x.shape[1]})
    return emb, cache


def backward_batch(params: ModelParams, cache: dict, demb: np.ndarray) -> dict:
    """Gradients of a scalar loss w.r.t. all trainable tensors."""
    cfg = params.config
    emb, norms = cache["emb"], cache["norms"]
    t_len = cache["T"]

    # through L2 normalization
    draw = (demb - emb * np.sum(demb * emb, axis=1, keepdims=True)) / norms

    grads = {
        "fc.w": cache["pooled"].T @ draw,
        "fc.b": draw.sum(axis=0),
    }
    dpooled = draw @ params.fc_w.T
    dstack = np.broadcast_to(dpooled[:, None, :] / t_len, (draw.shape[0], t_len, dpooled.shape[1]))

    # split pooling gradient back into per-feature blocks (channels last)
    feats = cache["feats"]
    dfeat = []
    offset = 0
    for f in feats:
        c = f.shape[2]
        dfeat.append(np.ascontiguousarray(dstack[:, :, offset:offset + c]))
        offset += c

    for i in reversed(range(cfg.n_conv_layers)):
        act = cache["act"][i]
        da = dfeat[i + 1]
        dh = da * (act > 0)

        zhat = cache["zhat"][i]
        invstd = cache["invstd"][i]
        grads[f"bn{i}.gamma"] = np.sum(dh * zhat, axis=(0, 1))
        grads[f"bn{i}.beta"] = np.sum(dh, axis=(0, 1))
        dzhat = dh * params.bn_gamma[i]
        m = dh.shape[0] * dh.shape[1]
        dz = (invstd / m) * (
            m * dzhat
            - np.sum(dzhat, axis=(0, 1))
            - zhat * np.sum(dzhat * zhat, axis=(0, 1))
        )

        xin = cache["inputs"][i]
        gw, gb = convops.conv1d_grad_weights(dz, xin, cfg.kernel_size, cfg.dilations[i])
        grads[f"conv{i}.w"] = gw
        grads[f"conv{i}.b"] = gb
        dxin = convops.conv1d_grad_input(dz, params.conv_w[i], cfg.dilations[i])

        offset = 0
        for j in range(i + 1):
            c = feats[j].shape[2]
            dfeat[j] += dxin[:, :, offset:offset + c]
            offset += c
    return grads


def forward(params: ModelParams, seq: VelocitySequence) -> Embedding:
    """Inference on one normalized velocity sequence (running BN stats)."""
    x = seq.stacked().T[None, :, :]  # (1, time, channels)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("velocity sequence contains non-finite values")
    if x.shape[1] < params.config.receptive_field:
        raise InputTooShortError(
            f"input length {x.shape[1]} below receptive field "
            f"{params.config.receptive_field}"
        )
    emb, _ = forward_batch(params, x, train=False)
    return Embedding(v=emb[0], model_id=params.model_id)


# ---------------------------------------------------------------------------
# Checkpoint I/O: magic + version + JSON header + raw little-endian tensors.
# ---------------------------------------------------------------------------


def save_checkpoint(params: ModelParams, path) -> None:
    header = {
        "format_version": CHECKPOINT_VERSION,
        "config": params.config.to_dict(),
        "norm_stats": {"mean": list(params.norm_stats.mean), "std": list(params.norm_stats.std)},
        "model_id": params.model_id,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<II", CHECKPOINT_VERSION, len(header_bytes)))
        f.write(header_bytes)
        for _, arr in params.tensors():
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> ModelParams:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointFormatError("not a model checkpoint")
        version, header_len = struct.unpack("<II", f.read(8))
        if version != CHECKPOINT_VERSION:
            raise CheckpointFormatError(f"unsupported checkpoint version {version}")
        header = json.loads(f.read(header_len).decode("utf-8"))
        config = NetworkConfig.from_dict(header["config"])
        stats = NormStats(
            mean=tuple(header["norm_stats"]["mean"]),
            std=tuple(header["norm_stats"]["std"]),
        )
        params = ModelParams(config, stats)
        fpl = config.filters_per_layer

        def read(shape):
            count = int(np.prod(shape))
            buf = f.read(count * 8)
            if len(buf) != count * 8:
                raise CheckpointFormatError("truncated checkpoint")
            return np.frombuffer(buf, dtype="<f8").reshape(shape).copy()

        for i in range(config.n_conv_layers):
            cin = config.layer_in_channels(i)
            params.conv_w.append(read((fpl, cin, config.kernel_size)))
            params.conv_b.append(read((fpl,)))
            params.bn_gamma.append(read((fpl,)))
            params.bn_beta.append(read((fpl,)))
            params.bn_mean.append(read((fpl,)))
            params.bn_var.append(read((fpl,)))
        params.fc_w = read((config.total_feature_channels, config.embedding_dim))
        params.fc_b = read((config.embedding_dim,))
        if f.read(1):
            raise CheckpointFormatError("trailing bytes in checkpoint")
    if params.model_id != header["model_id"]:
        raise CheckpointFormatError("model_id mismatch (corrupt checkpoint)")
    return params
