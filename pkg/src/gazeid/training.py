"""Metric-learning training loop: Adam, warmup + cosine schedule, P-K
batch sampling, per-epoch noise augmentation, single-fold validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .loss import DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_LAMBDA, ms_loss
from .network import (
    BN_MOMENTUM,
    ModelParams,
    NetworkConfig,
    backward_batch,
    forward_batch,
    init_params,
)
from .signal import DegradationConfig, VelocitySequence, fit_norm_stats, normalize


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    lam: float = DEFAULT_LAMBDA
    classes_per_batch: int = 8
    samples_per_class: int = 2
    lr_peak: float = 1e-2
    warmup_frac: float = 0.3
    epochs: int = 100
    degradation: DegradationConfig = field(default_factory=DegradationConfig)
    fold_index: int = 0
    n_folds: int = 4

    def __post_init__(self):
        if self.classes_per_batch < 2 or self.samples_per_class < 2:
            raise DataError("loss needs >=2 classes per batch and >=2 samples per class")


def lr_at(step: int, total_steps: int, cfg: TrainConfig) -> float:
    """Linear warmup to lr_peak, then cosine decay to zero."""
    warm = max(1, int(round(cfg.warmup_frac * total_steps)))
    if step < warm:
        return cfg.lr_peak * (step + 1) / warm
    frac = (step - warm) / max(1, total_steps - warm)
    return cfg.lr_peak * 0.5 * (1.0 + np.cos(np.pi * frac))


def split_users(users: list[str], fold_index: int, n_folds: int):
    """User-disjoint validation fold: every n_folds-th user (sorted)."""
    users = sorted(users)
    val = [u for i, u in enumerate(users) if i % n_folds == fold_index]
    train = [u for u in users if u not in val]
    if len(train) < 2 or len(val) < 2:
        # the loss needs >=2 classes on both sides; too few users to hold
        # a meaningful fold out, so train on everyone
        return users, []
    return train, val


class _Adam:
    def __init__(self, shapes, lr_fn, b1=0.9, b2=0.999, eps=1e-8):
        self.m = {k: np.zeros(s) for k, s in shapes.items()}
        self.v = {k: np.zeros(s) for k, s in shapes.items()}
        self.lr_fn = lr_fn
        self.b1, self.b2, self.eps = b1, b2, eps
        self.t = 0

    def step(self, params: dict, grads: dict):
        lr = self.lr_fn(self.t)
        self.t += 1
        for k, g in grads.items():
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * g * g
            mhat = self.m[k] / (1 - self.b1**self.t)
            vhat = self.v[k] / (1 - self.b2**self.t)
            params[k] -= lr * mhat / (np.sqrt(vhat) + self.eps)


def _batch_loss(params, x, labels, cfg: TrainConfig, train: bool):
    emb, cache = forward_batch(params, x, train=train)
    loss, demb = ms_loss(emb, labels, cfg.alpha, cfg.beta, cfg.lam)
    return loss, demb, cache


def train(
    corpus: list[tuple[str, VelocitySequence]],
    net_cfg: NetworkConfig,
    train_cfg: TrainConfig,
    seed: int,
):
    """Train a single model; deterministic given seed.

    corpus pairs each velocity sequence (raw deg/s, not yet normalized)
    with its user label.  Normalization statistics are fit on the training
    split only and frozen into the returned ModelParams.  Gaussian noise
    from train_cfg.degradation is re-sampled every epoch on the normalized
    training inputs; validation inputs are never augmented.

    Returns (ModelParams, log) where log is a list of per-epoch dicts.
    """
    if not corpus:
        raise DataError("empty corpus")
    users = sorted({label for label, _ in corpus})
    if len(users) < 2:
        raise DataError("corpus needs at least 2 users")

    train_users, val_users = split_users(users, train_cfg.fold_index, train_cfg.n_folds)
    train_items = [(u, s) for u, s in corpus if u in train_users]
    val_items = [(u, s) for u, s in corpus if u in val_users]

    stats = fit_norm_stats([s for _, s in train_items])
    train_x = np.stack([normalize(s, stats).stacked().T for _, s in train_items])
    train_y = np.array([u for u, _ in train_items])
    if val_items:
        val_x = np.stack([normalize(s, stats).stacked().T for _, s in val_items])
        val_y = np.array([u for u, _ in val_items])

    params = init_params(net_cfg, stats, seed)
    pdict = dict(params.trainable())
    opt_shapes = {k: v.shape for k, v in pdict.items()}

    n_per_batch = train_cfg.classes_per_batch * train_cfg.samples_per_class
    batches_per_epoch = max(1, int(np.ceil(len(train_items) / n_per_batch)))
    total_steps = train_cfg.epochs * batches_per_epoch
    opt = _Adam(opt_shapes, lambda t: lr_at(t, total_steps, train_cfg))

    rng = np.random.default_rng(seed + 1)
    noise_cfg = train_cfg.degradation
    by_class = {u: np.flatnonzero(train_y == u) for u in np.unique(train_y)}
    class_names = sorted(by_class)

    log = []
    for epoch in range(train_cfg.epochs):
        epoch_losses = []
        noise = (
            rng.normal(noise_cfg.noise_mean, noise_cfg.noise_std, size=train_x.shape)
            if noise_cfg.noise_std > 0
            else 0.0
        )
        x_aug = train_x + noise
        for _ in range(batches_per_epoch):
            k = min(train_cfg.classes_per_batch, len(class_names))
            chosen = rng.choice(len(class_names), size=k, replace=False)
            idx = []
            for ci in chosen:
                pool = by_class[class_names[ci]]
                take = rng.choice(
                    pool,
                    size=train_cfg.samples_per_class,
                    replace=len(pool) < train_cfg.samples_per_class,
                )
                idx.extend(take.tolist())
            idx = np.array(idx)
            x = np.ascontiguousarray(x_aug[idx])
            y = train_y[idx]

            loss, demb, cache = _batch_loss(params, x, y, train_cfg, train=True)
            grads = backward_batch(params, cache, demb)
            opt.step(pdict, grads)
            # fold batch statistics into the running estimates
            for i, (mu, var) in enumerate(cache["bn_batch"]):
                params.bn_mean[i] *= 1 - BN_MOMENTUM
                params.bn_mean[i] += BN_MOMENTUM * mu
                params.bn_var[i] *= 1 - BN_MOMENTUM
                params.bn_var[i] += BN_MOMENTUM * var
            epoch_losses.append(loss)

        entry = {"epoch": epoch, "train_loss": float(np.mean(epoch_losses))}
        if val_items:
            emb, _ = forward_batch(params, val_x, train=False)
            val_loss, _ = ms_loss(emb, val_y, train_cfg.alpha, train_cfg.beta, train_cfg.lam)
            entry["val_loss"] = float(val_loss)
        log.append(entry)
    return params, log
