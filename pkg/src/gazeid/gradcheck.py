"""Finite-difference gate for the from-scratch differentiation.

Runs loss(forward(x)) on a downsized network and compares the analytic
gradient of every trainable parameter element against central finite
differences in double precision.
"""

from __future__ import annotations

import numpy as np

from .loss import ms_loss
from .network import TINY_CONFIG, NetworkConfig, backward_batch, forward_batch, init_params
from .signal import NormStats


def _loss_of(params, x, labels):
    emb, _ = forward_batch(params, x, train=True)
    loss, _ = ms_loss(emb, labels)
    return loss


def grad_check(
    net_cfg: NetworkConfig = TINY_CONFIG,
    probe_seed: int = 0,
    step: float = 1e-5,
) -> float:
    """Return the max relative error over all trainable parameters."""
    rng = np.random.default_rng(probe_seed)
    stats = NormStats(mean=(0.0, 0.0), std=(1.0, 1.0))
    params = init_params(net_cfg, stats, probe_seed + 17)

    batch = 6
    x = rng.normal(size=(batch, net_cfg.input_len, net_cfg.input_channels))
    labels = np.array([0, 0, 0, 1, 1, 1])

    emb, cache = forward_batch(params, x, train=True)
    _, demb = ms_loss(emb, labels)
    grads = backward_batch(params, cache, demb)

    worst = 0.0
    for name, arr in params.trainable():
        analytic = grads[name]
        flat = arr.ravel()
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + step
            up = _loss_of(params, x, labels)
            flat[j] = orig - step
            down = _loss_of(params, x, labels)
            flat[j] = orig
            numeric = (up - down) / (2 * step)
            a = analytic.ravel()[j]
            denom = max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, abs(a - numeric) / denom)
    return worst
