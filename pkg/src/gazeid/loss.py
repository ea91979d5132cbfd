"""Multi-similarity metric-learning loss on unit-norm embeddings.

For each anchor i with positive set P (same label, excluding i) and
negative set N:

    L_i = (1/alpha) * log(1 + sum_{k in P} exp(-alpha*(S_ik - lam)))
        + (1/beta)  * log(1 + sum_{k in N} exp( beta*(S_ik - lam)))

where S is pairwise cosine similarity, and the batch loss is the mean of
L_i.  Analytic gradients w.r.t. the embeddings are returned alongside.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateBatchError

DEFAULT_ALPHA = 2.0
DEFAULT_BETA = 50.0
DEFAULT_LAMBDA = 0.5


def ms_loss(
    embeddings: np.ndarray,
    labels,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    lam: float = DEFAULT_LAMBDA,
):
    """Return (loss, dloss/dembeddings) for a (m, d) batch."""
    emb = np.asarray(embeddings, dtype=np.float64)
    labels = np.asarray(labels)
    m = emb.shape[0]
    if len(np.unique(labels)) < 2:
        raise DegenerateBatchError("batch needs at least 2 classes")

    sim = emb @ emb.T
    same = labels[:, None] == labels[None, :]
    eye = np.eye(m, dtype=bool)
    pos = same & ~eye
    neg = ~same

    ep = np.where(pos, np.exp(-alpha * (sim - lam)), 0.0)
    en = np.where(neg, np.exp(beta * (sim - lam)), 0.0)
    sp = ep.sum(axis=1)
    sn = en.sum(axis=1)
    loss = float(np.mean(np.log1p(sp) / alpha + np.log1p(sn) / beta))

    # dL/dS, anchors along rows
    g = (-ep / (1.0 + sp)[:, None] + en / (1.0 + sn)[:, None]) / m
    demb = g @ emb + g.T @ emb
    return loss, demb
