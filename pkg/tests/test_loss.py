import math

import numpy as np
import pytest

from gazeid.errors import DegenerateBatchError
from gazeid.loss import ms_loss


def unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def closed_form(sim, labels, alpha, beta, lam):
    """Independent oracle: literal evaluation of the loss definition."""
    m = len(labels)
    total = 0.0
    for i in range(m):
        sp = sum(
            math.exp(-alpha * (sim[i][k] - lam))
            for k in range(m)
            if k != i and labels[k] == labels[i]
        )
        sn = sum(
            math.exp(beta * (sim[i][k] - lam))
            for k in range(m)
            if labels[k] != labels[i]
        )
        total += math.log1p(sp) / alpha + math.log1p(sn) / beta
    return total / m


class TestValue:
    def test_perfectly_separated(self):
        # same-class pairs at S=1, cross-class at S=-1 (1-d antipodal)
        emb = np.array([[1.0], [1.0], [-1.0], [-1.0]])
        labels = [0, 0, 1, 1]
        loss, _ = ms_loss(emb, labels, alpha=2, beta=50, lam=0.5)
        expect = closed_form(emb @ emb.T, labels, 2, 50, 0.5)
        assert loss == pytest.approx(expect, abs=1e-12)
        # at alpha=2 the positive term has a floor of (1/2)log1p(e^-1)
        assert loss == pytest.approx(math.log1p(math.exp(-1.0)) / 2, abs=1e-10)

    def test_perfectly_separated_vanishes_at_large_alpha(self):
        # the "loss -> 0 when S >> lambda" asymptote needs alpha large
        # enough that exp(-alpha*(1-lam)) is negligible
        emb = np.array([[1.0], [1.0], [-1.0], [-1.0]])
        loss, _ = ms_loss(emb, [0, 0, 1, 1], alpha=50, beta=50, lam=0.5)
        assert loss < 1e-8

    def test_collapsed_classes(self):
        # two classes of identical embeddings: all pairwise S=1, so the
        # negative term is fully active
        emb = np.array([[1.0, 0.0]] * 4)
        labels = [0, 0, 1, 1]
        alpha, beta, lam = 2.0, 50.0, 0.5
        loss, _ = ms_loss(emb, labels, alpha, beta, lam)
        expect = closed_form(np.ones((4, 4)), labels, alpha, beta, lam)
        assert loss == pytest.approx(expect, rel=1e-12)
        # dominated by the negative term: 2 negatives each at S=1
        assert loss > math.log1p(math.exp(beta * (1 - lam))) / beta

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(3)
        emb = np.stack([unit(rng.normal(size=8)) for _ in range(6)])
        labels = [0, 0, 1, 1, 2, 2]
        loss, _ = ms_loss(emb, labels, alpha=3.0, beta=20.0, lam=0.4)
        expect = closed_form(emb @ emb.T, labels, 3.0, 20.0, 0.4)
        assert loss == pytest.approx(expect, rel=1e-12)

    def test_single_class_rejected(self):
        emb = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DegenerateBatchError):
            ms_loss(emb, [0, 0])

    def test_relabeling_symmetry(self):
        rng = np.random.default_rng(9)
        emb = np.stack([unit(rng.normal(size=16)) for _ in range(8)])
        labels = np.array([0, 0, 1, 1, 2, 2, 3, 3])
        a, ga = ms_loss(emb, labels)
        b, gb = ms_loss(emb, np.array(["w", "w", "x", "x", "y", "y", "z", "z"]))
        assert a == pytest.approx(b, rel=1e-15)
        assert np.allclose(ga, gb)

    def test_loss_nonnegative_and_finite(self):
        rng = np.random.default_rng(4)
        for trial in range(20):
            emb = np.stack([unit(rng.normal(size=8)) for _ in range(6)])
            loss, g = ms_loss(emb, rng.integers(0, 3, size=6))
            assert loss >= 0.0
            assert np.all(np.isfinite(g))


class TestGradient:
    @pytest.mark.parametrize("alpha,beta,lam", [(2.0, 50.0, 0.5), (10.0, 5.0, 0.3)])
    def test_finite_differences(self, alpha, beta, lam):
        rng = np.random.default_rng(12)
        emb = np.stack([unit(rng.normal(size=8)) for _ in range(6)])
        labels = np.array([0, 0, 0, 1, 1, 2])
        _, g = ms_loss(emb, labels, alpha, beta, lam)
        step = 1e-6
        worst = 0.0
        for i in range(emb.shape[0]):
            for j in range(emb.shape[1]):
                e = emb.copy()
                e[i, j] += step
                up, _ = ms_loss(e, labels, alpha, beta, lam)
                e[i, j] -= 2 * step
                down, _ = ms_loss(e, labels, alpha, beta, lam)
                numeric = (up - down) / (2 * step)
                denom = max(abs(numeric), abs(g[i, j]), 1e-8)
                worst = max(worst, abs(numeric - g[i, j]) / denom)
        assert worst <= 1e-4

    def test_zero_gradient_at_saturation(self):
        # perfectly separated far from lambda at steep slopes: tiny gradient
        emb = np.array([[1.0], [1.0], [-1.0], [-1.0]])
        _, g = ms_loss(emb, [0, 0, 1, 1], alpha=50, beta=50, lam=0.5)
        assert np.max(np.abs(g)) < 1e-8
