from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazeid.errors import DegenerateMatrixError, ModelMismatchError
from gazeid.evaluation import (
    ScoreMatrix,
    compute_eer,
    compute_matrix,
    far_frr,
    flagged_cells,
    format_score_table,
    parse_score_table,
    reference_matrix,
    render_table,
    subject_of,
)
from gazeid.network import Embedding


def unit_emb(seed, model_id="m"):
    v = np.random.default_rng(seed).normal(size=8)
    return Embedding(v=v / np.linalg.norm(v), model_id=model_id)


def simple_matrix(genuine, impostor):
    """One enroll subject per genuine score, one verify each; impostors fill
    a second block."""
    scores = np.array([genuine + impostor])
    mask = np.array([[True] * len(genuine) + [False] * len(impostor)])
    return ScoreMatrix(["X1"], [f"v{i}" for i in range(scores.shape[1])], scores, mask)


class TestSubjects:
    def test_strips_trailing_digits(self):
        assert subject_of("A1") == "A"
        assert subject_of("u07.s12") == "u07.s"
        assert subject_of("bob") == "bob"

    def test_from_labels_mask(self):
        m = ScoreMatrix.from_labels(["A1", "B1"], ["A2", "B2"], np.zeros((2, 2)))
        assert m.genuine_mask.tolist() == [[True, False], [False, True]]


class TestFarFrr:
    def test_counts_are_exact(self):
        m = simple_matrix([0.9, 0.7], [0.85, 0.5, 0.3])
        far, frr = far_frr(m, 0.8)
        assert far == Fraction(1, 3)
        assert frr == Fraction(1, 2)

    def test_accept_at_equality(self):
        m = simple_matrix([0.8], [0.8])
        far, frr = far_frr(m, 0.8)
        assert far == Fraction(1, 1)  # impostor at threshold accepted
        assert frr == Fraction(0, 1)  # genuine at threshold accepted

    def test_extreme_thresholds(self):
        m = simple_matrix([0.9, 0.7], [0.5])
        assert far_frr(m, -2.0) == (Fraction(1), Fraction(0))
        assert far_frr(m, 2.0) == (Fraction(0), Fraction(1))

    def test_needs_both_populations(self):
        m = ScoreMatrix(["A1"], ["A2"], np.array([[0.9]]), np.array([[True]]))
        with pytest.raises(DegenerateMatrixError):
            far_frr(m, 0.5)


class TestEer:
    def test_perfectly_separated(self):
        m = simple_matrix([0.9, 0.95], [0.1, 0.2])
        report = compute_eer(m)
        assert report.eer == 0

    def test_single_score_each(self):
        # genuine {0.5} and impostor {0.5}: no threshold separates them;
        # midpoint convention gives 0.5
        m = simple_matrix([0.5], [0.5])
        report = compute_eer(m)
        assert report.eer == Fraction(1, 2)

    def test_reversed_scores(self):
        # genuine all below impostor: EER is 1 at the crossing
        m = simple_matrix([0.1, 0.2], [0.8, 0.9])
        report = compute_eer(m)
        assert report.eer == Fraction(1, 1)

    def test_sentinels_cover_boundaries(self):
        m = simple_matrix([0.9], [0.1])
        report = compute_eer(m)
        assert report.thresholds[0] < 0.1
        assert report.thresholds[-1] > 0.9
        assert report.far_curve[0] == 1 and report.frr_curve[0] == 0
        assert report.far_curve[-1] == 0 and report.frr_curve[-1] == 1

    def test_monotone_transform_invariance(self):
        # EER depends only on score order, not magnitude
        m = simple_matrix([0.82, 0.71, 0.64], [0.75, 0.5, 0.9, 0.3])
        base = compute_eer(m).eer
        warped = ScoreMatrix(
            m.enroll_ids, m.verify_ids, np.tanh(3 * m.scores), m.genuine_mask
        )
        assert compute_eer(warped).eer == base

    @settings(max_examples=50, deadline=None)
    @given(
        gen=st.lists(st.floats(-1, 1, width=32), min_size=1, max_size=10),
        imp=st.lists(st.floats(-1, 1, width=32), min_size=1, max_size=10),
    )
    def test_eer_bounds_and_exactness(self, gen, imp):
        m = simple_matrix(gen, imp)
        report = compute_eer(m)
        assert 0 <= report.eer <= 1
        if report.convention == "exact":
            far, frr = far_frr(m, report.eer_threshold)
            assert far == frr == report.eer


class TestReferenceFixture:
    def test_table_values(self):
        m = reference_matrix()
        assert m.enroll_ids == ["A1", "B1", "C1", "D1", "E1"]
        assert m.verify_ids == ["A2", "B2", "C2", "D2", "E2"]
        diag = [m.scores[i, i] for i in range(5)]
        assert diag == pytest.approx([0.8119, 0.8551, 0.7987, 0.8169, 0.8494])
        assert m.genuine_mask.sum() == 5
        assert (~m.genuine_mask).sum() == 20

    def test_operating_point(self):
        report = compute_eer(reference_matrix(), operating_threshold=0.8)
        assert report.far_at == Fraction(4, 20)
        assert report.frr_at == Fraction(1, 5)
        assert report.eer == Fraction(1, 5)
        assert report.convention == "exact"

    def test_flagged_cells(self):
        m = reference_matrix()
        cells = {(e, v, kind) for e, v, kind in flagged_cells(m, 0.8)}
        assert cells == {
            ("C1", "A2", "false_accept"),
            ("C1", "E2", "false_accept"),
            ("D1", "A2", "false_accept"),
            ("D1", "B2", "false_accept"),
            ("C1", "C2", "false_reject"),
        }

    def test_render_contains_all_cells(self):
        m = reference_matrix()
        text = render_table(m)
        assert "Enroll \\ Verify" in text
        for row in m.scores:
            for v in row:
                assert f"{v:.4f}" in text


class TestTableFormat:
    def test_roundtrip(self):
        m = reference_matrix()
        back = parse_score_table(format_score_table(m))
        assert back.enroll_ids == m.enroll_ids
        assert back.verify_ids == m.verify_ids
        assert np.allclose(back.scores, m.scores)
        assert np.array_equal(back.genuine_mask, m.genuine_mask)

    def test_rejects_ragged(self):
        with pytest.raises(DegenerateMatrixError):
            parse_score_table("A2 B2\nA1 0.5\n")


class TestComputeMatrix:
    def test_cosine_cross_product(self):
        enroll = [("A", "A1", unit_emb(1)), ("B", "B1", unit_emb(2))]
        probes = [("A", "A2", unit_emb(3)), ("B", "B2", unit_emb(4))]
        m = compute_matrix(enroll, probes)
        for i, (_, _, e) in enumerate(enroll):
            for j, (_, _, p) in enumerate(probes):
                assert m.scores[i, j] == pytest.approx(float(e.v @ p.v))
        assert m.genuine_mask.tolist() == [[True, False], [False, True]]

    def test_each_reference_score_constructible(self):
        # any table cell value is realizable as a cosine of two unit vectors
        for target in reference_matrix().scores.ravel():
            a = np.zeros(8)
            a[0] = 1.0
            b = np.zeros(8)
            b[0] = target
            b[1] = np.sqrt(1 - target**2)
            ea = Embedding(v=a, model_id="m")
            eb = Embedding(v=b, model_id="m")
            assert float(ea.v @ eb.v) == pytest.approx(target, abs=1e-12)

    def test_mixed_model_ids_rejected(self):
        enroll = [("A", "A1", unit_emb(1, "m1"))]
        probes = [("A", "A2", unit_emb(2, "m2"))]
        with pytest.raises(ModelMismatchError):
            compute_matrix(enroll, probes)

    def test_empty_rejected(self):
        with pytest.raises(DegenerateMatrixError):
            compute_matrix([], [("A", "A2", unit_emb(1))])
