"""Biometric evaluation: score matrices, FAR/FRR, equal error rate.

Counts are exact rational arithmetic (fractions.Fraction); the decision
boundary convention is accept at similarity >= threshold everywhere.
The EER sweep examines every distinct score plus boundary sentinels; when
no threshold equalizes FAR and FRR exactly, the midpoint (FAR+FRR)/2 at
the threshold minimizing |FAR-FRR| is reported, ties broken toward the
smaller threshold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateMatrixError, ModelMismatchError, ProtocolError


def subject_of(label: str) -> str:
    """Subject id from a '<subject><session digits>' label: 'A1' -> 'A'."""
    return re.sub(r"\d+$", "", label)


@dataclass
class ScoreMatrix:
    enroll_ids: list[str]
    verify_ids: list[str]
    scores: np.ndarray  # (|enroll|, |verify|)
    genuine_mask: np.ndarray  # bool, same shape

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.genuine_mask = np.asarray(self.genuine_mask, dtype=bool)
        if self.scores.shape != (len(self.enroll_ids), len(self.verify_ids)):
            raise DegenerateMatrixError("score shape does not match labels")
        if not np.all(np.isfinite(self.scores)):
            raise DegenerateMatrixError("scores must be finite")

    @property
    def genuine_scores(self) -> np.ndarray:
        return self.scores[self.genuine_mask]

    @property
    def impostor_scores(self) -> np.ndarray:
        return self.scores[~self.genuine_mask]

    @classmethod
    def from_labels(cls, enroll_ids, verify_ids, scores, subjects=None):
        """Genuine mask from shared subjects; by default the subject is the
        label with any trailing digits removed."""
        fn = subjects or subject_of
        mask = np.array(
            [[fn(e) == fn(v) for v in verify_ids] for e in enroll_ids], dtype=bool
        )
        return cls(list(enroll_ids), list(verify_ids), scores, mask)


@dataclass
class EvalReport:
    thresholds: list[float]
    far_curve: list[Fraction]
    frr_curve: list[Fraction]
    eer: Fraction
    eer_threshold: float
    operating_threshold: float
    far_at: Fraction
    frr_at: Fraction
    convention: str  # "exact" or "midpoint"

    def to_dict(self) -> dict:
        return {
            "eer": float(self.eer),
            "eer_threshold": self.eer_threshold,
            "operating_threshold": self.operating_threshold,
            "far_at_threshold": float(self.far_at),
            "frr_at_threshold": float(self.frr_at),
            "convention": self.convention,
            "thresholds": self.thresholds,
            "far_curve": [float(f) for f in self.far_curve],
            "frr_curve": [float(f) for f in self.frr_curve],
        }


def compute_matrix(enrollments, probes) -> ScoreMatrix:
    """Full cross-product cosine scores.

    enrollments/probes are (subject, label, Embedding) triples; all
    embeddings must share one model_id.
    """
    if not enrollments or not probes:
        raise DegenerateMatrixError("need at least one enrollment and one probe")
    model_ids = {e.model_id for _, _, e in list(enrollments) + list(probes)}
    if len(model_ids) > 1:
        raise ModelMismatchError(f"mixed model ids in matrix: {sorted(model_ids)}")
    e_vecs = np.stack([e.v for _, _, e in enrollments])
    p_vecs = np.stack([e.v for _, _, e in probes])
    scores = e_vecs @ p_vecs.T
    mask = np.array(
        [[es == ps for ps, _, _ in probes] for es, _, _ in enrollments], dtype=bool
    )
    return ScoreMatrix(
        enroll_ids=[lab for _, lab, _ in enrollments],
        verify_ids=[lab for _, lab, _ in probes],
        scores=scores,
        genuine_mask=mask,
    )


def far_frr(matrix: ScoreMatrix, threshold: float) -> tuple[Fraction, Fraction]:
    """Exact error rates at one threshold (accept at score >= threshold)."""
    gen = matrix.genuine_scores
    imp = matrix.impostor_scores
    if gen.size == 0 or imp.size == 0:
        raise DegenerateMatrixError("need both genuine and impostor scores")
    far = Fraction(int(np.sum(imp >= threshold)), imp.size)
    frr = Fraction(int(np.sum(gen < threshold)), gen.size)
    return far, frr


def compute_eer(matrix: ScoreMatrix, operating_threshold: float = 0.8) -> EvalReport:
    """Threshold sweep over all distinct scores plus boundary sentinels."""
    gen = matrix.genuine_scores
    imp = matrix.impostor_scores
    if gen.size == 0 or imp.size == 0:
        raise DegenerateMatrixError("need both genuine and impostor scores")

    distinct = np.unique(matrix.scores)
    thresholds = np.concatenate([[distinct[0] - 1.0], distinct, [distinct[-1] + 1.0]])
    fars, frrs = [], []
    for t in thresholds:
        far, frr = far_frr(matrix, t)
        fars.append(far)
        frrs.append(frr)

    exact = [i for i in range(len(thresholds)) if fars[i] == frrs[i]]
    if exact:
        best = exact[0]
        eer = fars[best]
        convention = "exact"
    else:
        gaps = [abs(fars[i] - frrs[i]) for i in range(len(thresholds))]
        best = gaps.index(min(gaps))
        eer = Fraction(fars[best] + frrs[best], 2)
        convention = "midpoint"

    far_at, frr_at = far_frr(matrix, operating_threshold)
    return EvalReport(
        thresholds=[float(t) for t in thresholds],
        far_curve=fars,
        frr_curve=frrs,
        eer=eer,
        eer_threshold=float(thresholds[best]),
        operating_threshold=operating_threshold,
        far_at=far_at,
        frr_at=frr_at,
        convention=convention,
    )


def flagged_cells(matrix: ScoreMatrix, threshold: float) -> list[tuple[str, str, str]]:
    """Error cells at a threshold: falsely accepted impostor trials and
    falsely rejected genuine trials."""
    out = []
    for i, e in enumerate(matrix.enroll_ids):
        for j, v in enumerate(matrix.verify_ids):
            s = matrix.scores[i, j]
            if matrix.genuine_mask[i, j] and s < threshold:
                out.append((e, v, "false_reject"))
            elif not matrix.genuine_mask[i, j] and s >= threshold:
                out.append((e, v, "false_accept"))
    return out


# ---------------------------------------------------------------------------
# Tabular text fixture format: first row verify labels, then one row per
# enrollment: label followed by the scores.
# ---------------------------------------------------------------------------


def parse_score_table(text: str) -> ScoreMatrix:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    verify_ids = lines[0]
    enroll_ids = []
    rows = []
    for ln in lines[1:]:
        if len(ln) != len(verify_ids) + 1:
            raise DegenerateMatrixError(f"bad fixture row: {' '.join(ln)}")
        enroll_ids.append(ln[0])
        rows.append([float(v) for v in ln[1:]])
    return ScoreMatrix.from_labels(enroll_ids, verify_ids, np.array(rows))


def format_score_table(matrix: ScoreMatrix) -> str:
    lines = [" ".join(matrix.verify_ids)]
    for i, e in enumerate(matrix.enroll_ids):
        lines.append(e + " " + " ".join(f"{v:.4f}" for v in matrix.scores[i]))
    return "\n".join(lines) + "\n"


def render_table(matrix: ScoreMatrix) -> str:
    """Human-readable grid, enroll rows by verify columns."""
    width = max(8, *(len(v) for v in matrix.verify_ids)) + 2
    head = "Enroll \\ Verify".ljust(16) + "".join(v.rjust(width) for v in matrix.verify_ids)
    lines = [head]
    for i, e in enumerate(matrix.enroll_ids):
        lines.append(
            e.ljust(16) + "".join(f"{v:.4f}".rjust(width) for v in matrix.scores[i])
        )
    return "\n".join(lines)


def reference_matrix() -> ScoreMatrix:
    """The 5x5 two-session study fixture shipped with the package."""
    from importlib import resources

    text = resources.files("gazeid.data").joinpath("reference_scores.txt").read_text()
    return parse_score_table(text)


def end_to_end_eval(
    manifest_entries: list[dict],
    params,
    enroll_session: int = 1,
    verify_session: int = 2,
    operating_threshold: float = 0.8,
):
    """Embed every protocol recording and evaluate the resulting matrix.

    manifest_entries carry path/user/session (see synth.load_manifest).
    Returns (EvalReport, ScoreMatrix).
    """
    from .pipeline import process_recording
    from .signal import load_recording

    by_key = {(e["user"], e["session"]): e["path"] for e in manifest_entries}
    users = sorted({e["user"] for e in manifest_entries})
    for u in users:
        for s in (enroll_session, verify_session):
            if (u, s) not in by_key:
                raise ProtocolError(f"user {u} missing session {s}")

    def embed(user, session):
        rec = load_recording(by_key[(user, session)])
        return process_recording(rec, params)

    enrollments = [(u, f"{u}.s{enroll_session}", embed(u, enroll_session)) for u in users]
    probes = [(u, f"{u}.s{verify_session}", embed(u, verify_session)) for u in users]
    matrix = compute_matrix(enrollments, probes)
    return compute_eer(matrix, operating_threshold=operating_threshold), matrix
