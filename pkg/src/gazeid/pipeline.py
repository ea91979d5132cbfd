"""Recording -> embedding pipeline and the verification decision rule."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ModelMismatchError, RecordingRejectedError
from .network import Embedding, ModelParams, forward
from .signal import GazeRecording, decimate, normalize, resample_linear, to_velocity
from .stimulus import StimulusSchedule, generate_schedule, validate_recording

MODEL_RATE_HZ = 125.0


@dataclass(frozen=True)
class DecisionPolicy:
    """Similarity threshold and multi-template aggregation rule."""

    threshold: float = 0.8
    aggregation: str = "max"  # or "mean"

    def __post_init__(self):
        if not (-1.0 <= self.threshold <= 1.0):
            raise ConfigError("threshold must be in [-1, 1]")
        if self.aggregation not in ("max", "mean"):
            raise ConfigError(f"unknown aggregation: {self.aggregation}")


@dataclass(frozen=True)
class VerificationResult:
    claimed_name: str
    similarity: float
    decision: str  # "accept" | "reject"
    threshold: float
    embed_ms: float
    total_ms: float

    def to_dict(self) -> dict:
        return {
            "name": self.claimed_name,
            "similarity": self.similarity,
            "decision": self.decision,
            "threshold": self.threshold,
            "embed_ms": self.embed_ms,
            "total_ms": self.total_ms,
        }


def cosine_similarity(a: Embedding, b: Embedding) -> float:
    """Dot product of unit vectors; symmetric, in [-1, 1]."""
    if a.model_id != b.model_id:
        raise ModelMismatchError(f"model ids differ: {a.model_id} vs {b.model_id}")
    if a.v.shape != b.v.shape:
        raise ModelMismatchError("embedding dimensions differ")
    return float(np.dot(a.v, b.v))


def to_model_rate(rec: GazeRecording, rate_hz: float = MODEL_RATE_HZ) -> GazeRecording:
    """Bring a recording to the model rate; decimation when the ratio is
    integral, linear resampling otherwise."""
    if abs(rec.rate_hz - rate_hz) < 1e-9:
        return rec
    ratio = rec.rate_hz / rate_hz
    if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1:
        return decimate(rec, rate_hz)
    return resample_linear(rec, rate_hz)


def process_recording(
    rec: GazeRecording,
    params: ModelParams,
    sched: StimulusSchedule | None = None,
    validation_tolerance_s: float = 0.5,
) -> Embedding:
    """Validate, condition, and embed one recording.

    Pipeline: resample to the model rate if needed -> velocity -> z-score
    with the model's frozen stats -> forward pass.
    """
    if sched is None:
        sched = generate_schedule(seed=0)
    report = validate_recording(rec, sched, validation_tolerance_s)
    if not report.passed:
        raise RecordingRejectedError(report.to_dict())
    conditioned = to_model_rate(rec)
    vel = normalize(to_velocity(conditioned), params.norm_stats)
    return forward(params, vel)


def verify(
    claimed_name: str,
    rec: GazeRecording,
    store,
    params: ModelParams,
    policy: DecisionPolicy = DecisionPolicy(),
    sched: StimulusSchedule | None = None,
) -> VerificationResult:
    """Compare a probe recording against the claimed user's templates."""
    t0 = time.perf_counter()
    record = store.lookup(claimed_name)
    t1 = time.perf_counter()
    probe = process_recording(rec, params, sched)
    embed_ms = (time.perf_counter() - t1) * 1000.0

    sims = [cosine_similarity(probe, e) for e in record.embeddings]
    similarity = max(sims) if policy.aggregation == "max" else float(np.mean(sims))
    decision = "accept" if similarity >= policy.threshold else "reject"
    return VerificationResult(
        claimed_name=claimed_name,
        similarity=similarity,
        decision=decision,
        threshold=policy.threshold,
        embed_ms=embed_ms,
        total_ms=(time.perf_counter() - t0) * 1000.0,
    )
