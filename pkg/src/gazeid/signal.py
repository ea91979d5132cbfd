"""Gaze signal data model and conditioning operators.

A recording is a timestamped 2-channel sequence of gaze angles in degrees.
Before a recording reaches the embedding network it is brought to the model
rate (decimation or linear resampling), differentiated to angular velocity,
and z-scored with corpus-level statistics.  Training-time noise injection
lives here as well so the whole conditioning chain is in one place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    DecimationRatioError,
    DegenerateCorpusError,
    SignalTooShortError,
    ValidationError,
)

# Physiological ceiling for angular velocity; bounds dropout spikes before
# normalization.
VELOCITY_CLAMP_DEG_S = 1000.0

RECORDING_FORMAT_FIELDS = ("rate_hz", "samples", "meta")


@dataclass(frozen=True)
class GazeSample:
    """One tracker sample: time (s), gaze angles (deg), validity flag."""

    t: float
    x: float
    y: float
    valid: bool = True


@dataclass
class GazeRecording:
    """Ordered gaze samples at a nominal rate plus free-form labels."""

    rate_hz: float
    samples: list[GazeSample]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.rate_hz <= 0:
            raise ConfigError(f"rate_hz must be positive, got {self.rate_hz}")
        if len(self.samples) < 2:
            raise ValidationError("recording needs at least 2 samples")
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("sample timestamps must be strictly increasing")

    @property
    def duration_s(self) -> float:
        """Span of the recording including the last sample's period."""
        return self.samples[-1].t - self.samples[0].t + 1.0 / self.rate_hz

    def arrays(self):
        """Return (t, x, y, valid) as numpy arrays."""
        t = np.array([s.t for s in self.samples])
        x = np.array([s.x for s in self.samples])
        y = np.array([s.y for s in self.samples])
        valid = np.array([s.valid for s in self.samples], dtype=bool)
        return t, x, y, valid


@dataclass(frozen=True)
class DegradationConfig:
    """Target rate and additive-noise parameters for signal degradation.

    Noise is expressed in z-score units because it is applied after
    normalization.
    """

    target_rate_hz: float = 125.0
    noise_mean: float = 0.0
    noise_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.target_rate_hz <= 0:
            raise ConfigError("target_rate_hz must be positive")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be non-negative")


@dataclass(frozen=True)
class NormStats:
    """Frozen per-channel velocity mean/std (deg/s), population convention."""

    mean: tuple[float, float]
    std: tuple[float, float]

    def __post_init__(self):
        if any(s <= 0 for s in self.std):
            raise ConfigError("std must be positive per channel")


@dataclass
class VelocitySequence:
    """Fixed-length 2-channel angular-velocity signal, the network input."""

    rate_hz: float
    vx: np.ndarray
    vy: np.ndarray

    def __post_init__(self):
        self.vx = np.asarray(self.vx, dtype=np.float64)
        self.vy = np.asarray(self.vy, dtype=np.float64)
        if self.vx.shape != self.vy.shape or self.vx.ndim != 1:
            raise ValidationError("vx and vy must be 1-d arrays of equal length")

    def __len__(self) -> int:
        return len(self.vx)

    def stacked(self) -> np.ndarray:
        """Channel-major (2, length) array."""
        return np.stack([self.vx, self.vy])


def decimate(rec: GazeRecording, target_rate_hz: float) -> GazeRecording:
    """Keep every k-th sample, k = rate / target rate.

    Raises DecimationRatioError when the ratio is not an integer; callers
    should fall back to resample_linear in that case.  No anti-alias filter
    is applied.
    """
    if target_rate_hz <= 0:
        raise ConfigError("target_rate_hz must be positive")
    ratio = rec.rate_hz / target_rate_hz
    k = round(ratio)
    if k < 1 or abs(ratio - k) > 1e-9:
        raise DecimationRatioError(
            f"{rec.rate_hz} Hz is not an integer multiple of {target_rate_hz} Hz"
        )
    return GazeRecording(
        rate_hz=target_rate_hz,
        samples=rec.samples[::k],
        meta=dict(rec.meta),
    )


def resample_linear(rec: GazeRecording, target_rate_hz: float) -> GazeRecording:
    """Resample to a uniform grid at the target rate by linear interpolation.

    Output sample count is round(span * rate) + 1 where span is the source
    timestamp extent; the final point may overshoot the last source sample
    by under half a period, in which case it holds the edge value.  A
    resampled point is valid iff both bracketing source samples are valid.
    """
    if target_rate_hz <= 0:
        raise ConfigError("target_rate_hz must be positive")
    t, x, y, valid = rec.arrays()
    span = t[-1] - t[0]
    n_out = int(round(span * target_rate_hz)) + 1
    t_out = t[0] + np.arange(n_out) / target_rate_hz
    x_out = np.interp(t_out, t, x)
    y_out = np.interp(t_out, t, y)

    # Bracketing validity: left neighbor index for each output time.
    right = np.searchsorted(t, t_out, side="left")
    right = np.clip(right, 0, len(t) - 1)
    left = np.clip(right - 1, 0, len(t) - 1)
    exact = t[right] == np.clip(t_out, t[0], t[-1])
    left = np.where(exact, right, left)
    valid_out = valid[left] & valid[right]

    samples = [
        GazeSample(float(ti), float(xi), float(yi), bool(vi))
        for ti, xi, yi, vi in zip(t_out, x_out, y_out, valid_out)
    ]
    return GazeRecording(rate_hz=target_rate_hz, samples=samples, meta=dict(rec.meta))


def to_velocity(rec: GazeRecording) -> VelocitySequence:
    """Central-difference angular velocity in deg/s.

    Interior points use (p[i+1] - p[i-1]) * rate / 2; endpoints copy their
    neighbor.  Velocities are clamped to +/-1000 deg/s.  Samples that are
    invalid, or adjacent to an invalid sample, are imputed as 0.
    """
    if len(rec.samples) < 3:
        raise SignalTooShortError("velocity needs at least 3 samples")
    _, x, y, valid = rec.arrays()

    def central(p):
        v = np.empty_like(p)
        v[1:-1] = (p[2:] - p[:-2]) * rec.rate_hz / 2.0
        v[0] = v[1]
        v[-1] = v[-2]
        return np.clip(v, -VELOCITY_CLAMP_DEG_S, VELOCITY_CLAMP_DEG_S)

    vx = central(x)
    vy = central(y)

    bad = ~valid
    bad = bad | np.roll(bad, 1) | np.roll(bad, -1)
    # roll wraps around; first/last are only affected by their real neighbor
    bad[0] = not (valid[0] and valid[1])
    bad[-1] = not (valid[-1] and valid[-2])
    vx[bad] = 0.0
    vy[bad] = 0.0
    return VelocitySequence(rate_hz=rec.rate_hz, vx=vx, vy=vy)


def fit_norm_stats(corpus) -> NormStats:
    """Pooled per-channel mean/std over every sample of every sequence."""
    seqs = list(corpus)
    if not seqs:
        raise DegenerateCorpusError("empty corpus")
    vx = np.concatenate([s.vx for s in seqs])
    vy = np.concatenate([s.vy for s in seqs])
    mean = (float(vx.mean()), float(vy.mean()))
    std = (float(vx.std()), float(vy.std()))
    if any(s <= 0 for s in std):
        raise DegenerateCorpusError("zero-variance channel in corpus")
    return NormStats(mean=mean, std=std)


def normalize(seq: VelocitySequence, stats: NormStats) -> VelocitySequence:
    """z-score each channel with the frozen corpus statistics."""
    return VelocitySequence(
        rate_hz=seq.rate_hz,
        vx=(seq.vx - stats.mean[0]) / stats.std[0],
        vy=(seq.vy - stats.mean[1]) / stats.std[1],
    )


def denormalize(seq: VelocitySequence, stats: NormStats) -> VelocitySequence:
    """Inverse of normalize with the same stats."""
    return VelocitySequence(
        rate_hz=seq.rate_hz,
        vx=seq.vx * stats.std[0] + stats.mean[0],
        vy=seq.vy * stats.std[1] + stats.mean[1],
    )


def add_noise(seq: VelocitySequence, cfg: DegradationConfig) -> VelocitySequence:
    """Add iid Gaussian noise per channel, deterministic given cfg.seed.

    Intended for already-normalized sequences (train-time augmentation);
    enrollment and verification signals are never noise-augmented.
    """
    if cfg.noise_std == 0 and cfg.noise_mean == 0:
        return VelocitySequence(seq.rate_hz, seq.vx.copy(), seq.vy.copy())
    rng = np.random.default_rng(cfg.seed)
    noise = rng.normal(cfg.noise_mean, cfg.noise_std, size=(2, len(seq)))
    return VelocitySequence(
        rate_hz=seq.rate_hz,
        vx=seq.vx + noise[0],
        vy=seq.vy + noise[1],
    )


# ---------------------------------------------------------------------------
# Recording file format (JSON), shared by the CLI, service, and demo UI.
# ---------------------------------------------------------------------------


def recording_to_dict(rec: GazeRecording) -> dict:
    return {
        "rate_hz": rec.rate_hz,
        "samples": [
            {"t": s.t, "x_deg": s.x, "y_deg": s.y, "valid": s.valid}
            for s in rec.samples
        ],
        "meta": dict(rec.meta),
    }


def recording_from_dict(obj: dict) -> GazeRecording:
    """Parse the recording schema; rejects unsorted or malformed input."""
    if not isinstance(obj, dict):
        raise ValidationError("recording must be an object")
    missing = [f for f in ("rate_hz", "samples") if f not in obj]
    if missing:
        raise ValidationError(f"recording missing fields: {missing}")
    try:
        samples = [
            GazeSample(
                t=float(s["t"]),
                x=float(s["x_deg"]),
                y=float(s["y_deg"]),
                valid=bool(s.get("valid", True)),
            )
            for s in obj["samples"]
        ]
        rec = GazeRecording(
            rate_hz=float(obj["rate_hz"]),
            samples=samples,
            meta={str(k): str(v) for k, v in obj.get("meta", {}).items()},
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed recording: {e}") from e
    return rec


def save_recording(rec: GazeRecording, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(recording_to_dict(rec), f)


def load_recording(path) -> GazeRecording:
    with open(path, "r", encoding="utf-8") as f:
        return recording_from_dict(json.load(f))
