"""9-point-grid stimulus schedule: generation, serialization, input guards.

Enrollment and verification recordings follow a dot that jumps through the
nine positions of a 3x3 grid in a seeded random order, one period per
position.  The same serialized schedule is served to the demo UI so client
and server agree exactly on target timing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .signal import GazeRecording

DEFAULT_HALF_WIDTH_DEG = 15.0
DEFAULT_HALF_HEIGHT_DEG = 10.0
DEFAULT_PERIOD_S = 1.0

# Rendering hints for the UI: dot diameter and background shade.
DOT_DIAMETER_DEG = 0.5
BACKGROUND = "light-gray"

MIN_RATE_HZ = 60.0
MAX_RATE_HZ = 2000.0
MIN_VALID_FRACTION = 0.8


@dataclass(frozen=True)
class StimulusTarget:
    x_deg: float
    y_deg: float
    onset_s: float
    duration_s: float


@dataclass(frozen=True)
class StimulusSchedule:
    targets: tuple[StimulusTarget, ...]
    total_s: float
    seed: int


@dataclass(frozen=True)
class ValidationReport:
    """Pre-flight checks on a recording against its schedule."""

    duration_ok: bool
    validity_ok: bool
    rate_ok: bool
    duration_s: float
    valid_fraction: float
    rate_hz: float

    @property
    def passed(self) -> bool:
        return self.duration_ok and self.validity_ok and self.rate_ok

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "duration_ok": self.duration_ok,
            "validity_ok": self.validity_ok,
            "rate_ok": self.rate_ok,
            "duration_s": self.duration_s,
            "valid_fraction": self.valid_fraction,
            "rate_hz": self.rate_hz,
        }


def generate_schedule(
    seed: int,
    grid_half_width_deg: float = DEFAULT_HALF_WIDTH_DEG,
    grid_half_height_deg: float = DEFAULT_HALF_HEIGHT_DEG,
    period_s: float = DEFAULT_PERIOD_S,
) -> StimulusSchedule:
    """Visit each of the 9 grid points once, in a seeded random order.

    The grid is {-w, 0, +w} x {-h, 0, +h}; the first target onsets at t=0
    and the schedule is gapless, so total_s = 9 * period_s.
    """
    if grid_half_width_deg <= 0 or grid_half_height_deg <= 0:
        raise ConfigError("grid half-extents must be positive")
    if period_s <= 0:
        raise ConfigError("period_s must be positive")

    xs = (-grid_half_width_deg, 0.0, grid_half_width_deg)
    ys = (-grid_half_height_deg, 0.0, grid_half_height_deg)
    points = [(x, y) for y in ys for x in xs]
    order = np.random.default_rng(seed).permutation(len(points))

    targets = tuple(
        StimulusTarget(
            x_deg=points[j][0],
            y_deg=points[j][1],
            onset_s=i * period_s,
            duration_s=period_s,
        )
        for i, j in enumerate(order)
    )
    return StimulusSchedule(targets=targets, total_s=len(points) * period_s, seed=seed)


def validate_recording(
    rec: GazeRecording,
    sched: StimulusSchedule,
    tolerance_s: float = 0.5,
    min_valid_fraction: float = MIN_VALID_FRACTION,
) -> ValidationReport:
    """Report whether a recording plausibly captures the scheduled task."""
    duration = rec.duration_s
    valid_fraction = sum(s.valid for s in rec.samples) / len(rec.samples)
    return ValidationReport(
        duration_ok=abs(duration - sched.total_s) <= tolerance_s,
        validity_ok=valid_fraction >= min_valid_fraction,
        rate_ok=MIN_RATE_HZ <= rec.rate_hz <= MAX_RATE_HZ,
        duration_s=duration,
        valid_fraction=valid_fraction,
        rate_hz=rec.rate_hz,
    )


def schedule_to_dict(sched: StimulusSchedule) -> dict:
    return {
        "seed": sched.seed,
        "period_s": sched.targets[0].duration_s,
        "total_s": sched.total_s,
        "targets": [
            {
                "x_deg": t.x_deg,
                "y_deg": t.y_deg,
                "onset_s": t.onset_s,
                "duration_s": t.duration_s,
            }
            for t in sched.targets
        ],
    }


def schedule_from_dict(obj: dict) -> StimulusSchedule:
    targets = tuple(
        StimulusTarget(t["x_deg"], t["y_deg"], t["onset_s"], t["duration_s"])
        for t in obj["targets"]
    )
    return StimulusSchedule(
        targets=targets,
        total_s=sum(t.duration_s for t in targets),
        seed=int(obj["seed"]),
    )
