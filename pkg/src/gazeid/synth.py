"""Parametric per-user oculomotor simulator.

Generates gaze recordings in response to a stimulus schedule: fixations
with jitter and drift, then a main-sequence saccade to each new target
after a sampled latency, optionally undershooting and correcting with a
secondary saccade.  Serves as training/eval data source and ground-truth
oracle in place of a real eye tracker.

The saccadic velocity profile is sin^p(pi*t/D) scaled so the peak matches
the main-sequence prediction eta*(1-exp(-A/c)) and the time integral
matches the amplitude exactly; the exponent p is solved per saccade.  The
duration follows the linear law 0.0022*A + 0.021 s except when that law
is incompatible with the profile's peak velocity (slow eyes, small
amplitudes), in which case the saccade is stretched just enough to fit.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .signal import GazeRecording, GazeSample, save_recording
from .stimulus import StimulusSchedule, generate_schedule

DURATION_SLOPE_S_PER_DEG = 0.0022
DURATION_INTERCEPT_S = 0.021
CORRECTIVE_DELAY_S = 0.1
MIN_LATENCY_S = 0.02
# Highest mean/peak velocity ratio the sin^p profile is allowed to reach;
# beyond it the duration law is overridden (see module docstring).
MAX_MEAN_PEAK_RATIO = 0.85


@dataclass(frozen=True)
class SyntheticUserProfile:
    """Oculomotor parameters that make a simulated user distinctive."""

    eta: float  # main-sequence asymptotic peak velocity, deg/s
    c: float  # main-sequence amplitude constant, deg
    latency_mean_s: float
    latency_std_s: float
    fix_noise_deg: float
    drift_deg_s: float
    undershoot_frac: float
    seed: int

    def __post_init__(self):
        if not (200 <= self.eta <= 800):
            raise ConfigError(f"eta out of range: {self.eta}")
        if not (3 <= self.c <= 12):
            raise ConfigError(f"c out of range: {self.c}")
        if not (0.1 <= self.latency_mean_s <= 0.4):
            raise ConfigError(f"latency_mean_s out of range: {self.latency_mean_s}")
        if self.fix_noise_deg < 0:
            raise ConfigError("fix_noise_deg must be non-negative")
        if not (0 <= self.undershoot_frac <= 0.2):
            raise ConfigError(f"undershoot_frac out of range: {self.undershoot_frac}")


def peak_velocity(profile: SyntheticUserProfile, amplitude_deg: float) -> float:
    """Main-sequence peak velocity eta*(1-exp(-A/c)), deg/s."""
    if amplitude_deg < 0:
        raise ConfigError("amplitude must be non-negative")
    return profile.eta * (1.0 - math.exp(-amplitude_deg / profile.c))


def _sinp_mean(p: float) -> float:
    """Mean of sin^p(pi*u) over u in [0, 1]."""
    return math.gamma((p + 1) / 2) / (math.sqrt(math.pi) * math.gamma(p / 2 + 1))


def _solve_exponent(ratio: float) -> float:
    """Find p with mean(sin^p) = ratio (mean/peak velocity ratio)."""
    lo, hi = 1e-3, 200.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _sinp_mean(mid) > ratio:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def saccade_shape(profile: SyntheticUserProfile, amplitude_deg: float):
    """Duration, peak velocity, and profile exponent for one saccade."""
    vp = peak_velocity(profile, amplitude_deg)
    duration = DURATION_SLOPE_S_PER_DEG * amplitude_deg + DURATION_INTERCEPT_S
    ratio = amplitude_deg / (vp * duration)
    if ratio > MAX_MEAN_PEAK_RATIO:
        duration = amplitude_deg / (MAX_MEAN_PEAK_RATIO * vp)
        ratio = MAX_MEAN_PEAK_RATIO
    return duration, vp, _solve_exponent(ratio)


def _displacement_fraction(p: float, u: np.ndarray) -> np.ndarray:
    """Normalized position along the saccade at phase u in [0, 1]."""
    grid = np.linspace(0.0, 1.0, 1025)
    dens = np.sin(np.pi * grid) ** p
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2)])
    cdf /= cdf[-1]
    return np.interp(np.clip(u, 0.0, 1.0), grid, cdf)


@dataclass
class _Fixation:
    t0: float
    t1: float
    pos: np.ndarray
    drift: np.ndarray


@dataclass
class _Saccade:
    t0: float
    duration: float
    pos: np.ndarray
    delta: np.ndarray
    exponent: float

    @property
    def t1(self) -> float:
        return self.t0 + self.duration


def _plan_segments(profile, sched: StimulusSchedule, rng) -> list:
    """Lay out alternating fixation/saccade segments over the task."""

    def drift_vec():
        if profile.drift_deg_s == 0:
            return np.zeros(2)
        angle = rng.uniform(0, 2 * math.pi)
        return profile.drift_deg_s * np.array([math.cos(angle), math.sin(angle)])

    segments = []
    pos = np.zeros(2)
    t_cursor = 0.0
    drift = drift_vec()

    def hold_until(t_end):
        nonlocal pos, t_cursor
        if t_end > t_cursor:
            segments.append(_Fixation(t_cursor, t_end, pos.copy(), drift))
            pos = pos + drift * (t_end - t_cursor)
            t_cursor = t_end

    def jump(target, amplitude):
        nonlocal pos, t_cursor
        direction = (target - pos) / np.linalg.norm(target - pos)
        duration, _, p = saccade_shape(profile, amplitude)
        segments.append(_Saccade(t_cursor, duration, pos.copy(), direction * amplitude, p))
        pos = pos + direction * amplitude
        t_cursor += duration

    for target in sched.targets:
        latency = max(MIN_LATENCY_S, rng.normal(profile.latency_mean_s, profile.latency_std_s))
        hold_until(max(t_cursor, target.onset_s + latency))
        goal = np.array([target.x_deg, target.y_deg])
        dist = np.linalg.norm(goal - pos)
        if dist < 1e-9:
            continue
        jump(goal, (1.0 - profile.undershoot_frac) * dist)
        residual = np.linalg.norm(goal - pos)
        if residual > 1e-6:
            drift = drift_vec()
            hold_until(t_cursor + CORRECTIVE_DELAY_S)
            residual = np.linalg.norm(goal - pos)
            if residual > 1e-6:
                jump(goal, residual)
        drift = drift_vec()
    hold_until(sched.total_s + 1.0)
    return segments


def simulate_recording(
    profile: SyntheticUserProfile,
    sched: StimulusSchedule,
    rate_hz: float,
    session_seed: int,
) -> GazeRecording:
    """Simulate one task recording; deterministic given both seeds."""
    if not (60 <= rate_hz <= 2000):
        raise ConfigError(f"rate_hz out of range: {rate_hz}")
    rng = np.random.default_rng([profile.seed, session_seed])
    segments = _plan_segments(profile, sched, rng)

    n = int(round(sched.total_s * rate_hz))
    t = np.arange(n) / rate_hz
    xy = np.zeros((n, 2))
    for seg in segments:
        lo = np.searchsorted(t, seg.t0, side="left")
        hi = np.searchsorted(t, seg.t1, side="left")
        if hi <= lo:
            continue
        ts = t[lo:hi]
        if isinstance(seg, _Fixation):
            xy[lo:hi] = seg.pos + np.outer(ts - seg.t0, seg.drift)
        else:
            frac = _displacement_fraction(seg.exponent, (ts - seg.t0) / seg.duration)
            xy[lo:hi] = seg.pos + np.outer(frac, seg.delta)
    if profile.fix_noise_deg > 0:
        jitter = rng.normal(0.0, profile.fix_noise_deg, size=(n, 2))
        limit = 3.0 * profile.fix_noise_deg
        xy = xy + np.clip(jitter, -limit, limit)

    samples = [
        GazeSample(float(ti), float(p[0]), float(p[1]), True) for ti, p in zip(t, xy)
    ]
    return GazeRecording(rate_hz=rate_hz, samples=samples, meta={})


@dataclass(frozen=True)
class PopulationConfig:
    """Sampling ranges for drawing a synthetic population."""

    eta_range: tuple[float, float] = (250.0, 750.0)
    c_range: tuple[float, float] = (4.0, 10.0)
    latency_mean_range: tuple[float, float] = (0.12, 0.28)
    latency_std_s: float = 0.02
    fix_noise_range: tuple[float, float] = (0.05, 0.35)
    drift_range: tuple[float, float] = (0.1, 0.8)
    undershoot_range: tuple[float, float] = (0.0, 0.15)


def draw_profile(rng, cfg: PopulationConfig = PopulationConfig()) -> SyntheticUserProfile:
    return SyntheticUserProfile(
        eta=float(rng.uniform(*cfg.eta_range)),
        c=float(rng.uniform(*cfg.c_range)),
        latency_mean_s=float(rng.uniform(*cfg.latency_mean_range)),
        latency_std_s=cfg.latency_std_s,
        fix_noise_deg=float(rng.uniform(*cfg.fix_noise_range)),
        drift_deg_s=float(rng.uniform(*cfg.drift_range)),
        undershoot_frac=float(rng.uniform(*cfg.undershoot_range)),
        seed=int(rng.integers(0, 2**31 - 1)),
    )


def make_population(
    n_users: int,
    n_sessions: int,
    master_seed: int,
    rate_hz: float = 125.0,
    sched_kwargs: dict | None = None,
    population_cfg: PopulationConfig = PopulationConfig(),
) -> list[tuple[str, int, GazeRecording]]:
    """Draw profiles and simulate n_sessions recordings per user.

    Returns (user_id, session, recording) triples; user ids are "u00",
    "u01", ...  Deterministic given master_seed.
    """
    if n_users < 2 or n_sessions < 2:
        raise ConfigError("need at least 2 users and 2 sessions")
    rng = np.random.default_rng(master_seed)
    sched_kwargs = sched_kwargs or {}
    corpus = []
    for u in range(n_users):
        profile = draw_profile(rng, population_cfg)
        user_id = f"u{u:02d}"
        for s in range(1, n_sessions + 1):
            sched_seed = int(rng.integers(0, 2**31 - 1))
            session_seed = int(rng.integers(0, 2**31 - 1))
            sched = generate_schedule(sched_seed, **sched_kwargs)
            rec = simulate_recording(profile, sched, rate_hz, session_seed)
            rec.meta.update(
                {"subject": user_id, "session": str(s), "task": "grid9"}
            )
            corpus.append((user_id, s, rec))
    return corpus


def write_corpus(corpus, out_dir) -> str:
    """Write one recording file per (user, session) plus a manifest.

    Returns the manifest path.  Manifest schema:
    {"recordings": [{"path", "user", "session"}]} with paths relative to
    the manifest's directory.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for user, session, rec in corpus:
        fname = f"{user}_s{session}.json"
        save_recording(rec, os.path.join(out_dir, fname))
        entries.append({"path": fname, "user": user, "session": session})
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump({"recordings": entries}, f, indent=2)
    return manifest_path


def load_manifest(manifest_path) -> list[dict]:
    base = os.path.dirname(os.path.abspath(manifest_path))
    with open(manifest_path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    entries = []
    for e in manifest["recordings"]:
        path = e["path"]
        if not os.path.isabs(path):
            path = os.path.join(base, path)
        entries.append({"path": path, "user": e["user"], "session": int(e["session"])})
    return entries


def bhattacharyya_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Distance between two histograms (normalized to mass 1)."""
    p = np.asarray(h1, dtype=float)
    q = np.asarray(h2, dtype=float)
    p = p / p.sum()
    q = q / q.sum()
    bc = np.sum(np.sqrt(p * q))
    return -math.log(max(bc, 1e-300))


def velocity_magnitude_histogram(rec: GazeRecording, bins=None) -> np.ndarray:
    """Histogram of speed (deg/s), a crude per-user signature."""
    from .signal import to_velocity

    if bins is None:
        bins = np.concatenate([np.linspace(0, 100, 21), np.linspace(120, 1000, 23)])
    vel = to_velocity(rec)
    speed = np.hypot(vel.vx, vel.vy)
    hist, _ = np.histogram(speed, bins=bins)
    return hist.astype(float) + 1e-3
