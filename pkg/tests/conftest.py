import numpy as np
import pytest

# (criterion, passed, detail) entries appended by tests/test_acceptance.py;
# echoed after the run so each criterion gets one visible pass/fail line.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(
            f"{name}: {'PASS' if ok else 'FAIL'} ({detail})"
        )

from gazeid.network import NetworkConfig, init_params
from gazeid.signal import NormStats
from gazeid.stimulus import generate_schedule
from gazeid.synth import SyntheticUserProfile, simulate_recording

SMALL_CFG = NetworkConfig(
    n_conv_layers=3,
    filters_per_layer=8,
    kernel_size=3,
    dilations=(1, 2, 4),
    embedding_dim=32,
    input_len=1125,
    input_channels=2,
)


@pytest.fixture(scope="session")
def small_params():
    """Untrained but deterministic model sized for full task recordings."""
    return init_params(SMALL_CFG, NormStats((0.0, 0.0), (25.0, 25.0)), seed=1234)


@pytest.fixture(scope="session")
def task_schedule():
    return generate_schedule(seed=0)


def make_task_recording(rate_hz=125.0, user_seed=11, session_seed=1, sched=None):
    profile = SyntheticUserProfile(
        eta=480.0,
        c=6.5,
        latency_mean_s=0.18,
        latency_std_s=0.02,
        fix_noise_deg=0.12,
        drift_deg_s=0.3,
        undershoot_frac=0.05,
        seed=user_seed,
    )
    return simulate_recording(
        profile, sched or generate_schedule(seed=0), rate_hz, session_seed
    )


@pytest.fixture(scope="session")
def task_recording(task_schedule):
    return make_task_recording(sched=task_schedule)
