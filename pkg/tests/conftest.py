import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from klpaths.arith import field_context
from klpaths.families import Kind, sweep_values
from klpaths.limit_series import SeriesConfig, simulate_batch
from klpaths.stats import Empirical, Simulated, sup_norm_samples

settings.register_profile("default", deadline=None, suppress_health_check=(HealthCheck.too_slow,))
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
MC_SEED = 2024

_summary: list[str] = []


def report(name: str, ok: bool, detail: str = "") -> None:
    _summary.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _summary:
        terminalreporter.section("acceptance criteria")
        for line in _summary:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def calibration():
    return json.loads((FIXTURES / "calibration.json").read_text())


@pytest.fixture(scope="session")
def simulated_half():
    """1e5 realizations of K_m(1/2), m = 1000."""
    return simulate_batch(SeriesConfig(1000, (0.5,)), 100_000, MC_SEED)[:, 0]


@pytest.fixture(scope="session")
def simulated_sups():
    """Sup norms of 1e5 realizations, m = 512 on the 1024-segment grid."""
    return sup_norm_samples(Simulated(SeriesConfig.uniform(512, 1024), 100_000, MC_SEED))


@pytest.fixture(scope="session")
def birch_sups_1009():
    return sup_norm_samples(Empirical(Kind.BIRCH, 1009))


@pytest.fixture(scope="session")
def kloosterman_values():
    """K_p(t, a) for every a at t in (0.25, 0.5, 0.75), p in (101, 1009, 10007)."""
    ts = [0.25, 0.5, 0.75]
    out = {}
    for p in (101, 1009, 10007):
        vals, _ = sweep_values(Kind.KLOOSTERMAN, field_context(p), ts)
        out[p] = dict(zip(ts, vals.T))
    return out
