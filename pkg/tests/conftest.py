"""Shared fixtures: expensive simulation runs are computed once per session."""
from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rattling.analysis import solve_a_star  # noqa: E402
from rattling.relay import ModelParams  # noqa: E402
from rattling.solver import SolverConfig, run_event_driven  # noqa: E402
from rattling.stepper import run_time_stepper  # noqa: E402

CROSS_TRIPLES = ((1.0, 0.0, 0.1), (1.0, 1.0, 0.1), (1.0, 0.5, 0.2))

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[number] = (bool(passed), detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def a_star_10():
    return solve_a_star(10.0)


@pytest.fixture(scope="session")
def cross_runs():
    """Event-driven and time-stepper logs of the first 30 events per triple."""
    cfg = SolverConfig(max_events=30)
    out = {}
    for triple in CROSS_TRIPLES:
        params = ModelParams(*triple)
        out[triple] = (run_event_driven(params, cfg), run_time_stepper(params, cfg))
    return out


@pytest.fixture(scope="session")
def run_all_switch():
    """h2 = 0: every node switches."""
    return run_event_driven(ModelParams(1.0, 0.0, 0.1), SolverConfig(max_events=100))


@pytest.fixture(scope="session")
def run_alternating():
    """h1 = h2: every other node switches."""
    return run_event_driven(ModelParams(1.0, 1.0, 0.1), SolverConfig(max_events=80))


@pytest.fixture(scope="session")
def horizon_pairs():
    """Runs at horizons T and 2T for both parameter sets."""
    pairs = {}
    for triple, horizon in (((1.0, 0.0, 0.1), 600.0), ((1.0, 1.0, 0.1), 800.0)):
        params = ModelParams(*triple)
        pairs[triple] = tuple(
            run_event_driven(params, SolverConfig(horizon=h)) for h in (horizon, 2 * horizon)
        )
    return pairs
