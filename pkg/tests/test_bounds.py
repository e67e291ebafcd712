import pytest

from rattling.bounds import BOUND_NAMES, check_runtime_bounds
from rattling.events import EventLog, SwitchEvent
from rattling.relay import ModelParams
from rattling.solver import SolverConfig, run_event_driven


@pytest.fixture(scope="module")
def run():
    return run_event_driven(ModelParams(1.0, 1.0, 0.1), SolverConfig(max_events=20))


def test_computed_run_satisfies_bounds(run):
    rep = check_runtime_bounds(run)
    assert set(rep.violations) == set(BOUND_NAMES)
    assert rep.ok(1e-7)
    assert rep.samples > len(run)
    assert rep.as_dict()["nodes"] == rep.nodes


def test_wrong_switching_time_is_flagged(run):
    events = list(run.events)
    k = len(events) // 2
    events[k] = SwitchEvent(events[k].node, events[k].time + 0.5 * (events[k + 1].time - events[k].time))
    fake = EventLog(run.params, run.horizon, events)
    rep = check_runtime_bounds(fake)
    assert rep.violations["u_at_switch"] > 1e-3
    assert not rep.ok(1e-7)


def test_missing_switch_breaks_sign_bound(run):
    fake = EventLog(run.params, run.horizon, run.events[:-3] + run.events[-2:])
    rep = check_runtime_bounds(fake)
    assert rep.violations["u_nonpositive"] > 1e-3
