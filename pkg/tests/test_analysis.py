import math

import numpy as np
import pytest

from rattling.analysis import (
    astar_table_csv,
    fit_rattling,
    identity_main3,
    integral_I_F,
    integral_I_G,
    integral_I_H,
    integral_I_H_raw,
    profiles_csv,
    solve_a_star,
)
from rattling.errors import DomainError
from rattling.events import EventLog, SwitchEvent
from rattling.relay import ModelParams


def test_small_a_limits():
    assert abs(integral_I_F(1e-4)) <= 1e-3
    assert integral_I_G(1e-6) == pytest.approx(0.0, abs=1e-3)


def test_large_a_limit():
    assert integral_I_G(1e4) == pytest.approx(-1.0, abs=0.01)


def test_I_G_decreasing():
    vals = [integral_I_G(a) for a in np.geomspace(0.01, 100, 12)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("a", [0.2, 1.0, 5.0])
def test_identity(a):
    assert abs(identity_main3(a)) <= 1e-9


def test_I_H_forms_agree():
    assert integral_I_H_raw(1.0) == pytest.approx(integral_I_H(1.0), abs=1e-9)


def test_I_H_closed_form_at_zero():
    # a -> 0: I_H -> 2 int_0^inf h = 1
    assert integral_I_H(1e-12) == pytest.approx(1.0, abs=1e-6)


def test_domain():
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(DomainError):
            integral_I_F(bad)
    for lam in (2.0, 1.5):
        with pytest.raises(DomainError):
            solve_a_star(lam)


def test_a_star_consistency():
    c = solve_a_star(10.0)
    assert c.max_disagreement <= 1e-8
    assert all(abs(r) <= 1e-8 for r in c.residuals.values())
    assert c.sign_changes["eqGa"] == 1
    assert c.as_dict()["max_disagreement"] == c.max_disagreement


def test_a_star_trends():
    a3, a10 = solve_a_star(3.0).a_star, solve_a_star(10.0).a_star
    assert solve_a_star(2.05).a_star > 5 * a3
    assert solve_a_star(100.0).a_star < a10 / 5


def test_tables():
    lines = astar_table_csv([5.0]).splitlines()
    assert lines[0] == "lambda,a_star_eqFa,a_star_eqGa,a_star_eqHa,max_disagreement"
    assert len(lines) == 2
    prof = profiles_csv(points=11).splitlines()
    assert prof[0].split(",")[:4] == ["x", "F_a=0.2", "G_a=0.2", "H_a=0.2"]
    assert len(prof) == 10
    with pytest.raises(DomainError):
        profiles_csv(points=2)


def _synthetic_log(a, n_max, params):
    events = [SwitchEvent(n, a * n * n + 0.3 * n) for n in range(n_max + 1)]
    return EventLog(params, events[-1].time, events)


def test_fit_recovers_quadratic():
    params = ModelParams(1.0, 0.0, 0.1)
    consts = solve_a_star(params.ratio)
    rep = fit_rattling(_synthetic_log(0.7, 40, params), consts)
    assert rep.measured_a == pytest.approx(0.7, rel=1e-10)
    assert rep.fit_coefficients["b"] == pytest.approx(0.3, abs=1e-8)
    assert rep.measured_p_star == pytest.approx(39 / 40)
    assert rep.spacing_epsilon > 0
    assert rep.to_json().count("measured_a") == 1
    assert rep.omega_csv().splitlines()[0] == "k,t_k,omega_k"


def test_fit_needs_events():
    params = ModelParams(1.0, 0.0, 0.1)
    with pytest.raises(DomainError):
        fit_rattling(_synthetic_log(0.7, 5, params))


def test_fit_on_simulation(run_all_switch, a_star_10):
    rep = fit_rattling(run_all_switch, a_star_10)
    assert rep.measured_p_star > 0.95
    assert rep.omega_max_ratio < 1.0
    assert rep.a_relative_error <= 0.05
    assert rep.predicted_p_star == 1.0
