import math

import numpy as np
import pytest

import qfr


def test_registry_matches_defaults():
    names = qfr.scenarios()
    assert len(names) == 12
    assert "particle_h3" in names
    assert qfr.defaults("two_qubit")["theta"] == pytest.approx(0.7)


def test_two_qubit_report():
    report = qfr.run("two_qubit", theta=0.3)
    assert report["scenario"] == "two_qubit"
    assert report["passed"]
    assert report["parameters"]["theta"] == pytest.approx(0.3)
    assert all(c["pass"] for c in report["checks"])


def test_text_and_csv_rendering():
    text = qfr.render("violation", fmt="text")
    assert "overall PASS" in text
    csv = qfr.render("violation", fmt="csv")
    assert csv.startswith("kind,name,value,tolerance,relation,verdict")


def test_closed_form_matches_conditional_maps():
    sigma = np.zeros((2, 2), dtype=complex)
    sigma[0, 0] = 1.0
    for theta in (0.0, 0.3, 0.7, math.pi / 2):
        forward, _ = qfr.two_qubit_maps(theta, 1.0, 1.0, sigma)
        assert np.max(np.abs(forward - qfr.two_qubit_forward_00(theta, 1.0))) <= 1e-12


def test_violation_closed_form_value():
    # K = 1, s beta = 1: x e^-x / (1 - e^-x) - 2x e^-2x / (1 - e^-2x) at x = 1.
    x = 1.0
    expected = x * math.exp(-x) / (1 - math.exp(-x)) - 2 * x * math.exp(-2 * x) / (1 - math.exp(-2 * x))
    assert qfr.violation_closed_form(1, 1.0, 1.0) == pytest.approx(expected, abs=1e-12)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        qfr.run("no_such_scenario")
    with pytest.raises(ValueError):
        qfr.run("two_qubit", colour=1)
    with pytest.raises(qfr.QfrError):
        qfr.particle_example(n_points=40)


def test_coarse_particle_example():
    r = qfr.particle_example(scheme="fd3", n_points=319, y_min=-16.0, y_max=16.0)
    assert r["residual"] <= r["bound"]
    assert r["residual"] <= 1e-6
    assert abs(r["p_plus"] - 0.357) < 5e-3
