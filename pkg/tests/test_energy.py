import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adtm import ADTMClassifier
from adtm.automata import INFINITY
from adtm.energy import (
    MODEL_LABEL,
    PowerProfile,
    RngAccounting,
    estimate_power,
    format_power_table,
    get_profile,
    load_profiles,
    power_table,
    report,
    switching_fraction,
)

# hand-computed oracles from the calibration points
BANKRUPTCY_S = 0.49 / (1 - 1 / 5000)


@pytest.mark.parametrize("d,expected", [(1, 0.07), (100, 0.0007), (5000, 0.000014), (INFINITY, 0.0)])
def test_switching_fraction(d, expected):
    assert switching_fraction(d) == pytest.approx(expected)


def test_switching_fraction_rejects():
    for d in (0, -1, 0.5):
        with pytest.raises(ValueError):
            switching_fraction(d)


def test_profiles_shipped():
    profiles = load_profiles()
    assert set(profiles) == {"bankruptcy", "breast-cancer", "balance-scale", "liver", "heart"}
    assert (profiles["bankruptcy"].p_d1, profiles["bankruptcy"].p_d5000) == (6.94, 6.45)
    assert (profiles["heart"].p_d1, profiles["heart"].p_d5000) == (148.0, 137.6)


@pytest.mark.parametrize("name", ["bankruptcy", "breast-cancer", "balance-scale", "liver", "heart"])
def test_calibration_points_reproduced(name):
    p = get_profile(name)
    assert estimate_power(p, 1) == pytest.approx(p.p_d1, abs=1e-12)
    assert estimate_power(p, 5000) == pytest.approx(p.p_d5000, abs=1e-12)


def test_bankruptcy_switching_share():
    p = get_profile("bankruptcy")
    assert p.switching_power == pytest.approx(BANKRUPTCY_S)
    assert p.switching_power / p.p_d1 == pytest.approx(0.07, abs=0.005)


def test_heart_headline_difference():
    p = get_profile("heart")
    diff = estimate_power(p, 1) - estimate_power(p, 5000)
    assert diff == pytest.approx(10.4)
    assert 10.0 <= diff <= 11.0


def test_infinity_removes_leakage():
    p = get_profile("bankruptcy")
    assert estimate_power(p, INFINITY) == pytest.approx(p.base_power - 0.32 * 6.94)
    assert estimate_power(p, 10**12) == pytest.approx(p.base_power, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(name=st.sampled_from(["bankruptcy", "breast-cancer", "balance-scale", "liver", "heart"]),
       a=st.integers(1, 10**6), b=st.integers(1, 10**6))
def test_power_decreasing_in_d(name, a, b):
    p = get_profile(name)
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert estimate_power(p, lo) > estimate_power(p, hi)
    assert estimate_power(p, hi) > estimate_power(p, INFINITY)


def test_uncalibrated_profiles_rejected(tmp_path):
    with pytest.raises(ValueError):
        estimate_power(None, 1)
    with pytest.raises(ValueError):
        PowerProfile("x", p_d1=None, p_d5000=1.0)
    with pytest.raises(ValueError):
        PowerProfile("x", p_d1=1.0, p_d5000=2.0)
    with pytest.raises(ValueError):
        PowerProfile("x", p_d1=2.0, p_d5000=1.0, leakage_fraction=1.5)
    bad = tmp_path / "cal.json"
    bad.write_text(json.dumps({"profiles": {"x": {"p_d1": 5.0}}}))
    with pytest.raises(ValueError):
        load_profiles(bad)
    with pytest.raises(KeyError):
        get_profile("iris")


def test_power_table_and_format():
    p = get_profile("liver")
    rows = power_table(p, [1, 100, "inf"])
    assert [r["d"] for r in rows] == ["1", "100", "inf"]
    assert rows[0]["power_mw"] == pytest.approx(12.6)
    text = format_power_table(p, rows)
    assert MODEL_LABEL in text and "inf" in text


def test_accounting_arithmetic():
    a = RngAccounting(1, 2, 3)
    b = RngAccounting(10, 20, 30)
    assert (a + b).as_dict() == {"ta_update_coins": 11, "clause_selection_draws": 22, "transition_attempts": 33}
    a += b
    assert a.transition_attempts == 33
    assert RngAccounting().stochastic_fraction == 0.0


def xor_fit(d, epochs=5, **kw):
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 25)
    return ADTMClassifier(n_clauses=10, d=d, epochs=epochs, random_state=0, **kw).fit(X, X[:, 0] ^ X[:, 1])


def test_report_infinite_period_uses_no_coins():
    clf = xor_fit("inf")
    rep = report(clf.accounting_, clf.tm_.config, get_profile("bankruptcy"))
    assert rep["accounting"]["ta_update_coins"] == 0
    assert rep["d"] == "inf" and rep["switching_fraction"] == 0.0
    assert rep["power_label"] == MODEL_LABEL
    assert len(rep["sweep"]) == 7


def test_report_d1_every_attempt_is_random():
    clf = xor_fit(1)
    acc = clf.accounting_
    assert acc.ta_update_coins == acc.transition_attempts > 0
    assert report(acc, clf.tm_.config)["stochastic_transition_fraction"] == 1.0


def test_d2_coins_are_half_attempts_per_automaton():
    clf = xor_fit(2, epochs=20)
    tm = clf.tm_
    assert (tm.coins == tm.attempts // 2).all()
    assert tm.accounting.ta_update_coins <= tm.accounting.transition_attempts


def test_counters_monotone_during_training():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 10)
    clf = ADTMClassifier(n_clauses=10, d=3, epochs=1, random_state=0).fit(X, X[:, 0] ^ X[:, 1])
    prev = clf.accounting_.as_dict()
    for _ in range(5):
        clf.partial_fit(X, X[:, 0] ^ X[:, 1])
        now = clf.accounting_.as_dict()
        assert all(now[k] >= prev[k] for k in now)
        prev = now
