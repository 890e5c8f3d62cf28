import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eirc_monitor.ambient import AmbientVerdict, Violation, evaluate_ambient
from eirc_monitor.monitor import (
    Alert,
    AlertKind,
    MonitorRules,
    SessionState,
    SessionSummary,
    monitor_step,
    session_summary,
)
from eirc_monitor.posture import PostureEstimate
from eirc_monitor.sensor_model import ActivityLevel, PostureClass

from conftest import make_features

IN_BAND = evaluate_ambient(72, 40)
HOT = evaluate_ambient(85, 40)
UPRIGHT = PostureEstimate(0, 5.0, PostureClass.UPRIGHT)
LEANING = PostureEstimate(0, 45.0, PostureClass.LEANING)
LYING = PostureEstimate(0, 80.0, PostureClass.LYING)


def run(levels, ambient=IN_BAND, posture=UPRIGHT, rules=MonitorRules()):
    session = SessionState(rules=rules)
    per_window = []
    for i, lvl in enumerate(levels):
        amb = ambient[i] if isinstance(ambient, list) else ambient
        pos = posture[i] if isinstance(posture, list) else posture
        _, new = monitor_step(session, make_features(i, lvl), pos, amb)
        per_window.append(new)
    return session, per_window


def test_120_vigorous_windows_one_alert():
    session, per = run([ActivityLevel.VIGOROUS] * 120)
    assert len(session.alerts) == 1
    alert = session.alerts[0]
    assert alert.kind is AlertKind.VIGOROUS_DURATION
    assert alert.window_index == 119  # the 120th window
    assert per[119] == [alert]
    assert alert.t_ms == 119 * 5000 + 4800


def test_119_vigorous_windows_no_alert():
    session, _ = run([ActivityLevel.VIGOROUS] * 119)
    assert session.alerts == []


def test_vigorous_is_cumulative_and_rearmable():
    levels = ([ActivityLevel.VIGOROUS] * 60 + [ActivityLevel.LOW] * 5) * 2
    session, _ = run(levels)
    assert [a.window_index for a in session.alerts] == [124]
    session.reset_vigorous()
    for i in range(130, 250):
        monitor_step(session, make_features(i, ActivityLevel.VIGOROUS), UPRIGHT, IN_BAND)
    assert [a.kind for a in session.alerts] == [AlertKind.VIGOROUS_DURATION] * 2


def test_adverse_ambient_at_second_window():
    session, per = run([ActivityLevel.MODERATE] * 2, ambient=HOT)
    assert per[0] == []
    (alert,) = per[1]
    assert alert.kind is AlertKind.ADVERSE_AMBIENT_EXERTION
    assert dict(alert.context)["violations"] == ("TempHigh",)


def test_adverse_edge_triggered_and_rearms():
    levels = [ActivityLevel.MODERATE] * 6
    amb = [HOT, HOT, HOT, IN_BAND, HOT, HOT]
    session, per = run(levels, ambient=amb)
    assert [i for i, new in enumerate(per) if new] == [1, 5]


def test_adverse_needs_exertion():
    session, _ = run([ActivityLevel.LOW] * 5, ambient=HOT)
    assert session.alerts == []
    # out-of-band streak counts even while the level is low
    session, per = run([ActivityLevel.LOW, ActivityLevel.VIGOROUS], ambient=HOT)
    assert [a.kind for a in per[1]] == [AlertKind.ADVERSE_AMBIENT_EXERTION]


def test_no_ambient_breaks_streak():
    session, _ = run([ActivityLevel.MODERATE] * 3, ambient=[HOT, None, HOT])
    assert session.alerts == []


def test_benign_session():
    session, _ = run([ActivityLevel.SEDENTARY] * 200)
    assert session.alerts == []


def test_post_exertion_lean():
    levels = [ActivityLevel.VIGOROUS] * 3 + [ActivityLevel.LOW] * 4
    posture = [UPRIGHT] * 5 + [LEANING, LYING]
    session, per = run(levels, posture=posture)
    (alert,) = session.alerts
    assert alert.kind is AlertKind.POST_EXERTION_LEAN and alert.window_index == 5
    assert dict(alert.context)["since_vigorous_ms"] == 15_000


def test_lean_after_window_expires():
    levels = [ActivityLevel.VIGOROUS] + [ActivityLevel.SEDENTARY] * 14
    posture = [UPRIGHT] * 14 + [LEANING]
    session, _ = run(levels, posture=posture)
    assert session.alerts == []  # 70 s after the vigorous window


def test_lean_without_exertion():
    session, _ = run([ActivityLevel.SEDENTARY] * 3, posture=[UPRIGHT, LEANING, UPRIGHT])
    assert session.alerts == []


def test_alert_dict_round_trip():
    session, _ = run([ActivityLevel.MODERATE] * 2, ambient=evaluate_ambient(60, 90))
    alert = session.alerts[0]
    d = json.loads(json.dumps(alert.to_dict()))
    assert Alert.from_dict(d) == alert


def test_empty_summary():
    s = session_summary(SessionState())
    assert s.windows == 0 and s.alerts == [] and s.ambient_episodes == []
    assert all(v["count"] == 0 and v["duration"] == "00:00:00" for v in s.levels.values())
    assert s.observed_range_ms is None


def test_summary_25_sedentary():
    session, _ = run([ActivityLevel.SEDENTARY] * 25)
    s = session_summary(session)
    assert s.levels["Sedentary"]["duration"] == "00:02:05"
    assert {k: v["duration"] for k, v in s.levels.items() if k != "Sedentary"} == {
        "Low": "00:00:00",
        "Moderate": "00:00:00",
        "Vigorous": "00:00:00",
    }


def test_summary_two_hours():
    session, _ = run([ActivityLevel.LOW] * 1440)
    s = session_summary(session)
    assert list(s.hourly) == [0, 1]
    assert SessionSummary.from_dict(json.loads(json.dumps(s.to_dict()))) == s


def test_rules_validation():
    with pytest.raises(ValueError):
        MonitorRules(vigorous_cum_ms=0)


levels_st = st.lists(st.sampled_from(list(ActivityLevel)), min_size=1, max_size=300)


@settings(max_examples=100, deadline=None)
@given(levels=levels_st, oob=st.lists(st.booleans(), min_size=300, max_size=300))
def test_alerts_deterministic(levels, oob):
    amb = [HOT if o else IN_BAND for o in oob]
    a, _ = run(levels, ambient=amb)
    b, _ = run(levels, ambient=amb)
    assert a.alerts == b.alerts


@settings(max_examples=100, deadline=None)
@given(levels=levels_st, lo=st.integers(1, 150), extra=st.integers(0, 150))
def test_relaxing_vigorous_threshold_never_adds_alerts(levels, lo, extra):
    def count(ms):
        session, _ = run(levels, rules=MonitorRules(vigorous_cum_ms=ms))
        return sum(a.kind is AlertKind.VIGOROUS_DURATION for a in session.alerts)

    assert count((lo + extra) * 5000) <= count(lo * 5000)


@settings(max_examples=100, deadline=None)
@given(levels=levels_st, oob=st.lists(st.booleans(), min_size=300, max_size=300), k=st.integers(1, 5))
def test_relaxing_streak_never_adds_alerts(levels, oob, k):
    amb = [HOT if o else IN_BAND for o in oob]

    def count(n):
        session, _ = run(levels, ambient=amb, rules=MonitorRules(adverse_ambient_consecutive_windows=n))
        return sum(a.kind is AlertKind.ADVERSE_AMBIENT_EXERTION for a in session.alerts)

    assert count(k + 1) <= count(k)
