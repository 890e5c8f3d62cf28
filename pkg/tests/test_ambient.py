import pytest
from hypothesis import given
from hypothesis import strategies as st

from eirc_monitor.ambient import (
    AmbientBand,
    AmbientVerdict,
    EpisodeTracker,
    Violation,
    evaluate_ambient,
    sorted_violations,
    track_episodes,
)
from eirc_monitor.sensor_model import EngineConfig


def test_canonical_in_band():
    assert evaluate_ambient(72, 40).in_band


@pytest.mark.parametrize("t,rh", [(69, 35), (79, 50), (69, 50), (79, 35)])
def test_bounds_inclusive(t, rh):
    assert evaluate_ambient(t, rh).in_band


@pytest.mark.parametrize(
    "t,rh,expect",
    [
        (68.99, 40, {Violation.TEMP_LOW}),
        (79.01, 40, {Violation.TEMP_HIGH}),
        (72, 34.99, {Violation.RH_LOW}),
        (72, 50.01, {Violation.RH_HIGH}),
        (85, 20, {Violation.TEMP_HIGH, Violation.RH_LOW}),
    ],
)
def test_violations(t, rh, expect):
    assert set(evaluate_ambient(t, rh).violations) == expect


def test_violation_order_is_stable():
    v = evaluate_ambient(60, 90).violations
    assert [x.value for x in sorted_violations(v)] == ["TempLow", "RhHigh"]


def test_band_from_config():
    band = AmbientBand.from_config(EngineConfig(temp_low_f=60, temp_high_f=65))
    assert evaluate_ambient(62, 40, band).in_band
    with pytest.raises(ValueError):
        AmbientBand(80, 70, 35, 50)


def _verdicts(flags):
    return [
        AmbientVerdict(i * 1000, frozenset() if ok else frozenset({Violation.TEMP_HIGH}))
        for i, ok in enumerate(flags)
    ]


def test_episode_examples():
    assert track_episodes(_verdicts([True, True])) == []
    (ep,) = track_episodes(_verdicts([True, False, False, True]))
    assert (ep.start_ms, ep.end_ms, ep.count) == (1000, 2000, 2)
    assert len(track_episodes(_verdicts([False, True, False]))) == 2


def test_open_episode_reported():
    tr = EpisodeTracker()
    for v in _verdicts([True, False]):
        tr.update(v)
    assert tr.open_episode is not None
    assert tr.episodes == []
    assert len(tr.all_episodes()) == 1
