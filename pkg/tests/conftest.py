import pytest

from eirc_monitor.activity import WindowFeatures, classify_level, extrapolate_ee
from eirc_monitor.sensor_model import ActivityLevel

_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.append((marker.args[0], report.outcome, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    grouped = {}
    for label, outcome, name in _CRITERIA:
        grouped.setdefault(label, []).append((outcome, name))
    terminalreporter.section("acceptance criteria")
    for label, runs in grouped.items():
        failed = [name for outcome, name in runs if outcome != "passed"]
        status = "FAIL" if failed else "PASS"
        detail = f"{len(runs) - len(failed)}/{len(runs)} tests"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(f"[{status}] {label} ({detail})")


# SMA values chosen well inside each level's range
LEVEL_SMA = {
    ActivityLevel.SEDENTARY: 0.5,
    ActivityLevel.LOW: 4.0,
    ActivityLevel.MODERATE: 12.0,
    ActivityLevel.VIGOROUS: 25.0,
}


def make_features(index, level=None, sma=None, window_ms=5000, degraded=False):
    if sma is None:
        sma = LEVEL_SMA[level]
    start = index * window_ms
    return WindowFeatures(
        index=index,
        start_ms=start,
        end_ms=start + window_ms,
        last_ms=start + window_ms - window_ms // 25,
        sma=sma,
        ee_vo2=extrapolate_ee(sma),
        level=classify_level(sma),
        degraded=degraded,
    )


def dominant_tone(x):
    """(cycles per block, amplitude) of the strongest DFT bin of a real block."""
    import numpy as np

    bins = np.fft.rfft(np.asarray(x, dtype=float))
    k = int(np.argmax(np.abs(bins[1:]))) + 1
    return k, 2.0 * abs(bins[k]) / len(x)
