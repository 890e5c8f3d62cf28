import pytest

from eirc_monitor.activity import window_features
from eirc_monitor.ingest_io import (
    FEATURE_COLUMNS,
    RECORD_HEADER,
    ConfigError,
    ParseError,
    load_profile,
    parse_config,
    read_features,
    read_session,
    read_summary,
    read_truth,
    write_features,
    write_records,
    write_summary,
    write_truth,
)
from eirc_monitor.monitor import MonitorRules
from eirc_monitor.pipeline import process_records
from eirc_monitor.sensor_model import ActivityLevel, Channel, EngineConfig, NonMonotonicTimestamp
from eirc_monitor.synth import ActivityProfile, Bout, ProfileError, generate


def write_text(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_three_accel_lines(tmp_path):
    p = write_text(tmp_path, RECORD_HEADER + "\n0,Accel,0,9.8,0\n200,Accel,0,9.8,0\n400,Accel,0,9.8,0\n")
    recs = read_session(p)
    assert [r.t_ms for r in recs] == [0, 200, 400]


def test_tie_break_accel_first(tmp_path):
    p = write_text(tmp_path, RECORD_HEADER + "\n200,Ambient,72,40,\n200,Accel,0,9.8,0\n")
    assert [r.channel for r in read_session(p)] == [Channel.ACCEL, Channel.AMBIENT]


def test_bad_timestamp_reports_line(tmp_path):
    p = write_text(tmp_path, RECORD_HEADER + "\n0,Accel,0,9.8,0\nabc,Accel,0,9.8,0\n")
    with pytest.raises(ParseError) as exc:
        read_session(p)
    assert exc.value.line == 3


@pytest.mark.parametrize(
    "body",
    [
        "0,Accel,0,9.8\n",
        "0,Baro,0,9.8,0\n",
        "0,Accel,x,9.8,0\n",
        "0,Ambient,72,40,1\n",
        "0,Ambient,72,140,\n",
        "0,Accel,nan,0,0\n",
        "\n",
    ],
)
def test_malformed_lines(tmp_path, body):
    with pytest.raises(ParseError) as exc:
        read_session(write_text(tmp_path, RECORD_HEADER + "\n" + body))
    assert exc.value.line == 2


def test_truncated_last_line(tmp_path):
    p = write_text(tmp_path, RECORD_HEADER + "\n0,Accel,0,9.8,0\n200,Accel,0,9.")
    with pytest.raises(ParseError, match="line 3"):
        read_session(p)


def test_missing_header(tmp_path):
    with pytest.raises(ParseError, match="line 1"):
        read_session(write_text(tmp_path, "0,Accel,0,9.8,0\n"))


def test_non_monotonic_with_line(tmp_path):
    p = write_text(tmp_path, RECORD_HEADER + "\n200,Accel,0,9.8,0\n200,Accel,0,9.8,0\n")
    with pytest.raises(NonMonotonicTimestamp) as exc:
        read_session(p)
    assert exc.value.line == 3


def _session():
    profile = ActivityProfile(
        (Bout(20_000, 5.25, tilt_deg=10, noise=0.1), Bout(17_000, 13.5, tilt_deg=50, temp_f=85, noise=0.2)),
        seed=4,
    )
    return generate(profile)


def test_round_trip_identical_features(tmp_path):
    session = _session()
    write_records(session.records, tmp_path / "s.csv")
    back = read_session(tmp_path / "s.csv")
    assert back == session.records
    a, _ = process_records(session.records)
    b, _ = process_records(back)
    assert [r.features for r in a] == [r.features for r in b]


def test_feature_table(tmp_path):
    results, _ = process_records(_session().records)
    n = write_features(results[:2], tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert n == 2 and len(lines) == 3 and lines[0] == ",".join(FEATURE_COLUMNS)
    rows = read_features(tmp_path / "f.csv")
    assert [r["sma"] for r in rows] == [r.features.sma for r in results[:2]]
    assert rows[0]["level"] is results[0].features.level


def test_empty_feature_table(tmp_path):
    assert write_features([], tmp_path / "f.csv") == 0
    assert (tmp_path / "f.csv").read_text() == ",".join(FEATURE_COLUMNS) + "\n"


def test_summary_round_trip(tmp_path):
    _, summary = process_records(_session().records)
    write_summary(summary, tmp_path / "s.json")
    assert read_summary(tmp_path / "s.json") == summary


def test_truth_round_trip(tmp_path):
    truth = _session().truth
    write_truth(truth, tmp_path / "t.csv")
    assert read_truth(tmp_path / "t.csv") == truth


def test_load_profile_errors(tmp_path):
    with pytest.raises(ProfileError, match="nope.json"):
        load_profile(tmp_path / "nope.json")
    with pytest.raises(ProfileError):
        load_profile(write_text(tmp_path, "{not json", "p.json"))
    with pytest.raises(ProfileError):
        load_profile(write_text(tmp_path, "[1, 2]", "p.json"))


def test_bundled_profiles_load():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "profiles"
    for name in ("mixed.example", "sedentary.json", "vigorous_10min.json", "ambient_step.json"):
        assert load_profile(root / name).bouts


def test_parse_config():
    cfg, rules = parse_config(
        "# comment\nwindow_ms = 10000\nsamples_per_window = 50\nposture_thresholds = 15, 50, 110\n"
        "vertical_axis = -z\nadverse_exertion_min_level = Vigorous  # trailing\nvigorous_cum_ms = 300000\n"
    )
    assert cfg == EngineConfig(
        window_ms=10000, samples_per_window=50, posture_thresholds=(15, 50, 110), vertical_axis="-z"
    )
    assert rules == MonitorRules(vigorous_cum_ms=300_000, adverse_exertion_min_level=ActivityLevel.VIGOROUS)


@pytest.mark.parametrize(
    "text", ["bogus = 1\n", "window_ms\n", "window_ms = five\n", "filter_alpha = 2\n", "filter_alpha = nan\n"]
)
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_bundled_config_is_defaults():
    from pathlib import Path

    from eirc_monitor.ingest_io import load_config

    cfg, rules = load_config(Path(__file__).resolve().parents[1] / "profiles" / "default.conf")
    assert (cfg, rules) == (EngineConfig(), MonitorRules())
