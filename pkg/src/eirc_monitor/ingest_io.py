"""On-disk formats.

Session record file (UTF-8, LF, header mandatory)::

    t_ms,channel,v1,v2,v3
    0,Accel,0.12,9.79,0.03
    0,Ambient,72.0,40.0,

Per-window feature table columns, in order::

    index,start_ms,sma,ee_vo2,level,tilt_deg,posture,temp_f,rh_pct,in_band,degraded

``tilt_deg``/``posture`` and ``temp_f``/``rh_pct``/``in_band`` are empty
when no posture or ambient reading was available. Booleans are ``true`` or
``false``. Floats are written with ``repr`` so re-parsing is exact.

The session summary is a JSON document whose key order is fixed by
:meth:`SessionSummary.to_dict`. Configuration files are ``key = value``
lines; ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import dataclasses
import heapq
import json
import math
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from .monitor import MonitorRules, SessionSummary
from .pipeline import WindowResult
from .sensor_model import (
    ActivityLevel,
    Channel,
    EngineConfig,
    NonMonotonicTimestamp,
    PostureClass,
    SensorDataError,
    SensorRecord,
    validate_record,
)
from .synth import ActivityProfile, ProfileError, WindowTruth

PathLike = Union[str, Path]

RECORD_HEADER = "t_ms,channel,v1,v2,v3"
FEATURE_COLUMNS = (
    "index",
    "start_ms",
    "sma",
    "ee_vo2",
    "level",
    "tilt_deg",
    "posture",
    "temp_f",
    "rh_pct",
    "in_band",
    "degraded",
)
TRUTH_COLUMNS = (
    "index",
    "start_ms",
    "end_ms",
    "target_sma",
    "level",
    "tilt_deg",
    "posture",
    "in_band",
    "transition",
)
PLOT_AMBIENT_COLUMNS = ("t_ms", "temp_f", "rh_pct", "in_band")
PLOT_HOURLY_COLUMNS = ("hour", "level", "windows", "duration_ms", "sma_sum")

_CHANNELS = {c.value: c for c in Channel}


class ParseError(SensorDataError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _bool(b: bool) -> str:
    return "true" if b else "false"


def _parse_bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"not a boolean: {text!r}")


def format_record(rec: SensorRecord) -> str:
    vals = [_fmt(v) for v in rec.values]
    if rec.channel is Channel.AMBIENT:
        vals.append("")
    return f"{rec.t_ms},{rec.channel.value},{','.join(vals)}"


def write_records(records: Iterable[SensorRecord], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RECORD_HEADER + "\n")
        for rec in records:
            fh.write(format_record(rec) + "\n")


def parse_record_line(text: str, lineno: int) -> SensorRecord:
    fields = text.split(",")
    if len(fields) != 5:
        raise ParseError(lineno, f"expected 5 fields, got {len(fields)}: {text!r}")
    t_raw, ch_raw, *vals = fields
    try:
        t_ms = int(t_raw)
    except ValueError:
        raise ParseError(lineno, f"bad timestamp {t_raw!r}") from None
    channel = _CHANNELS.get(ch_raw)
    if channel is None:
        raise ParseError(lineno, f"unknown channel {ch_raw!r}")
    if channel is Channel.AMBIENT:
        if vals[2] != "":
            raise ParseError(lineno, "Ambient records leave v3 empty")
        vals = vals[:2]
    try:
        values = tuple(float(v) for v in vals)
    except ValueError:
        raise ParseError(lineno, f"bad numeric value in {text!r}") from None
    rec = SensorRecord(t_ms, channel, values)
    try:
        validate_record(rec)
    except SensorDataError as exc:
        raise ParseError(lineno, str(exc)) from None
    return rec


def read_session(path: PathLike) -> List[SensorRecord]:
    """Read a record file and merge its channels by (t_ms, channel order)."""
    per_channel: Dict[Channel, List[SensorRecord]] = {c: [] for c in Channel}
    last_t: Dict[Channel, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline()
        if header.rstrip("\n") != RECORD_HEADER:
            raise ParseError(1, f"expected header {RECORD_HEADER!r}, got {header.rstrip()!r}")
        for lineno, raw in enumerate(fh, start=2):
            if not raw.endswith("\n"):
                raise ParseError(lineno, "truncated line (no line terminator)")
            text = raw[:-1]
            if not text:
                raise ParseError(lineno, "empty line")
            rec = parse_record_line(text, lineno)
            prev = last_t.get(rec.channel)
            if prev is not None and rec.t_ms <= prev:
                raise NonMonotonicTimestamp(rec.channel, rec.t_ms, prev, line=lineno)
            last_t[rec.channel] = rec.t_ms
            per_channel[rec.channel].append(rec)
    return list(heapq.merge(*per_channel.values(), key=lambda r: r.sort_key))


def feature_row(res: WindowResult) -> List[str]:
    f = res.features
    row = [str(f.index), str(f.start_ms), _fmt(f.sma), _fmt(f.ee_vo2), f.level.label]
    if res.posture is not None:
        row += [_fmt(res.posture.tilt_deg), res.posture.posture.label]
    else:
        row += ["", ""]
    if res.ambient is not None:
        row += [_fmt(res.ambient[1]), _fmt(res.ambient[2]), _bool(res.verdict.in_band)]
    else:
        row += ["", "", ""]
    row.append(_bool(f.degraded))
    return row


def write_features(results: Iterable[WindowResult], path: PathLike) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURE_COLUMNS)
        for res in results:
            w.writerow(feature_row(res))
            n += 1
    return n


def read_features(path: PathLike) -> List[dict]:
    """Parse a feature table back into typed rows (None for empty cells)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != FEATURE_COLUMNS:
            raise ParseError(1, f"unexpected feature header {header}")
        for lineno, cells in enumerate(reader, start=2):
            d = dict(zip(FEATURE_COLUMNS, cells))
            try:
                rows.append(
                    {
                        "index": int(d["index"]),
                        "start_ms": int(d["start_ms"]),
                        "sma": float(d["sma"]),
                        "ee_vo2": float(d["ee_vo2"]),
                        "level": ActivityLevel.from_label(d["level"]),
                        "tilt_deg": float(d["tilt_deg"]) if d["tilt_deg"] else None,
                        "posture": PostureClass.from_label(d["posture"]) if d["posture"] else None,
                        "temp_f": float(d["temp_f"]) if d["temp_f"] else None,
                        "rh_pct": float(d["rh_pct"]) if d["rh_pct"] else None,
                        "in_band": _parse_bool(d["in_band"]) if d["in_band"] else None,
                        "degraded": _parse_bool(d["degraded"]),
                    }
                )
            except (KeyError, ValueError) as exc:
                raise ParseError(lineno, str(exc)) from None
    return rows


def summary_text(summary: SessionSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2, ensure_ascii=False) + "\n"


def write_summary(summary: SessionSummary, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(summary_text(summary))


def read_summary(path: PathLike) -> SessionSummary:
    with open(path, "r", encoding="utf-8") as fh:
        return SessionSummary.from_dict(json.load(fh))


def write_truth(truth: Iterable[WindowTruth], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRUTH_COLUMNS)
        for t in truth:
            w.writerow(
                [
                    t.index,
                    t.start_ms,
                    t.end_ms,
                    _fmt(t.target_sma),
                    t.level.label,
                    _fmt(t.tilt_deg),
                    t.posture.label,
                    _bool(t.in_band),
                    _bool(t.transition),
                ]
            )


def read_truth(path: PathLike) -> List[WindowTruth]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for d in reader:
            out.append(
                WindowTruth(
                    index=int(d["index"]),
                    start_ms=int(d["start_ms"]),
                    end_ms=int(d["end_ms"]),
                    target_sma=float(d["target_sma"]),
                    level=ActivityLevel.from_label(d["level"]),
                    tilt_deg=float(d["tilt_deg"]),
                    posture=PostureClass.from_label(d["posture"]),
                    in_band=_parse_bool(d["in_band"]),
                    transition=_parse_bool(d["transition"]),
                )
            )
    return out


def load_profile(path: PathLike) -> ActivityProfile:
    p = Path(path)
    if not p.is_file():
        raise ProfileError(f"profile not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{p}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ProfileError(f"{p}: top level must be an object")
    return ActivityProfile.from_dict(data)


def _convert(text: str, default):
    if isinstance(default, ActivityLevel):
        return ActivityLevel.from_label(text)
    if isinstance(default, tuple):
        return tuple(float(x) for x in text.split(","))
    if isinstance(default, bool):
        return _parse_bool(text)
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        value = float(text)
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value
    return text


def parse_config(text: str) -> Tuple[EngineConfig, MonitorRules]:
    engine_fields = {f.name: f.default for f in dataclasses.fields(EngineConfig)}
    rule_fields = {f.name: f.default for f in dataclasses.fields(MonitorRules)}
    engine_kw, rule_kw = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in engine_fields:
            target, default = engine_kw, engine_fields[key]
        elif key in rule_fields:
            target, default = rule_kw, rule_fields[key]
        else:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            target[key] = _convert(value, default)
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: {key}: {exc}") from None
    try:
        return EngineConfig(**engine_kw), MonitorRules(**rule_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: PathLike) -> Tuple[EngineConfig, MonitorRules]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text)
