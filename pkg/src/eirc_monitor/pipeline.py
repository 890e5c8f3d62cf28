"""Streaming engine: sensor records in, classified windows and alerts out."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Deque, Iterable, List, Optional, Tuple

from .activity import WindowFeatures, window_features
from .ambient import AmbientBand, AmbientVerdict, evaluate_ambient
from .monitor import Alert, MonitorRules, SessionState, SessionSummary, monitor_step, session_summary
from .posture import PostureEstimate, PostureTracker
from .preprocess import HighPassFilter, Window, WindowAssembler
from .sensor_model import Channel, EngineConfig, SensorRecord, StreamValidator


@dataclass(frozen=True)
class WindowResult:
    """One closed window with the posture and ambient state at its end."""

    features: WindowFeatures
    posture: Optional[PostureEstimate]
    ambient: Optional[Tuple[int, float, float]]
    verdict: Optional[AmbientVerdict]
    ambient_stale: bool
    alerts: Tuple[Alert, ...] = ()


class Engine:
    """Consumes a merged, time-ordered record stream.

    A window is released once the stream has moved past its ``end_ms`` (or
    on :meth:`flush`), so its snapshots reflect the latest ambient and tilt
    observed at or before ``end_ms``.
    """

    def __init__(self, config: EngineConfig = EngineConfig(), rules: MonitorRules = MonitorRules()):
        self.config = config
        self.rules = rules
        self.band = AmbientBand.from_config(config)
        self.validator = StreamValidator()
        self.hpf = HighPassFilter(config.filter_alpha)
        self.assembler = WindowAssembler(config)
        self.posture = PostureTracker(config)
        self.session = SessionState(config=config, rules=rules)
        self._ambient: Optional[Tuple[int, float, float]] = None
        self._verdict: Optional[AmbientVerdict] = None
        self._pending: Deque[Window] = deque()

    def process(self, rec: SensorRecord) -> List[WindowResult]:
        self.validator(rec)
        out = self._release(lambda end: end < rec.t_ms)
        self.session.observe(rec.t_ms)
        if rec.channel is Channel.ACCEL:
            self.posture.update(rec.t_ms, rec.values)
            win = self.assembler.push(self.hpf.update(rec.t_ms, rec.values))
            if win is not None:
                self._pending.append(win)
        elif rec.channel is Channel.GYRO:
            self.posture.set_gyro(rec.values)
        elif rec.channel is Channel.MAG:
            self.posture.set_mag(rec.values)
        else:
            temp_f, rh = rec.values
            self._ambient = (rec.t_ms, temp_f, rh)
            self._verdict = evaluate_ambient(temp_f, rh, self.band, rec.t_ms)
            self.session.episodes.update(self._verdict)
        out.extend(self._release(lambda end: end <= rec.t_ms))
        return out

    def flush(self) -> List[WindowResult]:
        """Release every pending window; a trailing partial window is counted, not classified."""
        out = self._release(lambda end: True)
        tail = self.assembler.flush()
        if tail is not None:
            self.session.partial_window_samples += len(tail.samples)
        return out

    def run(self, records: Iterable[SensorRecord]) -> List[WindowResult]:
        out: List[WindowResult] = []
        for rec in records:
            out.extend(self.process(rec))
        out.extend(self.flush())
        return out

    def summary(self, features_table: Optional[str] = None) -> SessionSummary:
        return session_summary(self.session, features_table)

    def _release(self, due) -> List[WindowResult]:
        out = []
        while self._pending and due(self._pending[0].end_ms):
            out.append(self._finish(self._pending.popleft()))
        return out

    def _finish(self, window: Window) -> WindowResult:
        posture = self.posture.latest
        window = replace(
            window,
            ambient_snapshot=self._ambient,
            tilt_snapshot=(posture.t_ms, posture.tilt_deg) if posture else None,
        )
        features = window_features(window)
        stale = (
            self._ambient is not None
            and window.end_ms - self._ambient[0] > self.config.ambient_stale_ms
        )
        if stale:
            self.session.ambient_stale_windows += 1
        _, alerts = monitor_step(self.session, features, posture, self._verdict, self.rules)
        return WindowResult(features, posture, self._ambient, self._verdict, stale, tuple(alerts))


def process_records(
    records: Iterable[SensorRecord],
    config: EngineConfig = EngineConfig(),
    rules: MonitorRules = MonitorRules(),
) -> Tuple[List[WindowResult], SessionSummary]:
    engine = Engine(config, rules)
    results = engine.run(records)
    return results, engine.summary()
