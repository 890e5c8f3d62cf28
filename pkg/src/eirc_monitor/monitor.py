"""Warning rules over the windowed activity, posture and ambient timeline."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .activity import LevelLedger, WindowFeatures, format_duration, ledger_update
from .ambient import AmbientVerdict, EpisodeTracker, sorted_violations
from .posture import PostureEstimate
from .sensor_model import ActivityLevel, EngineConfig, PostureClass

LEAN_CLASSES = frozenset({PostureClass.LEANING, PostureClass.LYING})


@dataclass(frozen=True)
class MonitorRules:
    vigorous_cum_ms: int = 600_000
    adverse_exertion_min_level: ActivityLevel = ActivityLevel.MODERATE
    adverse_ambient_consecutive_windows: int = 2
    post_exertion_lean_window_ms: int = 60_000

    def __post_init__(self):
        for name in (
            "vigorous_cum_ms",
            "adverse_ambient_consecutive_windows",
            "post_exertion_lean_window_ms",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        object.__setattr__(
            self, "adverse_exertion_min_level", ActivityLevel(self.adverse_exertion_min_level)
        )


class AlertKind(str, enum.Enum):
    VIGOROUS_DURATION = "VigorousDuration"
    ADVERSE_AMBIENT_EXERTION = "AdverseAmbientExertion"
    POST_EXERTION_LEAN = "PostExertionLean"


@dataclass(frozen=True)
class Alert:
    kind: AlertKind
    t_ms: int
    window_index: int
    level: ActivityLevel
    context: Tuple[Tuple[str, Any], ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "t_ms": self.t_ms,
            "kind": self.kind.value,
            "window": self.window_index,
            "level": self.level.label,
        }
        out.update((k, list(v) if isinstance(v, tuple) else v) for k, v in self.context)
        return out

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Alert":
        rest = {k: v for k, v in d.items() if k not in ("t_ms", "kind", "window", "level")}
        return cls(
            AlertKind(d["kind"]),
            d["t_ms"],
            d["window"],
            ActivityLevel.from_label(d["level"]),
            tuple((k, tuple(v) if isinstance(v, list) else v) for k, v in rest.items()),
        )


@dataclass
class SessionState:
    """Everything accumulated over a session, updated window by window."""

    config: EngineConfig = field(default_factory=EngineConfig)
    rules: MonitorRules = field(default_factory=MonitorRules)
    ledger: LevelLedger = None
    vigorous_cum_ms: int = 0
    vigorous_armed: bool = True
    oob_streak: int = 0
    adverse_active: bool = False
    last_vigorous_ms: Optional[int] = None
    prev_posture: Optional[PostureClass] = None
    posture_occupancy: Dict[PostureClass, int] = field(
        default_factory=lambda: {p: 0 for p in PostureClass}
    )
    alerts: List[Alert] = field(default_factory=list)
    episodes: EpisodeTracker = field(default_factory=EpisodeTracker)
    degraded_windows: int = 0
    ambient_stale_windows: int = 0
    partial_window_samples: int = 0
    first_t_ms: Optional[int] = None
    last_t_ms: Optional[int] = None

    def __post_init__(self):
        if self.ledger is None:
            self.ledger = LevelLedger(window_ms=self.config.window_ms)

    def observe(self, t_ms: int) -> None:
        if self.first_t_ms is None:
            self.first_t_ms = t_ms
        self.last_t_ms = t_ms

    def reset_vigorous(self) -> None:
        """Zero the cumulative vigorous counter and re-arm its alert."""
        self.vigorous_cum_ms = 0
        self.vigorous_armed = True


def monitor_step(
    session: SessionState,
    window: WindowFeatures,
    posture: Optional[PostureEstimate],
    ambient: Optional[AmbientVerdict],
    rules: Optional[MonitorRules] = None,
) -> Tuple[SessionState, List[Alert]]:
    """Account one full window and evaluate the three warning rules.

    Updates ``session`` in place and returns it with the alerts raised by
    this window. Alerts are edge triggered: a sustained condition yields
    one alert until it clears (or, for the vigorous rule, until
    :meth:`SessionState.reset_vigorous`).
    """
    rules = rules or session.rules
    ledger_update(session.ledger, window, session.config)
    if window.degraded:
        session.degraded_windows += 1
    t = window.last_ms
    new: List[Alert] = []

    if window.level is ActivityLevel.VIGOROUS:
        session.vigorous_cum_ms += session.config.window_ms
        session.last_vigorous_ms = t
        if session.vigorous_armed and session.vigorous_cum_ms >= rules.vigorous_cum_ms:
            session.vigorous_armed = False
            new.append(
                Alert(
                    AlertKind.VIGOROUS_DURATION,
                    t,
                    window.index,
                    window.level,
                    (("vigorous_cum_ms", session.vigorous_cum_ms),),
                )
            )

    if ambient is not None and not ambient.in_band:
        session.oob_streak += 1
    else:
        session.oob_streak = 0
    adverse = (
        window.level >= rules.adverse_exertion_min_level
        and session.oob_streak >= rules.adverse_ambient_consecutive_windows
    )
    if adverse and not session.adverse_active:
        new.append(
            Alert(
                AlertKind.ADVERSE_AMBIENT_EXERTION,
                t,
                window.index,
                window.level,
                (
                    ("violations", tuple(v.value for v in sorted_violations(ambient.violations))),
                    ("oob_windows", session.oob_streak),
                ),
            )
        )
    session.adverse_active = adverse

    if posture is not None:
        current = posture.posture
        session.posture_occupancy[current] += 1
        entered_lean = current in LEAN_CLASSES and session.prev_posture not in LEAN_CLASSES
        if (
            entered_lean
            and session.last_vigorous_ms is not None
            and t - session.last_vigorous_ms <= rules.post_exertion_lean_window_ms
        ):
            new.append(
                Alert(
                    AlertKind.POST_EXERTION_LEAN,
                    t,
                    window.index,
                    window.level,
                    (
                        ("posture", current.label),
                        ("tilt_deg", posture.tilt_deg),
                        ("since_vigorous_ms", t - session.last_vigorous_ms),
                    ),
                )
            )
        session.prev_posture = current

    session.alerts.extend(new)
    return session, new


@dataclass
class SessionSummary:
    """Plain-data view of a session; ``to_dict`` fixes the serialized key order."""

    config: Dict[str, Any]
    windows: int
    current_activity_level: Optional[str]
    levels: Dict[str, Dict[str, Any]]
    hourly: Dict[int, Dict[str, int]]
    posture_occupancy: Dict[str, int]
    ambient_episodes: List[Dict[str, Any]]
    alerts: List[Dict[str, Any]]
    degraded_windows: int = 0
    ambient_stale_windows: int = 0
    partial_window_samples: int = 0
    observed_range_ms: Optional[List[int]] = None
    features_table: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": dict(self.config),
            "windows": self.windows,
            "current_activity_level": self.current_activity_level,
            "levels": {k: dict(v) for k, v in self.levels.items()},
            "hourly": {str(h): dict(v) for h, v in self.hourly.items()},
            "posture_occupancy": dict(self.posture_occupancy),
            "ambient_episodes": [dict(e) for e in self.ambient_episodes],
            "alerts": [dict(a) for a in self.alerts],
            "degraded_windows": self.degraded_windows,
            "ambient_stale_windows": self.ambient_stale_windows,
            "partial_window_samples": self.partial_window_samples,
            "observed_range_ms": self.observed_range_ms,
            "features_table": self.features_table,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SessionSummary":
        kwargs = dict(d)
        kwargs["hourly"] = {int(h): v for h, v in d["hourly"].items()}
        return cls(**kwargs)


def config_echo(config: EngineConfig, rules: MonitorRules) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    for f in dataclasses.fields(rules):
        value = getattr(rules, f.name)
        out[f.name] = value.label if isinstance(value, ActivityLevel) else value
    return out


def session_summary(session: SessionState, features_table: Optional[str] = None) -> SessionSummary:
    ledger = session.ledger
    levels = {
        level.label: {
            "count": ledger.counters[level],
            "duration_ms": ledger.durations_ms[level],
            "duration": format_duration(ledger.durations_ms[level]),
        }
        for level in ActivityLevel
    }
    hourly = {
        hour: {level.label: counts[level] for level in ActivityLevel}
        for hour, counts in sorted(ledger.hourly.items())
    }
    episodes = [
        {
            "start_ms": ep.start_ms,
            "end_ms": ep.end_ms,
            "readings": ep.count,
            "violations": [v.value for v in sorted_violations(ep.violations)],
        }
        for ep in session.episodes.all_episodes()
    ]
    observed = None
    if session.first_t_ms is not None:
        observed = [session.first_t_ms, session.last_t_ms]
    current = ledger.current_activity_level
    return SessionSummary(
        config=config_echo(session.config, session.rules),
        windows=ledger.total_windows,
        current_activity_level=current.label if current is not None else None,
        levels=levels,
        hourly=hourly,
        posture_occupancy={p.label: session.posture_occupancy[p] for p in PostureClass},
        ambient_episodes=episodes,
        alerts=[a.to_dict() for a in session.alerts],
        degraded_windows=session.degraded_windows,
        ambient_stale_windows=session.ambient_stale_windows,
        partial_window_samples=session.partial_window_samples,
        observed_range_ms=observed,
        features_table=features_table,
    )
