"""Signal magnitude area, oxygen-uptake extrapolation and level accounting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .preprocess import Window
from .sensor_model import ActivityLevel, EngineConfig, SensorDataError

# Level upper bounds in m/s^2; intervals are (lower, upper], with 0 in Sedentary.
LEVEL_BOUNDS = (1.5, 9.0, 18.0)

EE_SLOPE = 1.1
EE_INTERCEPT = 5.7

MS_PER_HOUR = 3_600_000


class PartialWindow(SensorDataError):
    pass


class NegativeSma(SensorDataError):
    pass


def compute_sma(window: Window) -> float:
    """Mean over the window of |lx| + |ly| + |lz| (m/s^2)."""
    if window.partial:
        raise PartialWindow(
            f"window {window.index} holds {len(window.samples)} samples; SMA needs a full window"
        )
    total = 0.0
    for s in window.samples:
        total += abs(s.lx) + abs(s.ly) + abs(s.lz)
    return total / len(window.samples)


def extrapolate_ee(sma: float) -> float:
    """Oxygen uptake extrapolated linearly from SMA (VO2 = 1.1 * SMA + 5.7)."""
    if sma < 0:
        raise NegativeSma(f"SMA must be >= 0, got {sma}")
    return EE_SLOPE * sma + EE_INTERCEPT


def classify_level(sma: float, bounds=LEVEL_BOUNDS) -> ActivityLevel:
    # sma == 0 is Sedentary: a motionless device is at rest.
    if sma <= bounds[0]:
        return ActivityLevel.SEDENTARY
    if sma <= bounds[1]:
        return ActivityLevel.LOW
    if sma <= bounds[2]:
        return ActivityLevel.MODERATE
    return ActivityLevel.VIGOROUS


def format_duration(ms: int) -> str:
    """Render milliseconds as zero-padded HH:MM:SS, dropping the sub-second part."""
    if ms < 0:
        raise ValueError(f"duration must be >= 0, got {ms}")
    total_s = int(ms) // 1000
    hours, rem = divmod(total_s, 3600)
    minutes, seconds = divmod(rem, 60)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}"


@dataclass(frozen=True)
class WindowFeatures:
    index: int
    start_ms: int
    end_ms: int
    last_ms: int
    sma: float
    ee_vo2: float
    level: ActivityLevel
    degraded: bool = False


def window_features(window: Window) -> WindowFeatures:
    sma = compute_sma(window)
    return WindowFeatures(
        index=window.index,
        start_ms=window.start_ms,
        end_ms=window.end_ms,
        last_ms=window.last_ms,
        sma=sma,
        ee_vo2=extrapolate_ee(sma),
        level=classify_level(sma),
        degraded=window.degraded,
    )


def _zero_levels() -> Dict[ActivityLevel, int]:
    return {level: 0 for level in ActivityLevel}


@dataclass
class LevelLedger:
    """Per-level window counters and durations, plus hour-of-session aggregates."""

    window_ms: int = 5000
    counters: Dict[ActivityLevel, int] = field(default_factory=_zero_levels)
    durations_ms: Dict[ActivityLevel, int] = field(default_factory=_zero_levels)
    current_activity_level: Optional[ActivityLevel] = None
    hourly: Dict[int, Dict[ActivityLevel, int]] = field(default_factory=dict)

    @property
    def total_windows(self) -> int:
        return sum(self.counters.values())

    def formatted(self) -> Dict[ActivityLevel, str]:
        return {level: format_duration(ms) for level, ms in self.durations_ms.items()}


def ledger_update(
    ledger: LevelLedger, features: WindowFeatures, config: Optional[EngineConfig] = None
) -> LevelLedger:
    """Count one full window; mutates and returns ``ledger``."""
    window_ms = config.window_ms if config is not None else ledger.window_ms
    level = features.level
    ledger.counters[level] += 1
    ledger.durations_ms[level] = ledger.counters[level] * window_ms
    ledger.current_activity_level = level
    hour = features.start_ms // MS_PER_HOUR
    bucket = ledger.hourly.setdefault(hour, _zero_levels())
    bucket[level] += 1
    return ledger


# (SMA m/s^2, VO2, label) as published.
GOLDEN_ROWS = (
    (0.986008, 6.784609, "Sedentary"),
    (1.94435, 7.838785, "Sedentary"),
    (0.879925, 6.667917, "Sedentary"),
    (15.5243, 22.77673, "Moderate"),
    (40.58631, 50.34494, "Vigorous"),
    (26.91364, 35.305, "Vigorous"),
    (21.22344, 29.04579, "Vigorous"),
    (2.663409, 8.62975, "Low"),
    (0.935883, 6.729471, "Sedentary"),
    (2.273131, 8.200444, "Low"),
    (3.30391, 9.3343, "Low"),
    (2.463069, 8.409376, "Low"),
    (2.772076, 8.749284, "Low"),
    (1.191858, 7.011044, "Sedentary"),
    (0.69416, 6.463576, "Sedentary"),
    (0.795958, 6.575553, "Sedentary"),
    (2.134268, 8.047695, "Low"),
    (2.250499, 8.175549, "Low"),
    (1.116092, 6.927701, "Sedentary"),
    (2.974935, 8.972429, "Low"),
    (2.019332, 7.921265, "Low"),
    (0.973806, 6.771186, "Sedentary"),
    (1.028279, 6.831107, "Sedentary"),
    (0.338428, 6.072271, "Sedentary"),
    (0.39571, 6.135281, "Sedentary"),
    (0.464635, 6.211099, "Sedentary"),
    (1.649994, 7.514993, "Low"),
    (2.114025, 8.025427, "Low"),
)

# Row 2 is labelled Sedentary although 1.94435 lies in the Low range.
KNOWN_LABEL_DIVERGENCES = frozenset({1})
