"""Domain types, units and the ordered-stream contract.

Units used throughout the package:

* timestamps: integer milliseconds since session start
* acceleration: m/s^2, device axes z = forward, y = vertical, x = horizontal
* angular rate: rad/s
* magnetic field: uT
* ambient: temperature in degF, relative humidity in percent
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple


STANDARD_GRAVITY = 9.80665  # m/s^2


class SensorDataError(ValueError):
    """Base class for all input-validation failures."""


class NonMonotonicTimestamp(SensorDataError):
    def __init__(self, channel, t_ms, prev_t, line=None):
        self.channel = channel
        self.t_ms = t_ms
        self.prev_t = prev_t
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(
            f"{channel.value}: t_ms={t_ms} not after previous t_ms={prev_t}{where}"
        )


class OutOfRangeValue(SensorDataError):
    pass


class NonFiniteValue(SensorDataError):
    pass


class Channel(str, enum.Enum):
    ACCEL = "Accel"
    GYRO = "Gyro"
    MAG = "Mag"
    AMBIENT = "Ambient"

    @property
    def order(self) -> int:
        return _CHANNEL_ORDER[self]


_CHANNEL_ORDER = {Channel.ACCEL: 0, Channel.GYRO: 1, Channel.MAG: 2, Channel.AMBIENT: 3}


class ActivityLevel(enum.IntEnum):
    SEDENTARY = 0
    LOW = 1
    MODERATE = 2
    VIGOROUS = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, text: str) -> "ActivityLevel":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown activity level {text!r}") from None


class PostureClass(enum.IntEnum):
    UPRIGHT = 0
    LEANING = 1
    LYING = 2
    INVERTED = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, text: str) -> "PostureClass":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown posture class {text!r}") from None


@dataclass(frozen=True)
class SensorRecord:
    """One timestamped reading from one channel.

    ``values`` is ``(x, y, z)`` for the IMU channels and ``(temp_f, rh_pct)``
    for Ambient.
    """

    t_ms: int
    channel: Channel
    values: Tuple[float, ...]

    @classmethod
    def accel(cls, t_ms, ax, ay, az):
        return cls(t_ms, Channel.ACCEL, (float(ax), float(ay), float(az)))

    @classmethod
    def gyro(cls, t_ms, gx, gy, gz):
        return cls(t_ms, Channel.GYRO, (float(gx), float(gy), float(gz)))

    @classmethod
    def mag(cls, t_ms, mx, my, mz):
        return cls(t_ms, Channel.MAG, (float(mx), float(my), float(mz)))

    @classmethod
    def ambient(cls, t_ms, temp_f, rh_pct):
        return cls(t_ms, Channel.AMBIENT, (float(temp_f), float(rh_pct)))

    @property
    def sort_key(self):
        return (self.t_ms, self.channel.order)


def validate_record(rec: SensorRecord, prev_t: Optional[int] = None) -> SensorRecord:
    """Return ``rec`` unchanged if it is well formed and strictly after ``prev_t``.

    ``prev_t`` is the timestamp of the previous accepted record on the same
    channel, or None for the first one.
    """
    if not isinstance(rec.t_ms, int) or isinstance(rec.t_ms, bool):
        raise SensorDataError(f"t_ms must be an integer, got {rec.t_ms!r}")
    if rec.t_ms < 0:
        raise OutOfRangeValue(f"t_ms must be >= 0, got {rec.t_ms}")
    expected = 2 if rec.channel is Channel.AMBIENT else 3
    if len(rec.values) != expected:
        raise SensorDataError(
            f"{rec.channel.value} record needs {expected} values, got {len(rec.values)}"
        )
    for v in rec.values:
        if not math.isfinite(v):
            raise NonFiniteValue(f"{rec.channel.value} value {v!r} at t_ms={rec.t_ms}")
    if rec.channel is Channel.AMBIENT:
        rh = rec.values[1]
        if not 0.0 <= rh <= 100.0:
            raise OutOfRangeValue(f"rh_pct={rh} outside [0, 100] at t_ms={rec.t_ms}")
    if prev_t is not None and rec.t_ms <= prev_t:
        raise NonMonotonicTimestamp(rec.channel, rec.t_ms, prev_t)
    return rec


class StreamValidator:
    """Tracks the last accepted timestamp per channel."""

    def __init__(self):
        self.last_t = {}

    def __call__(self, rec: SensorRecord) -> SensorRecord:
        validate_record(rec, self.last_t.get(rec.channel))
        self.last_t[rec.channel] = rec.t_ms
        return rec


VERTICAL_AXES = ("x", "y", "z", "-x", "-y", "-z")


@dataclass(frozen=True)
class EngineConfig:
    window_ms: int = 5000
    samples_per_window: int = 25
    filter_alpha: float = 0.833
    fusion_weight: float = 0.98
    vertical_axis: str = "y"
    posture_thresholds: Tuple[float, float, float] = (20.0, 60.0, 120.0)
    temp_low_f: float = 69.0
    temp_high_f: float = 79.0
    rh_low: float = 35.0
    rh_high: float = 50.0
    gap_factor: float = 3.0
    ambient_stale_ms: int = 300_000

    def __post_init__(self):
        if self.window_ms <= 0 or self.samples_per_window <= 0:
            raise ValueError("window_ms and samples_per_window must be positive")
        if self.window_ms % self.samples_per_window:
            raise ValueError(
                f"window_ms={self.window_ms} is not an integral multiple of "
                f"samples_per_window={self.samples_per_window}"
            )
        if not 0.0 < self.filter_alpha < 1.0:
            raise ValueError(f"filter_alpha must be in (0, 1), got {self.filter_alpha}")
        if not 0.0 <= self.fusion_weight <= 1.0:
            raise ValueError(f"fusion_weight must be in [0, 1], got {self.fusion_weight}")
        if self.vertical_axis not in VERTICAL_AXES:
            raise ValueError(f"vertical_axis must be one of {VERTICAL_AXES}")
        th = tuple(float(t) for t in self.posture_thresholds)
        bounds = (0.0,) + th + (180.0,)
        if len(th) != 3 or not all(a < b for a, b in zip(bounds, bounds[1:])):
            raise ValueError(
                f"posture_thresholds must be 3 strictly increasing values in (0, 180), got {th}"
            )
        object.__setattr__(self, "posture_thresholds", th)
        if not (self.temp_low_f < self.temp_high_f and self.rh_low < self.rh_high):
            raise ValueError("ambient band bounds must satisfy low < high")
        if self.gap_factor <= 1.0:
            raise ValueError("gap_factor must exceed 1")

    @property
    def sample_period_ms(self) -> int:
        return self.window_ms // self.samples_per_window
