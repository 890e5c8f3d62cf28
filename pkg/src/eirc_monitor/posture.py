"""Orientation fusion, trunk tilt and posture classes.

The fusion is a complementary filter on the gravity direction expressed in
the device frame. Each step rotates the previous estimate by the gyro
increment (d g / dt = omega x g), blends it toward the accelerometer
vector scaled by standard gravity, and renormalizes. Scaling by the
nominal 1 g rather than the instantaneous norm keeps the blend an
unbiased average of the raw vector while the trunk is accelerating; for
a resting device the two coincide. Heading is computed from the
magnetometer after tilt compensation and is informational only.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

from .sensor_model import STANDARD_GRAVITY, EngineConfig, PostureClass, SensorDataError

Vec3 = Tuple[float, float, float]

DEFAULT_THRESHOLDS = (20.0, 60.0, 120.0)
UNIT_TOL = 1e-6


class ZeroAccelVector(SensorDataError):
    pass


class NonUnitVector(SensorDataError):
    pass


def _norm(v: Sequence[float]) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def _scale(v: Sequence[float], k: float) -> Vec3:
    return (v[0] * k, v[1] * k, v[2] * k)


def _cross(a: Sequence[float], b: Sequence[float]) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _unit(v: Sequence[float]) -> Vec3:
    n = _norm(v)
    return (v[0] / n, v[1] / n, v[2] / n)


def rotate(v: Sequence[float], omega: Sequence[float], dt_s: float) -> Vec3:
    """Rotate ``v`` by the angle |omega|*dt about omega (Rodrigues)."""
    rate = _norm(omega)
    angle = rate * dt_s
    if angle == 0.0:
        return (v[0], v[1], v[2])
    k = _scale(omega, 1.0 / rate)
    c, s = math.cos(angle), math.sin(angle)
    kxv = _cross(k, v)
    kv = _dot(k, v) * (1.0 - c)
    return (
        v[0] * c + kxv[0] * s + k[0] * kv,
        v[1] * c + kxv[1] * s + k[1] * kv,
        v[2] * c + kxv[2] * s + k[2] * kv,
    )


@dataclass(frozen=True)
class OrientationState:
    gravity: Vec3
    heading_deg: Optional[float] = None
    t_ms: int = 0
    weight: float = 0.98

    @classmethod
    def from_accel(cls, accel, t_ms=0, weight=0.98, mag=None) -> "OrientationState":
        if _norm(accel) == 0.0:
            raise ZeroAccelVector("cannot initialise orientation from a zero accel vector")
        g = _unit(accel)
        return cls(g, heading_from_mag(g, mag) if mag is not None else None, t_ms, weight)


def heading_from_mag(gravity: Sequence[float], mag: Sequence[float]) -> Optional[float]:
    """Heading of the device z (forward) axis in degrees [0, 360), or None if degenerate."""
    east = _cross(mag, gravity)
    n_east = _norm(east)
    if n_east < 1e-9:
        return None
    east = _scale(east, 1.0 / n_east)
    north = _cross(gravity, east)
    return math.degrees(math.atan2(east[2], north[2])) % 360.0


def fuse_step(
    state: OrientationState,
    accel: Sequence[float],
    gyro: Sequence[float],
    mag: Optional[Sequence[float]],
    dt_s: float,
    t_ms: Optional[int] = None,
) -> OrientationState:
    if dt_s <= 0:
        raise ValueError(f"dt_s must be > 0, got {dt_s}")
    n_acc = _norm(accel)
    if n_acc == 0.0:
        raise ZeroAccelVector("accelerometer vector is zero; orientation not updated")
    w = state.weight
    predicted = rotate(state.gravity, gyro, dt_s)
    measured = _scale(accel, 1.0 / STANDARD_GRAVITY)
    blended = tuple(w * p + (1.0 - w) * m for p, m in zip(predicted, measured))
    n_blend = _norm(blended)
    # predicted and measured cancel exactly: fall back to the measurement
    gravity = _scale(blended, 1.0 / n_blend) if n_blend > 0 else _scale(accel, 1.0 / n_acc)
    heading = state.heading_deg
    if mag is not None:
        h = heading_from_mag(gravity, mag)
        if h is not None:
            heading = h
    return OrientationState(
        gravity, heading, state.t_ms if t_ms is None else t_ms, state.weight
    )


def _axis(vertical_axis: str) -> Tuple[int, float]:
    sign = -1.0 if vertical_axis.startswith("-") else 1.0
    return "xyz".index(vertical_axis[-1]), sign


def tilt_from_gravity(gravity_unit: Sequence[float], vertical_axis: str = "y") -> float:
    """Angle in degrees between the gravity direction and the trunk-vertical axis."""
    n = _norm(gravity_unit)
    if abs(n - 1.0) > UNIT_TOL:
        raise NonUnitVector(f"gravity direction has norm {n}, expected 1")
    idx, sign = _axis(vertical_axis)
    c = max(-1.0, min(1.0, sign * gravity_unit[idx]))
    return math.degrees(math.acos(c))


def classify_posture(tilt_deg: float, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> PostureClass:
    """Upright [0, t0), Leaning [t0, t1), Lying [t1, t2), Inverted [t2, 180]."""
    if not 0.0 <= tilt_deg <= 180.0:
        raise ValueError(f"tilt must be within [0, 180], got {tilt_deg}")
    return PostureClass(bisect.bisect_right(list(thresholds), tilt_deg))


@dataclass(frozen=True)
class PostureEstimate:
    t_ms: int
    tilt_deg: float
    posture: PostureClass


class PostureTracker:
    """Streaming fusion driven by accelerometer samples.

    Gyro and magnetometer readings are held until superseded; each accel
    sample triggers one fusion step using the latest of each. During
    warm-up the gyro weight is capped at 1 - 1/(n+1) for the n-th step, so
    the estimate starts as a running mean of the accel vectors instead of
    trusting the first sample for ~1/(1-w) steps.
    """

    def __init__(self, config: EngineConfig = EngineConfig()):
        self.config = config
        self.state: Optional[OrientationState] = None
        self.gyro: Vec3 = (0.0, 0.0, 0.0)
        self.mag: Optional[Vec3] = None
        self.zero_accel_events = 0
        self.steps = 0
        self.latest: Optional[PostureEstimate] = None

    def set_gyro(self, gyro: Sequence[float]) -> None:
        self.gyro = tuple(gyro)

    def set_mag(self, mag: Sequence[float]) -> None:
        self.mag = tuple(mag)

    def update(self, t_ms: int, accel: Sequence[float]) -> Optional[PostureEstimate]:
        try:
            if self.state is None:
                self.state = OrientationState.from_accel(
                    accel, t_ms, self.config.fusion_weight, self.mag
                )
            else:
                dt_s = (t_ms - self.state.t_ms) / 1000.0
                w = min(self.config.fusion_weight, 1.0 - 1.0 / (self.steps + 1))
                self.state = fuse_step(
                    replace(self.state, weight=w), accel, self.gyro, self.mag, dt_s, t_ms
                )
            self.steps += 1
        except ZeroAccelVector:
            self.zero_accel_events += 1
            return self.latest
        tilt = tilt_from_gravity(self.state.gravity, self.config.vertical_axis)
        self.latest = PostureEstimate(
            t_ms, tilt, classify_posture(tilt, self.config.posture_thresholds)
        )
        return self.latest
