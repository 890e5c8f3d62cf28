"""Labelled synthetic sessions for exercising the whole pipeline without hardware.

Each bout's linear acceleration is one sinusoid per axis at k/5 Hz with k
coprime to 25, so any 25 consecutive samples at 200 ms land on 25 equally
spaced phases and the window mean of |A sin| sits within 0.2% of 2A/pi.
Amplitudes are divided by the gravity filter's gain at that frequency, so
the linear acceleration recovered by the high-pass stage carries the
target SMA. Gravity for the scripted tilt is added back on top.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .activity import classify_level
from .ambient import AmbientBand, evaluate_ambient
from .posture import classify_posture
from .sensor_model import STANDARD_GRAVITY as GRAVITY
from .sensor_model import ActivityLevel, EngineConfig, PostureClass, SensorRecord

# Horizontal and vertical geomagnetic components, uT (field points down).
MAG_NORTH_UT = 20.0
MAG_DOWN_UT = 45.0

# Vigorous has no upper bound; 27 = 1.5 x its lower bound.
LEVEL_TARGETS = {
    ActivityLevel.SEDENTARY: 0.75,
    ActivityLevel.LOW: 5.25,
    ActivityLevel.MODERATE: 13.5,
    ActivityLevel.VIGOROUS: 27.0,
}

_FREQ_STEPS = (4, 6, 7, 8, 9, 11)


class ProfileError(ValueError):
    pass


class InfeasibleTarget(ProfileError):
    pass


@dataclass(frozen=True)
class Bout:
    duration_ms: int
    target_sma: float
    tilt_deg: float = 0.0
    tilt_end_deg: Optional[float] = None
    temp_f: float = 72.0
    rh_pct: float = 40.0
    noise: float = 0.0

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ProfileError(f"bout duration must be > 0, got {self.duration_ms}")
        if self.target_sma < 0:
            raise ProfileError(f"target SMA must be >= 0, got {self.target_sma}")
        if self.noise < 0:
            raise ProfileError(f"noise amplitude must be >= 0, got {self.noise}")
        if self.target_sma == 0 and self.noise > 0:
            raise InfeasibleTarget("target SMA 0 cannot be met with non-zero noise")
        for tilt in (self.tilt_deg, self.tilt_end_deg):
            if tilt is not None and not 0.0 <= tilt <= 180.0:
                raise ProfileError(f"tilt must be within [0, 180], got {tilt}")
        if not 0.0 <= self.rh_pct <= 100.0:
            raise ProfileError(f"rh_pct must be within [0, 100], got {self.rh_pct}")

    @classmethod
    def for_level(cls, level: ActivityLevel, duration_ms: int, **kw) -> "Bout":
        return cls(duration_ms, LEVEL_TARGETS[ActivityLevel(level)], **kw)

    def tilt_at(self, frac: float) -> float:
        if self.tilt_end_deg is None:
            return self.tilt_deg
        return self.tilt_deg + (self.tilt_end_deg - self.tilt_deg) * frac


@dataclass(frozen=True)
class ActivityProfile:
    bouts: Tuple[Bout, ...]
    seed: int = 0
    ambient_period_ms: int = 5000

    def __post_init__(self):
        if not self.bouts:
            raise ProfileError("profile has no bouts")
        if self.ambient_period_ms <= 0:
            raise ProfileError("ambient_period_ms must be > 0")
        object.__setattr__(self, "bouts", tuple(self.bouts))

    @property
    def duration_ms(self) -> int:
        return sum(b.duration_ms for b in self.bouts)

    @property
    def boundaries(self) -> List[int]:
        """Start time of every bout, including 0."""
        out, t = [], 0
        for b in self.bouts:
            out.append(t)
            t += b.duration_ms
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ActivityProfile":
        try:
            bouts = []
            for i, raw in enumerate(d["bouts"]):
                raw = dict(raw)
                level = raw.pop("level", None)
                if level is not None:
                    if "target_sma" in raw:
                        raise ProfileError(f"bout {i}: give either level or target_sma")
                    raw["target_sma"] = LEVEL_TARGETS[ActivityLevel.from_label(level)]
                bouts.append(Bout(**raw))
            return cls(
                tuple(bouts),
                seed=int(d.get("seed", 0)),
                ambient_period_ms=int(d.get("ambient_period_ms", 5000)),
            )
        except ProfileError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ProfileError(f"invalid profile: {exc}") from exc


@dataclass(frozen=True)
class WindowTruth:
    index: int
    start_ms: int
    end_ms: int
    target_sma: float
    level: ActivityLevel
    tilt_deg: float
    posture: PostureClass
    in_band: bool
    transition: bool


@dataclass
class SyntheticSession:
    records: List[SensorRecord] = field(default_factory=list)
    truth: List[WindowTruth] = field(default_factory=list)


def filter_gain(freq_hz: float, period_s: float, alpha: float) -> float:
    """Magnitude response of the gravity high-pass at ``freq_hz``."""
    z = cmath.exp(-2j * math.pi * freq_hz * period_s)
    return abs(alpha * (1 - z) / (1 - alpha * z))


def _bout_at(starts: Sequence[int], t_ms: int) -> int:
    return bisect.bisect_right(starts, t_ms) - 1


def generate(
    profile: ActivityProfile, config: EngineConfig = EngineConfig(), seed: Optional[int] = None
) -> SyntheticSession:
    rng = np.random.default_rng(profile.seed if seed is None else seed)
    period_ms = config.sample_period_ms
    period_s = period_ms / 1000.0
    starts = profile.boundaries
    total = profile.duration_ms

    # per bout: (amplitude, frequency, phase) for each axis
    waves = []
    for bout in profile.bouts:
        axes = []
        for _ in range(3):
            freq = int(rng.choice(_FREQ_STEPS)) / 5.0
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            amp = (bout.target_sma / 3.0) * (math.pi / 2.0) / filter_gain(
                freq, period_s, config.filter_alpha
            )
            axes.append((amp, freq, phase))
        waves.append(axes)

    times = list(range(0, total, period_ms))
    noise = rng.normal(0.0, 1.0, size=(len(times), 3))

    session = SyntheticSession()
    records = session.records
    for n, t in enumerate(times):
        i = _bout_at(starts, t)
        bout = profile.bouts[i]
        rel_s = (t - starts[i]) / 1000.0
        theta = math.radians(bout.tilt_at((t - starts[i]) / bout.duration_ms))
        up = (0.0, math.cos(theta), math.sin(theta))
        north = (0.0, -math.sin(theta), math.cos(theta))
        accel = []
        for axis in range(3):
            amp, freq, phase = waves[i][axis]
            lin = amp * math.sin(2.0 * math.pi * freq * rel_s + phase)
            accel.append(GRAVITY * up[axis] + lin + bout.noise * float(noise[n, axis]))
        rate = 0.0
        if bout.tilt_end_deg is not None:
            rate = math.radians(bout.tilt_end_deg - bout.tilt_deg) / (bout.duration_ms / 1000.0)
        records.append(SensorRecord.accel(t, *accel))
        records.append(SensorRecord.gyro(t, rate, 0.0, 0.0))
        records.append(
            SensorRecord.mag(
                t, *(MAG_NORTH_UT * north[k] - MAG_DOWN_UT * up[k] for k in range(3))
            )
        )
        if t % profile.ambient_period_ms == 0:
            records.append(SensorRecord.ambient(t, bout.temp_f, bout.rh_pct))

    session.truth = _window_truth(profile, config, times)
    return session


def _window_truth(profile: ActivityProfile, config: EngineConfig, times: List[int]):
    starts = profile.boundaries
    band = AmbientBand.from_config(config)
    n_full = len(times) // config.samples_per_window
    ambient_times = [t for t in times if t % profile.ambient_period_ms == 0]
    out = []
    for k in range(n_full):
        start = times[k * config.samples_per_window]
        end = start + config.window_ms
        last = times[(k + 1) * config.samples_per_window - 1]
        bout_i = _bout_at(starts, last)
        bout = profile.bouts[bout_i]
        tilt = bout.tilt_at((last - starts[bout_i]) / bout.duration_ms)
        amb_t = ambient_times[bisect.bisect_right(ambient_times, last) - 1]
        amb_bout = profile.bouts[_bout_at(starts, amb_t)]
        verdict = evaluate_ambient(amb_bout.temp_f, amb_bout.rh_pct, band, amb_t)
        out.append(
            WindowTruth(
                index=k,
                start_ms=start,
                end_ms=end,
                target_sma=bout.target_sma,
                level=classify_level(bout.target_sma),
                tilt_deg=tilt,
                posture=classify_posture(tilt, config.posture_thresholds),
                in_band=verdict.in_band,
                transition=any(start <= b < end for b in starts),
            )
        )
    return out
