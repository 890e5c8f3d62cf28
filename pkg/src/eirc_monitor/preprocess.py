"""Gravity removal and tumbling-window assembly."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .sensor_model import EngineConfig, NonFiniteValue

log = logging.getLogger(__name__)

Vec3 = Tuple[float, float, float]


@dataclass(frozen=True)
class LinearAccelSample:
    t_ms: int
    lx: float
    ly: float
    lz: float

    def as_tuple(self) -> Vec3:
        return (self.lx, self.ly, self.lz)


@dataclass(frozen=True)
class GravityState:
    """Running low-pass estimate of the gravity component, m/s^2."""

    gx: float
    gy: float
    gz: float

    @classmethod
    def from_sample(cls, raw: Sequence[float]) -> "GravityState":
        return cls(float(raw[0]), float(raw[1]), float(raw[2]))


def high_pass(
    raw: Sequence[float], state: GravityState, alpha: float, t_ms: int = 0
) -> Tuple[LinearAccelSample, GravityState]:
    """One step of the gravity low-pass and its complementary high-pass.

    gravity <- alpha * gravity + (1 - alpha) * raw, then linear = raw - gravity.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not all(math.isfinite(v) for v in raw):
        raise NonFiniteValue(f"non-finite acceleration {tuple(raw)!r}")
    beta = 1.0 - alpha
    gx = alpha * state.gx + beta * raw[0]
    gy = alpha * state.gy + beta * raw[1]
    gz = alpha * state.gz + beta * raw[2]
    sample = LinearAccelSample(t_ms, raw[0] - gx, raw[1] - gy, raw[2] - gz)
    return sample, GravityState(gx, gy, gz)


class HighPassFilter:
    """Streaming wrapper around :func:`high_pass`; gravity starts at the first sample."""

    def __init__(self, alpha: float = 0.833):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        self.alpha = alpha
        self.state: Optional[GravityState] = None

    def update(self, t_ms: int, raw: Sequence[float]) -> LinearAccelSample:
        if self.state is None:
            self.state = GravityState.from_sample(raw)
        sample, self.state = high_pass(raw, self.state, self.alpha, t_ms)
        return sample


@dataclass(frozen=True)
class Window:
    """A tumbling batch of linear-acceleration samples.

    ``ambient_snapshot`` is ``(t_ms, temp_f, rh_pct)`` of the latest ambient
    reading at or before ``end_ms``; ``tilt_snapshot`` is ``(t_ms, tilt_deg)``.
    """

    index: int
    start_ms: int
    end_ms: int
    samples: Tuple[LinearAccelSample, ...]
    ambient_snapshot: Optional[Tuple[int, float, float]] = None
    tilt_snapshot: Optional[Tuple[int, float]] = None
    partial: bool = False
    gaps: Tuple[Tuple[int, int], ...] = ()

    @property
    def degraded(self) -> bool:
        return bool(self.gaps)

    @property
    def last_ms(self) -> int:
        return self.samples[-1].t_ms if self.samples else self.start_ms


class WindowAssembler:
    """Collects samples into consecutive, non-overlapping windows.

    A window closes as soon as it holds ``samples_per_window`` samples and
    spans ``window_ms`` from its first sample. Spacing above
    ``gap_factor`` nominal periods marks the window degraded; it is never
    dropped.
    """

    def __init__(self, config: EngineConfig = EngineConfig()):
        self.config = config
        self._buf: List[LinearAccelSample] = []
        self._gaps: List[Tuple[int, int]] = []
        self._prev_t: Optional[int] = None
        self._index = 0

    @property
    def max_gap_ms(self) -> float:
        return self.config.gap_factor * self.config.sample_period_ms

    def push(self, sample: LinearAccelSample) -> Optional[Window]:
        if self._prev_t is not None:
            if sample.t_ms <= self._prev_t:
                raise ValueError(f"sample t_ms={sample.t_ms} not after {self._prev_t}")
            if sample.t_ms - self._prev_t > self.max_gap_ms:
                log.warning(
                    "sensor dropout: %d ms gap before t_ms=%d",
                    sample.t_ms - self._prev_t,
                    sample.t_ms,
                )
                self._gaps.append((self._prev_t, sample.t_ms))
        self._prev_t = sample.t_ms
        self._buf.append(sample)
        if len(self._buf) == self.config.samples_per_window:
            return self._emit(partial=False)
        return None

    def flush(self) -> Optional[Window]:
        """Emit the trailing partial window, if any."""
        if not self._buf:
            return None
        return self._emit(partial=True)

    def _emit(self, partial: bool) -> Window:
        start = self._buf[0].t_ms
        win = Window(
            index=self._index,
            start_ms=start,
            end_ms=start + self.config.window_ms,
            samples=tuple(self._buf),
            partial=partial,
            gaps=tuple(self._gaps),
        )
        self._index += 1
        self._buf = []
        self._gaps = []
        return win


def window_assemble(
    samples: Iterable[LinearAccelSample],
    config: EngineConfig = EngineConfig(),
    flush: bool = True,
) -> Iterator[Window]:
    assembler = WindowAssembler(config)
    for sample in samples:
        win = assembler.push(sample)
        if win is not None:
            yield win
    if flush:
        tail = assembler.flush()
        if tail is not None:
            yield tail
