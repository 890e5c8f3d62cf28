"""Temperature/humidity comfort band and out-of-band episodes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional

from .sensor_model import EngineConfig


class Violation(str, enum.Enum):
    TEMP_LOW = "TempLow"
    TEMP_HIGH = "TempHigh"
    RH_LOW = "RhLow"
    RH_HIGH = "RhHigh"


_VIOLATION_ORDER = {v: i for i, v in enumerate(Violation)}


def sorted_violations(violations: Iterable[Violation]) -> List[Violation]:
    return sorted(violations, key=_VIOLATION_ORDER.__getitem__)


@dataclass(frozen=True)
class AmbientBand:
    temp_low_f: float = 69.0
    temp_high_f: float = 79.0
    rh_low: float = 35.0
    rh_high: float = 50.0

    def __post_init__(self):
        if not self.temp_low_f < self.temp_high_f:
            raise ValueError("temp_low_f must be below temp_high_f")
        if not self.rh_low < self.rh_high:
            raise ValueError("rh_low must be below rh_high")

    @classmethod
    def from_config(cls, config: EngineConfig) -> "AmbientBand":
        return cls(config.temp_low_f, config.temp_high_f, config.rh_low, config.rh_high)


@dataclass(frozen=True)
class AmbientVerdict:
    t_ms: int
    violations: FrozenSet[Violation] = frozenset()

    @property
    def in_band(self) -> bool:
        return not self.violations


def evaluate_ambient(
    temp_f: float, rh_pct: float, band: AmbientBand = AmbientBand(), t_ms: int = 0
) -> AmbientVerdict:
    """Report every bound the reading breaks; readings on a bound are in band."""
    found = set()
    if temp_f < band.temp_low_f:
        found.add(Violation.TEMP_LOW)
    if temp_f > band.temp_high_f:
        found.add(Violation.TEMP_HIGH)
    if rh_pct < band.rh_low:
        found.add(Violation.RH_LOW)
    if rh_pct > band.rh_high:
        found.add(Violation.RH_HIGH)
    return AmbientVerdict(t_ms, frozenset(found))


@dataclass(frozen=True)
class OutOfBandEpisode:
    start_ms: int
    end_ms: int
    violations: FrozenSet[Violation]
    count: int = 1


class EpisodeTracker:
    """Groups consecutive out-of-band verdicts into maximal episodes."""

    def __init__(self):
        self.episodes: List[OutOfBandEpisode] = []
        self._open: Optional[OutOfBandEpisode] = None

    def update(self, verdict: AmbientVerdict) -> None:
        if verdict.in_band:
            self._close()
            return
        if self._open is None:
            self._open = OutOfBandEpisode(verdict.t_ms, verdict.t_ms, verdict.violations)
        else:
            ep = self._open
            self._open = OutOfBandEpisode(
                ep.start_ms, verdict.t_ms, ep.violations | verdict.violations, ep.count + 1
            )

    def _close(self) -> None:
        if self._open is not None:
            self.episodes.append(self._open)
            self._open = None

    @property
    def open_episode(self) -> Optional[OutOfBandEpisode]:
        return self._open

    def all_episodes(self) -> List[OutOfBandEpisode]:
        """Closed episodes plus the one still running, if any."""
        return self.episodes + ([self._open] if self._open is not None else [])


def track_episodes(verdicts: Iterable[AmbientVerdict]) -> List[OutOfBandEpisode]:
    tracker = EpisodeTracker()
    for v in verdicts:
        tracker.update(v)
    return tracker.all_episodes()
