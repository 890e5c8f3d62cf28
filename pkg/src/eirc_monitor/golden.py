"""Self-check against the published SMA / VO2 / level sample table."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Tuple

from .activity import KNOWN_LABEL_DIVERGENCES, GOLDEN_ROWS, classify_level, extrapolate_ee
from .sensor_model import ActivityLevel

EE_TOL = 1e-4


@dataclass
class GoldenReport:
    ee_diffs: List[Tuple[int, float, float, float]] = field(default_factory=list)
    label_diffs: List[Tuple[int, float, str, str]] = field(default_factory=list)
    rows: int = len(GOLDEN_ROWS)

    @property
    def ee_matches(self) -> int:
        return self.rows - len(self.ee_diffs)

    @property
    def label_matches(self) -> int:
        return self.rows - len(self.label_diffs)

    @property
    def passed(self) -> bool:
        """True iff every EE value matches and labels diverge exactly on the known row."""
        return not self.ee_diffs and {d[0] for d in self.label_diffs} == KNOWN_LABEL_DIVERGENCES

    def lines(self) -> List[str]:
        out = [
            f"EE values: {self.ee_matches}/{self.rows} within {EE_TOL:g}",
            f"level labels: {self.label_matches}/{self.rows} agree",
        ]
        for row, sma, published, got in self.label_diffs:
            tag = "expected divergence" if row in KNOWN_LABEL_DIVERGENCES else "UNEXPECTED"
            out.append(f"  row {row + 1}: sma {sma} published {published} engine {got} ({tag})")
        for row, sma, published, got in self.ee_diffs:
            out.append(f"  row {row + 1}: sma {sma} EE published {published} engine {got!r}")
        missing = KNOWN_LABEL_DIVERGENCES - {d[0] for d in self.label_diffs}
        for row in sorted(missing):
            out.append(f"  row {row + 1}: expected label divergence did not occur")
        out.append("PASS" if self.passed else "FAIL")
        return out


def golden_check(
    ee_fn: Callable[[float], float] = extrapolate_ee,
    level_fn: Callable[[float], ActivityLevel] = classify_level,
    tol: float = EE_TOL,
) -> GoldenReport:
    report = GoldenReport()
    for row, (sma, ee, label) in enumerate(GOLDEN_ROWS):
        got = ee_fn(sma)
        if not abs(got - ee) <= tol:
            report.ee_diffs.append((row, sma, ee, got))
        level = level_fn(sma)
        if level.label != label:
            report.label_diffs.append((row, sma, label, level.label))
    return report
