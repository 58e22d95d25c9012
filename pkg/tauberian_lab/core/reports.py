"""
Result containers: remainder series for asymptotic checks and verification reports
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np


class Status(str, Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'


@dataclass(frozen=True)
class VerificationReport:
    """One verified claim: the worst violation found and where it occurred"""
    name: str
    range_desc: str
    max_violation: float
    location: Optional[float]
    tolerance: float
    notes: str = ''

    @property
    def status(self) -> Status:
        # NaN never passes
        if self.max_violation <= self.tolerance:
            return Status.PASS
        return Status.FAIL

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @classmethod
    def from_violations(
        cls,
        name: str,
        locations: Sequence[float],
        violations: Sequence[float],
        tolerance: float,
        range_desc: Optional[str] = None,
        notes: str = '',
    ) -> 'VerificationReport':
        """Reduce per-point violations to the worst one"""
        values = np.asarray(violations, dtype=float)
        points = np.asarray(locations, dtype=float)
        if range_desc is None:
            range_desc = f"[{points.min():g}, {points.max():g}]" if points.size else "empty"
        if values.size == 0:
            return cls(name, range_desc, 0.0, None, tolerance, notes)
        if np.isnan(values).any():
            worst = int(np.argmax(np.isnan(values)))
            return cls(name, range_desc, math.nan, float(points[worst]), tolerance, notes)
        worst = int(np.argmax(values))
        return cls(name, range_desc, float(values[worst]), float(points[worst]), tolerance, notes)


@dataclass(frozen=True)
class RemainderRecord:
    x: float
    raw: float
    main: float
    remainder: float
    normalized: float
    normalizer: str


@dataclass
class RemainderSeries:
    """Per-x records of raw value, main term and normalized remainder"""
    name: str
    normalizer: str
    records: List[RemainderRecord] = field(default_factory=list)

    def append(self, x: float, raw: float, main: float, scale: float) -> RemainderRecord:
        if self.records and x <= self.records[-1].x:
            raise ValueError(f"x must be strictly increasing: {x} after {self.records[-1].x}")
        remainder = raw - main
        normalized = remainder / scale if scale != 0 else math.nan
        record = RemainderRecord(float(x), float(raw), float(main), float(remainder),
                                 float(normalized), self.normalizer)
        self.records.append(record)
        return record

    @classmethod
    def build(
        cls,
        name: str,
        normalizer: str,
        xs: Iterable[float],
        raws: Iterable[float],
        mains: Iterable[float],
        scale: Callable[[float], float],
    ) -> 'RemainderSeries':
        series = cls(name, normalizer)
        for x, raw, main in zip(xs, raws, mains):
            series.append(x, raw, main, scale(x))
        return series

    def __len__(self) -> int:
        return len(self.records)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    @property
    def normalized(self) -> np.ndarray:
        return np.array([r.normalized for r in self.records])

    @property
    def raws(self) -> np.ndarray:
        return np.array([r.raw for r in self.records])

    def at(self, x: float) -> RemainderRecord:
        for record in self.records:
            if record.x == x:
                return record
        raise KeyError(x)

    def max_abs_normalized(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        values = [abs(r.normalized) for r in self.records
                  if lo <= r.x <= hi and not math.isnan(r.normalized)]
        return max(values) if values else 0.0

    def growth_ratio(self) -> float:
        """Top-decade max |normalized| divided by the max below the top decade"""
        if not self.records:
            return 0.0
        top = self.records[-1].x
        if self.records[0].x > top / 10.0:
            # sample spans less than a decade
            return 0.0
        below = self.max_abs_normalized(hi=top / 10.0)
        upper = self.max_abs_normalized(lo=top / 10.0)
        if below == 0.0:
            return 0.0 if upper == 0.0 else math.inf
        return upper / below

    def has_growth_trend(self, factor: float = 2.0) -> bool:
        return self.growth_ratio() > factor

    def trend_report(self, factor: float = 2.0) -> VerificationReport:
        lo = self.records[0].x if self.records else 0.0
        hi = self.records[-1].x if self.records else 0.0
        return VerificationReport(
            name=f"{self.name}:growth",
            range_desc=f"[{lo:g}, {hi:g}]",
            max_violation=self.growth_ratio(),
            location=hi,
            tolerance=factor,
            notes=f"max|normalized|={self.max_abs_normalized():.6g} ({self.normalizer})",
        )
