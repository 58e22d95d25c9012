"""
Landau-Ingham harness: instances f with g = f - Ax, the integral inequality for |g(x)|/x,
boundedness checks and the weighted inversion residual
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .arith import ArithTable
from .estimates import Constants, default_constants
from .exceptions import DomainError, UsageError
from .reports import RemainderSeries, VerificationReport
from .transforms import RealFn, StepFunction, mobius_transform

logger = logging.getLogger(__name__)

# x this close to 1 makes 1/log x blow up
_MIN_LOG_X = 1e-6


class InstanceLabel(str, Enum):
    PSI = 'PSI'
    MERTENS_PLUS_FLOOR = 'MERTENS_PLUS_FLOOR'
    CUSTOM = 'CUSTOM'


@dataclass(frozen=True, eq=False)
class TauberianInstance:
    """Non-negative non-decreasing f with F(x) = Ax log x + Bx + Cx/log x + o(x/log x)"""
    f: StepFunction
    A: float
    B: float = 0.0
    C: float = 0.0
    label: InstanceLabel = InstanceLabel.CUSTOM

    def __post_init__(self):
        if self.A < 0:
            raise DomainError(f"A must be >= 0, got {self.A}")
        if not self.f.non_decreasing:
            raise DomainError(f"{self.f!r} has negative jumps")
        if self.f.offset < 0:
            raise DomainError(f"{self.f!r} starts below zero")

    def g(self, x):
        return self.f(x) - self.A * np.asarray(x, dtype=np.float64)

    @property
    def domain_end(self) -> float:
        return self.f.domain_end


def zero_instance() -> TauberianInstance:
    """f = 0, A = 0: g vanishes identically"""
    return TauberianInstance(StepFunction([], [], name='zero'), A=0.0)


def build_instance(label, table: Optional[ArithTable] = None,
                   constants: Optional[Constants] = None) -> TauberianInstance:
    """PSI: jumps Lambda(n); MERTENS_PLUS_FLOOR: jumps mu(n) + 1; CUSTOM: the zero instance"""
    try:
        label = InstanceLabel(label.upper() if isinstance(label, str) else label)
    except ValueError:
        raise UsageError(f"Unknown instance label {label!r}; expected one of {[member.value for member in InstanceLabel]}")

    if label is InstanceLabel.CUSTOM:
        return zero_instance()
    if table is None:
        raise UsageError(f"Instance {label.value} needs an arithmetic table")

    if label is InstanceLabel.PSI:
        f = StepFunction.from_arith(table.lam, name='psi')
        return TauberianInstance(f, A=1.0, B=-1.0, C=0.0, label=label)

    constants = constants or default_constants()
    f = StepFunction.from_arith(table.mu.astype(np.float64) + 1.0, name='M+floor')
    return TauberianInstance(f, A=1.0, B=2.0 * constants.gamma - 1.0, C=0.0, label=label)


class Theorem1Row(NamedTuple):
    x: float
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def theorem1_report(inst: TauberianInstance, xs: Sequence[float]) -> List[Theorem1Row]:
    """lhs = |g(x)|/x against rhs = (1/log x) int_1^x |g(t)|/t^2 dt"""
    if any(x <= 1 for x in xs):
        raise DomainError("theorem1_report needs every x > 1")
    points = np.array([x for x in xs if math.log(x) > _MIN_LOG_X], dtype=np.float64)
    if points.size < len(xs):
        logger.debug(f"Skipped {len(xs) - points.size} points within {_MIN_LOG_X} of log x = 0")
    lhs = np.abs(inst.g(points)) / points
    rhs = inst.f.integral_g_over_t2(inst.A, points, absolute=True) / np.log(points)
    return [Theorem1Row(float(x), float(l), float(r)) for x, l, r in zip(points, lhs, rhs)]


def theorem1_gap_report(rows: Sequence[Theorem1Row], lo: float = 1e4, band: float = 0.1,
                        label: str = '') -> VerificationReport:
    """lhs - rhs <= band for x >= lo"""
    selected = [row for row in rows if row.x >= lo]
    return VerificationReport.from_violations(
        f"theorem1_gap[{label}]", [r.x for r in selected], [r.gap for r in selected], band,
    )


def theorem1_decay_report(rows: Sequence[Theorem1Row], label: str = '') -> VerificationReport:
    """lhs at the largest x stays below the lhs max over the first decade of the sample"""
    if len(rows) < 2:
        return VerificationReport(f"theorem1_decay[{label}]", 'too few points', 0.0, None, 1.0)
    first = rows[0].x
    early = max(row.lhs for row in rows if row.x <= 10.0 * first)
    last = rows[-1]
    ratio = last.lhs / early if early > 0 else (0.0 if last.lhs == 0 else math.inf)
    return VerificationReport(
        f"theorem1_decay[{label}]", f"[{first:g}, {last.x:g}]", ratio, last.x, 1.0,
        notes=f"lhs(last)={last.lhs:.6g}, early max={early:.6g}",
    )


def prop_estim_series(inst: TauberianInstance, xs: Sequence[float]) -> Tuple[RemainderSeries, ...]:
    """f(x)/x, int_{1-0}^x df(t)/t against A log x, and the signed int_1^x g(t)/t^2 dt"""
    points = np.asarray(xs, dtype=np.float64)
    ratio = inst.f(points) / points
    stieltjes = inst.f.stieltjes_over_t(points)
    integral = inst.f.integral_g_over_t2(inst.A, points)
    return (
        RemainderSeries.build('f/x', '1', xs, ratio, np.zeros_like(points), _unit),
        RemainderSeries.build('stieltjes_over_t', '1', xs, stieltjes, inst.A * np.log(points), _unit),
        RemainderSeries.build('integral_g_over_t2', '1', xs, integral, np.zeros_like(points), _unit),
    )


def prop_estim_checks(inst: TauberianInstance, xs: Sequence[float],
                      factor: float = 2.0) -> List[VerificationReport]:
    """Growth-trend reports for the three boundedness claims; notes carry the sups"""
    reports = []
    for series in prop_estim_series(inst, xs):
        trend = series.trend_report(factor)
        reports.append(VerificationReport(
            name=f"prop_estim[{inst.label.value}]:{series.name}",
            range_desc=trend.range_desc,
            max_violation=trend.max_violation,
            location=trend.location,
            tolerance=trend.tolerance,
            notes=f"sup={series.max_abs_normalized():.6g}",
        ))
    return reports


def weighted_inversion_residual(inst: TauberianInstance, xs: Sequence[float],
                                table: ArithTable) -> RemainderSeries:
    """g(x) log x + sum_{n<=x} Lambda(n) g(x/n), normalized by x log x"""
    if xs:
        table.require(max(xs))
    series = RemainderSeries('weighted_inversion', 'x log x')
    for x in xs:
        v = int(math.floor(x))
        n = np.flatnonzero(table.lam[1:v + 1]) + 1
        raw = float(inst.g(x)) * math.log(x) + math.fsum(table.lam[n] * inst.g(x / n))
        series.append(x, raw, 0.0, x * math.log(x))
    return series


def _unit(x: float) -> float:
    return 1.0


def _transform(inst: TauberianInstance, x: float) -> float:
    if x < 1:
        return 0.0
    return mobius_transform(RealFn.step(inst.f), x)


def hypothesis_series(inst: TauberianInstance, xs: Sequence[float]) -> RemainderSeries:
    """F(x) against Ax log x + Bx + Cx/log x, normalized by x/log x"""
    series = RemainderSeries('hypothesis', 'x/log x')
    for x in xs:
        log_x = math.log(x)
        main = inst.A * x * log_x + inst.B * x + (inst.C * x / log_x if log_x > 0 else 0.0)
        series.append(x, _transform(inst, x), main, x / log_x if log_x > 0 else 0.0)
    return series


def tail_constant_series(inst: TauberianInstance, xs: Sequence[float],
                         constants: Optional[Constants] = None) -> RemainderSeries:
    """int_1^x (f(t) - At)/t^2 dt against its limit B - gamma A"""
    constants = constants or default_constants()
    limit = inst.B - constants.gamma * inst.A
    integral = inst.f.integral_g_over_t2(inst.A, np.asarray(xs, dtype=np.float64))
    return RemainderSeries.build('tail_constant', '1', xs, integral, [limit] * len(xs), _unit)


def doubling_series(inst: TauberianInstance, xs: Sequence[float]) -> RemainderSeries:
    """F(x) - 2F(x/2) against A x log 2, normalized by x"""
    series = RemainderSeries('doubling', 'x')
    for x in xs:
        raw = _transform(inst, x) - 2.0 * _transform(inst, x / 2.0)
        series.append(x, raw, inst.A * x * math.log(2.0), x)
    return series


def theorem1_series(rows: Sequence[Theorem1Row], label: str = '') -> RemainderSeries:
    """Rows as a series: raw = lhs, main = rhs, so the remainder is the gap"""
    name = f"theorem1[{label}]" if label else 'theorem1'
    return RemainderSeries.build(name, '1', [r.x for r in rows], [r.lhs for r in rows],
                                 [r.rhs for r in rows], _unit)
