"""
Mobius transform of real functions on [1, inf), its inversion, the Tatuzawa-Iseki
weighted inversion, and exact integration of step-minus-linear functions
"""
import logging
import math
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .arith import ArithTable
from .exceptions import DomainError, RangeLimitError, ShapeMismatchError
from .reports import VerificationReport

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class StepFunction:
    """
    Right-continuous jump function: value(x) = offset + sum of sizes at locations <= x.

    domain_end, when set, is the first x at which the tabulated jumps are no
    longer complete; evaluating there raises RangeLimitError.
    """

    def __init__(self, locations: Sequence[float], sizes: Sequence[float], offset: float = 0.0,
                 name: str = '', domain_end: float = math.inf):
        locations = np.asarray(locations, dtype=np.float64)
        sizes = np.asarray(sizes, dtype=np.float64)
        if locations.shape != sizes.shape or locations.ndim != 1:
            raise ShapeMismatchError(f"locations {locations.shape} and sizes {sizes.shape} differ")
        if locations.size and locations[0] < 1:
            raise DomainError(f"Jump locations must be >= 1, got {locations[0]}")
        if np.any(np.diff(locations) <= 0):
            raise DomainError("Jump locations must be strictly increasing")

        self.locations = locations
        self.sizes = sizes
        self.offset = float(offset)
        self.name = name
        self.domain_end = float(domain_end)
        # cumulative[i] = value on [locations[i-1], locations[i])
        self.cumulative = self.offset + np.concatenate(([0.0], np.cumsum(sizes)))
        self._over_t = np.concatenate(([0.0], np.cumsum(sizes / locations))) if sizes.size else np.zeros(1)
        for array in (self.locations, self.sizes, self.cumulative, self._over_t):
            array.flags.writeable = False
        self._pieces = None

    @classmethod
    def from_arith(cls, values: np.ndarray, name: str = '', offset: float = 0.0) -> 'StepFunction':
        """Jumps values[n] at each integer n in 1..N; exact on [1, N + 1)"""
        values = np.asarray(values, dtype=np.float64)
        n = np.flatnonzero(values)
        n = n[n >= 1]
        return cls(n.astype(np.float64), values[n], offset=offset, name=name,
                   domain_end=float(values.size))

    @property
    def non_decreasing(self) -> bool:
        return bool(np.all(self.sizes >= 0))

    def __repr__(self) -> str:
        return f"StepFunction({self.name or '?'}, jumps={self.sizes.size})"

    def _check(self, x: np.ndarray) -> None:
        if x.size and np.max(x) >= self.domain_end:
            raise RangeLimitError(f"{self!r} evaluated at {np.max(x):g}", limit=self.domain_end)

    def value(self, x: ArrayLike) -> ArrayLike:
        points = np.asarray(x, dtype=np.float64)
        self._check(points)
        result = self.cumulative[np.searchsorted(self.locations, points, side='right')]
        return float(result) if np.ndim(x) == 0 else result

    __call__ = value

    def stieltjes_over_t(self, x: ArrayLike) -> ArrayLike:
        points = np.asarray(x, dtype=np.float64)
        self._check(points)
        result = self._over_t[np.searchsorted(self.locations, points, side='right')]
        return float(result) if np.ndim(x) == 0 else result

    def _knots(self) -> Tuple[np.ndarray, np.ndarray]:
        """Breakpoints 1 = k_0 < k_1 < ... and the constant value on each [k_i, k_i+1)"""
        if self._pieces is None:
            inner = self.locations[self.locations > 1.0]
            knots = np.concatenate(([1.0], inner))
            levels = self.cumulative[np.searchsorted(self.locations, knots, side='right')]
            self._pieces = (knots, levels)
        return self._pieces

    def integral_g_over_t2(self, A: float, x: ArrayLike, absolute: bool = False) -> ArrayLike:
        """Exact integral of (f(t) - A t)/t^2, or of its absolute value, over [1, x]"""
        if A < 0:
            raise DomainError(f"A must be >= 0, got {A}")
        points = np.asarray(x, dtype=np.float64)
        if points.size and np.min(points) < 1:
            raise DomainError(f"x must be >= 1, got {np.min(points)}")
        self._check(points)

        knots, levels = self._knots()
        piece = _piece_integral(levels[:-1], A, knots[:-1], knots[1:], absolute)
        prefix = np.concatenate(([0.0], np.cumsum(piece)))
        i = np.searchsorted(knots, points, side='right') - 1
        result = prefix[i] + _piece_integral(levels[i], A, knots[i], points, absolute)
        return float(result) if np.ndim(x) == 0 else result


def _signed(c, A, a, b):
    # antiderivative of (c - A t)/t^2 is -c/t - A log t
    return c * (1.0 / a - 1.0 / b) - A * np.log(b / a)


def _piece_integral(c: np.ndarray, A: float, a: np.ndarray, b: np.ndarray, absolute: bool) -> np.ndarray:
    if not absolute:
        return _signed(c, A, a, b)
    # split at the zero t = c/A of c - A t, clipped to the piece
    if A == 0:
        split = np.where(np.asarray(c) >= 0, b, a)
    else:
        split = np.clip(np.asarray(c) / A, a, b)
    return _signed(c, A, a, split) - _signed(c, A, split, b)


class FnKind(str, Enum):
    CONSTANT_ONE = 'CONSTANT_ONE'
    IDENTITY = 'IDENTITY'
    X_LOG_X = 'X_LOG_X'
    FLOOR = 'FLOOR'
    STEP = 'STEP'
    TABLE = 'TABLE'
    LINEAR = 'LINEAR'
    TRANSFORM = 'TRANSFORM'


class RealFn:
    """Real function on [1, inf), extended by 0 on [0, 1); evaluation is vectorised"""

    def __init__(self, kind: FnKind, rule: Callable[[np.ndarray], np.ndarray], label: str = ''):
        self.kind = kind
        self._rule = rule
        self.label = label or kind.value

    def __repr__(self) -> str:
        return f"RealFn({self.label})"

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        points = np.asarray(x, dtype=np.float64)
        values = np.where(points >= 1.0, self._rule(np.maximum(points, 1.0)), 0.0)
        return float(values) if np.ndim(x) == 0 else values

    __call__ = evaluate

    @classmethod
    def constant_one(cls) -> 'RealFn':
        return cls(FnKind.CONSTANT_ONE, np.ones_like, 'one')

    @classmethod
    def identity(cls) -> 'RealFn':
        return cls(FnKind.IDENTITY, lambda t: t, 'id')

    @classmethod
    def x_log_x(cls) -> 'RealFn':
        return cls(FnKind.X_LOG_X, lambda t: t * np.log(t), 'xlogx')

    @classmethod
    def floor(cls) -> 'RealFn':
        return cls(FnKind.FLOOR, np.floor, 'floor')

    @classmethod
    def step(cls, step: StepFunction) -> 'RealFn':
        return cls(FnKind.STEP, step.value, step.name or 'step')

    @classmethod
    def table(cls, values: np.ndarray, label: str = 'table') -> 'RealFn':
        """f(x) = values[floor(x)]"""
        values = np.asarray(values, dtype=np.float64)

        def rule(t: np.ndarray) -> np.ndarray:
            idx = np.floor(t).astype(np.int64)
            if idx.size and idx.max() >= values.size:
                raise RangeLimitError(f"Table function {label} evaluated at {t.max():g}", limit=values.size - 1)
            return values[idx]

        return cls(FnKind.TABLE, rule, label)

    @classmethod
    def combine(cls, a: float, f: 'RealFn', b: float, g: 'RealFn') -> 'RealFn':
        return cls(FnKind.LINEAR, lambda t: a * f._rule(t) + b * g._rule(t), f"{a:g}*{f.label}+{b:g}*{g.label}")

    @classmethod
    def mobius_transform_of(cls, f: 'RealFn') -> 'RealFn':
        """F(x) = sum_{n<=x} f(x/n) as a function of x"""
        def rule(t: np.ndarray) -> np.ndarray:
            flat = np.ravel(t)
            out = np.array([mobius_transform(f, float(v)) for v in flat])
            return out.reshape(np.shape(t))

        return cls(FnKind.TRANSFORM, rule, f"T[{f.label}]")


def _check_x(x: float) -> int:
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    return int(math.floor(x))


def mobius_transform(f: RealFn, x: float) -> float:
    """F(x) = sum_{n<=x} f(x/n), direct summation"""
    v = _check_x(x)
    n = np.arange(1, v + 1, dtype=np.float64)
    return math.fsum(f.evaluate(x / n))


def inverse_mobius_transform(F: RealFn, x: float, table: ArithTable) -> float:
    """sum_{n<=x} mu(n) F(x/n)"""
    v = _check_x(x)
    table.require(v)
    n = np.flatnonzero(table.mu[1:v + 1]) + 1
    return math.fsum(table.mu[n] * F.evaluate(x / n))


def tatuzawa_iseki_residual(f: RealFn, x: float, table: ArithTable) -> Tuple[float, float]:
    """
    Both sides of f(x) log x + sum_{n<=x} Lambda(n) f(x/n) = sum_{n<=x} mu(n) log(x/n) F(x/n),
    with F the Mobius transform of f.
    """
    v = _check_x(x)
    table.require(v)
    lam_n = np.flatnonzero(table.lam[1:v + 1]) + 1
    lhs = f.evaluate(x) * math.log(x) + math.fsum(table.lam[lam_n] * f.evaluate(x / lam_n))

    big_f = RealFn.mobius_transform_of(f)
    mu_n = np.flatnonzero(table.mu[1:v + 1]) + 1
    # n = x contributes log 1 = 0
    rhs = math.fsum(table.mu[mu_n] * np.log(x / mu_n) * big_f.evaluate(x / mu_n))
    return lhs, rhs


def stieltjes_over_t(f: StepFunction, x: ArrayLike) -> ArrayLike:
    """sum of size/loc over jumps with loc <= x, jumps at t = 1 included"""
    if np.min(np.asarray(x)) < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    return f.stieltjes_over_t(x)


def integral_g_over_t2(f: StepFunction, A: float, x: ArrayLike, absolute: bool = False) -> ArrayLike:
    """int_1^x (f(t) - A t)/t^2 dt, or the integral of |f(t) - A t|/t^2"""
    return f.integral_g_over_t2(A, x, absolute=absolute)


def verify_inversion_roundtrip(f: RealFn, xs: Sequence[float], table: ArithTable,
                               tol_scale: float = 1.0) -> VerificationReport:
    """inverse(transform(f))(x) = f(x) within 1e-9 (1 + |f(x)|)"""
    big_f = RealFn.mobius_transform_of(f)
    violations = []
    for x in xs:
        expected = f.evaluate(x)
        violations.append(abs(inverse_mobius_transform(big_f, x, table) - expected) / (1.0 + abs(expected)))
    return VerificationReport.from_violations(f"mobius_roundtrip[{f.label}]", xs, violations, 1e-9 * tol_scale)


def verify_tatuzawa_iseki(f: RealFn, xs: Sequence[float], table: ArithTable,
                          tol_scale: float = 1.0) -> VerificationReport:
    violations = []
    for x in xs:
        lhs, rhs = tatuzawa_iseki_residual(f, x, table)
        violations.append(abs(lhs - rhs) / (1.0 + abs(lhs)))
    return VerificationReport.from_violations(f"tatuzawa_iseki[{f.label}]", xs, violations, 1e-7 * tol_scale)
