"""
Remainder-tracked elementary estimates, Mobius sums, the Erdos-Karamata sum, U(x),
the divisor formula, and the constants gamma and c
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np

from .arith import ArithTable, k_function
from .config import default_run_config
from .exceptions import ConfigurationError, DomainError, UsageError
from .reports import RemainderSeries, VerificationReport
from .summatory import divisor_summatory

logger = logging.getLogger(__name__)

_CHUNK = 1_000_000

E = TypeVar('E', bound=Enum)


@dataclass(frozen=True)
class Constants:
    gamma: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ConfigurationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not math.isfinite(self.c):
            raise ConfigurationError(f"c must be finite, got {self.c}")


def _chunked_fsum(term: Callable[[np.ndarray], np.ndarray], lo: int, hi: int) -> float:
    """fsum of term(n) for lo <= n <= hi, evaluated in chunks"""
    partials = []
    for start in range(lo, hi + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, hi + 1), dtype=np.float64)
        partials.append(math.fsum(term(n)))
    return math.fsum(partials)


def compute_gamma(N: Optional[int] = None) -> float:
    """H_N - log N - 1/(2N) + 1/(12N^2)"""
    N = default_run_config().gamma_terms if N is None else N
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    harmonic = _chunked_fsum(lambda n: 1.0 / n, 1, N)
    return harmonic - math.log(N) - 1.0 / (2 * N) + 1.0 / (12.0 * N * N)


def gamma_partial_sum(N: int, accelerated: bool = False) -> float:
    """
    gamma from 1 - sum_{n<N} [log((n+1)/n) - 1/(n+1)], the integral form of the
    remainder of the harmonic sum; accelerated adds the -1/(2N) + 1/(12N^2) tail.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    partial = _chunked_fsum(lambda n: np.log1p(1.0 / n) - 1.0 / (n + 1.0), 1, N - 1) if N > 1 else 0.0
    value = 1.0 - partial
    if accelerated:
        value += -1.0 / (2 * N) + 1.0 / (12.0 * N * N)
    return value


def compute_c(N: Optional[int] = None) -> float:
    """sum_{n<=N} log(n)/n - log^2(N)/2 - log(N)/(2N) - f'(N)/12, f(t) = log(t)/t"""
    N = default_run_config().c_terms if N is None else N
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    total = _chunked_fsum(lambda n: np.log(n) / n, 1, N)
    log_n = math.log(N)
    derivative = (1.0 - log_n) / (N * N)
    return total - log_n ** 2 / 2.0 - log_n / (2.0 * N) - derivative / 12.0


def c_integral_form(N: int) -> float:
    """
    c as the integral of {t}(1 - log t)/t^2 over [1, N], piece by piece in closed form,
    plus the tail estimate -log(N)/(2N).
    """
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")

    def piece(k: np.ndarray) -> np.ndarray:
        # on [k, k+1): antiderivative log t - log^2(t)/2 - k log(t)/t
        step = np.log1p(1.0 / k)
        return np.log(k + 1.0) / (k + 1.0) - step * (np.log(k + 1.0) + np.log(k)) / 2.0

    return _chunked_fsum(piece, 1, N - 1) - math.log(N) / (2.0 * N)


@lru_cache(maxsize=1)
def default_constants() -> Constants:
    constants = Constants(gamma=compute_gamma(), c=compute_c())
    logger.info(f"Constants computed: gamma={constants.gamma:.15g}, c={constants.c:.15g}")
    return constants


def _parse_kind(enum: Type[E], kind) -> E:
    try:
        return enum(kind.upper() if isinstance(kind, str) else kind)
    except ValueError:
        raise UsageError(f"Unknown {enum.__name__} {kind!r}; expected one of {[k.value for k in enum]}")


def _floors(xs: Sequence[float]) -> List[int]:
    return [int(math.floor(x)) for x in xs]


def _running_fsum(terms: np.ndarray, xs: Sequence[float]) -> List[float]:
    """Correctly rounded partial sums of terms[1..floor(x)] at increasing xs"""
    totals, total, start = [], 0.0, 1
    for v in _floors(xs):
        if v >= start:
            total = math.fsum(np.concatenate(([total], terms[start:v + 1])))
            start = v + 1
        totals.append(total)
    return totals


class ElementaryKind(str, Enum):
    S1 = 'S1'
    S5 = 'S5'
    S2 = 'S2'
    S2B = 'S2B'
    S3 = 'S3'
    S3B = 'S3B'


class MobiusKind(str, Enum):
    MU1 = 'MU1'
    MU2 = 'MU2'
    MU3 = 'MU3'


# kind -> (main term, normalizer name, normalizer)
def _elementary_terms(constants: Constants) -> Dict[ElementaryKind, Tuple[Callable, str, Callable]]:
    log = math.log
    return {
        ElementaryKind.S1: (lambda x: log(x) + constants.gamma, '1/x', lambda x: 1.0 / x),
        ElementaryKind.S5: (lambda x: log(x) ** 2 / 2.0 + constants.c, '(1+log x)/x',
                            lambda x: (1.0 + log(x)) / x),
        ElementaryKind.S2: (lambda x: x * log(x) - x, 'log x', log),
        ElementaryKind.S2B: (lambda x: x, 'log x', log),
        ElementaryKind.S3: (lambda x: x * (log(x) ** 2 - 2.0 * log(x) + 2.0), 'log^2 x',
                            lambda x: log(x) ** 2),
        ElementaryKind.S3B: (lambda x: 2.0 * x, 'log^2 x', lambda x: log(x) ** 2),
    }


def _elementary_raws(kind: ElementaryKind, xs: Sequence[float]) -> List[float]:
    top = max(_floors(xs)) if xs else 1
    n = np.arange(top + 1, dtype=np.float64)
    n[0] = 1.0
    if kind is ElementaryKind.S1:
        return _running_fsum(1.0 / n, xs)
    if kind is ElementaryKind.S5:
        return _running_fsum(np.log(n) / n, xs)
    if kind is ElementaryKind.S2:
        return _running_fsum(np.log(n), xs)
    if kind is ElementaryKind.S3:
        return _running_fsum(np.log(n) ** 2, xs)
    power = 1 if kind is ElementaryKind.S2B else 2
    return [math.fsum(np.log(x / n[1:v + 1]) ** power) for x, v in zip(xs, _floors(xs))]


def elementary_series(kind, xs: Sequence[float], constants: Optional[Constants] = None) -> RemainderSeries:
    """One of the six elementary sums against its main term, normalized by its remainder scale"""
    kind = _parse_kind(ElementaryKind, kind)
    if any(x < 1 for x in xs):
        raise DomainError("elementary sums need x >= 1")
    constants = constants or default_constants()
    main, normalizer, scale = _elementary_terms(constants)[kind]
    raws = _elementary_raws(kind, xs)
    return RemainderSeries.build(kind.value, normalizer, xs, raws, [main(x) for x in xs], scale)


def _mobius_raw(kind: MobiusKind, x: float, table: ArithTable) -> float:
    v = int(math.floor(x))
    n = np.flatnonzero(table.mu[1:v + 1]) + 1
    terms = table.mu[n] / n
    if kind is MobiusKind.MU2:
        terms = terms * np.log(x / n)
    elif kind is MobiusKind.MU3:
        terms = terms * np.log(x / n) ** 2
    return math.fsum(terms)


def mobius_series(kind, xs: Sequence[float], table: ArithTable) -> RemainderSeries:
    """sum mu(n)/n log^k(x/n) for k = 0, 1, 2; main 0, 0 and 2 log x"""
    kind = _parse_kind(MobiusKind, kind)
    if xs:
        table.require(max(xs))
    raws = [_mobius_raw(kind, x, table) for x in xs]
    if kind is MobiusKind.MU3:
        mains = [2.0 * math.log(x) for x in xs]
    else:
        mains = [0.0] * len(xs)
    return RemainderSeries.build(kind.value, '1', xs, raws, mains, lambda x: 1.0)


def verify_mu1_bound(table: ArithTable, N: Optional[int] = None) -> VerificationReport:
    """|sum_{n<=x} mu(n)/n| <= 1 at every integer x <= N"""
    N = table.limit if N is None else N
    table.require(N)
    n = np.arange(1, N + 1, dtype=np.float64)
    partial = np.cumsum(table.mu[1:N + 1] / n)
    excess = np.maximum(np.abs(partial) - 1.0, 0.0)
    return VerificationReport.from_violations(
        '|sum mu(n)/n|<=1', np.arange(1, N + 1), excess, 1e-12, range_desc=f"x in [1, {N}]",
    )


def erdos_karamata_series(xs: Sequence[float], table: ArithTable,
                          k_values: Optional[np.ndarray] = None) -> RemainderSeries:
    """sum_{n<=x} (Lambda(n) + K(n)) against 2x, normalized by x / log x"""
    if xs:
        table.require(max(xs))
    if k_values is None:
        k_values = k_function(table).values
    prefix = np.cumsum(table.lam + k_values)
    raws = [float(prefix[v]) for v in _floors(xs)]
    return RemainderSeries.build('EK', 'x/log x', xs, raws, [2.0 * x for x in xs],
                                 lambda x: x / math.log(x) if x > 1 else 0.0)


def u_series(xs: Sequence[float], table: ArithTable) -> RemainderSeries:
    """U(x) = sum_{n<=x} mu(n) sum_{m<=x/n} log^2 m against 2x log x, normalized by x"""
    if xs:
        table.require(max(xs))
    top = max(_floors(xs)) if xs else 1
    m = np.arange(top + 1, dtype=np.float64)
    m[0] = 1.0
    log2_prefix = np.cumsum(np.log(m) ** 2)

    raws = []
    for v in _floors(xs):
        n = np.flatnonzero(table.mu[1:v + 1]) + 1
        raws.append(math.fsum(table.mu[n] * log2_prefix[v // n]))
    return RemainderSeries.build('U', 'x', xs, raws, [2.0 * x * math.log(x) for x in xs], lambda x: x)


def divisor_series(xs: Sequence[float], constants: Optional[Constants] = None) -> RemainderSeries:
    """D(x) against x log x + (2 gamma - 1) x, normalized by sqrt(x)"""
    constants = constants or default_constants()
    raws = [float(divisor_summatory(x)) for x in xs]
    mains = [x * math.log(x) + (2.0 * constants.gamma - 1.0) * x for x in xs]
    return RemainderSeries.build('divisor', 'sqrt x', xs, raws, mains, math.sqrt)
