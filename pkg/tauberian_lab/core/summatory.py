"""
Summatory functions M(x), psi(x), D(x), pi(x) and p_n, by sieve and by sublinear recursion
"""
import logging
import math
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .arith import ArithTable, build_arith_table
from .config import table_cap
from .exceptions import DomainError, RangeLimitError
from .reports import RemainderSeries, VerificationReport

logger = logging.getLogger(__name__)

MIN_THRESHOLD = 1024

# log(v!) is accumulated term by term up to here, log-gamma beyond
EXACT_LOG_FACTORIAL_LIMIT = 1_000_000
_LOG_BLOCK = 1024

Number = Union[int, float]


def log_factorial_table(N: int) -> np.ndarray:
    """
    Entry v is log(v!) = sum_{n<=v} log n for 0 <= v <= N.

    Block totals are combined with fsum; only the partial sums inside one
    block carry ordinary rounding.
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    logs = np.log(np.arange(1, N + 1, dtype=np.float64))
    table = np.zeros(N + 1, dtype=np.float64)
    block_totals: List[float] = []
    for start in range(0, N, _LOG_BLOCK):
        chunk = logs[start:start + _LOG_BLOCK]
        table[start + 1:start + 1 + chunk.size] = math.fsum(block_totals) + np.cumsum(chunk)
        block_totals.append(math.fsum(chunk))
    return table


class SummatoryKind(str, Enum):
    MERTENS = 'MERTENS'
    CHEBYSHEV_PSI = 'CHEBYSHEV_PSI'


def _table_for(N: int, table: Optional[ArithTable]) -> ArithTable:
    if table is None:
        return build_arith_table(N)
    table.require(N)
    return table


def mertens_sieve(N: int, table: Optional[ArithTable] = None) -> np.ndarray:
    """Entry v is M(v) for 0 <= v <= N (M(0) = 0), exact int64"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    table = _table_for(N, table)
    return np.cumsum(table.mu[:N + 1], dtype=np.int64)


def psi_sieve(N: int, table: Optional[ArithTable] = None) -> np.ndarray:
    """Entry v is psi(v) for 0 <= v <= N"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    table = _table_for(N, table)
    return np.cumsum(table.lam[:N + 1])


def default_threshold(x: float) -> int:
    """T = max(1024, floor(x^(2/3))), bounded by the table cap"""
    return int(min(max(MIN_THRESHOLD, math.floor(x ** (2.0 / 3.0))), table_cap()))


class SummatoryOracle:
    """
    Memoized M or psi over the values floor(x/n).

    Below the threshold T values come from a prefix-sum table; above it from
    sum_{n<=v} S(floor(v/n)) = H(v), with H(v) = 1 for M and log(v!) for psi.
    The memo is not locked: confine an instance to one thread.
    """

    def __init__(self, kind: SummatoryKind, threshold: int = MIN_THRESHOLD,
                 table: Optional[ArithTable] = None):
        self.kind = SummatoryKind(kind)
        self.threshold = int(threshold)
        if self.threshold < 1:
            raise DomainError(f"Threshold must be >= 1, got {threshold}")
        table = table if table is not None and table.limit >= self.threshold \
            else build_arith_table(self.threshold)
        if self.kind is SummatoryKind.MERTENS:
            self.base = mertens_sieve(self.threshold, table)
        else:
            self.base = psi_sieve(self.threshold, table)
        self.base.flags.writeable = False
        self.memo: Dict[int, Number] = {}
        self._log_factorials: Optional[np.ndarray] = None
        logger.debug(f"{self.kind.value} oracle ready with threshold {self.threshold}")

    def __call__(self, x: float) -> Number:
        return self.value(x)

    def value(self, x: float) -> Number:
        if x < 1:
            raise DomainError(f"Summatory functions are evaluated at x >= 1, got {x}")
        return self._value(int(math.floor(x)))

    def _head(self, v: int) -> Number:
        if self.kind is SummatoryKind.MERTENS:
            return 1
        if v > EXACT_LOG_FACTORIAL_LIMIT:
            return math.lgamma(v + 1.0)
        if self._log_factorials is None or v >= self._log_factorials.size:
            size = v if self._log_factorials is None else max(v, 2 * self._log_factorials.size)
            self._log_factorials = log_factorial_table(min(size, EXACT_LOG_FACTORIAL_LIMIT))
        return float(self._log_factorials[v])

    def _value(self, v: int) -> Number:
        if v <= self.threshold:
            base = self.base[v]
            return int(base) if self.kind is SummatoryKind.MERTENS else float(base)
        cached = self.memo.get(v)
        if cached is not None:
            return cached

        total = self._head(v)
        n = 2
        while n <= v:
            q = v // n
            hi = v // q
            total -= (hi - n + 1) * self._value(q)
            n = hi + 1

        self.memo[v] = total
        return total


def mertens_sublinear(x: float, oracle: Optional[SummatoryOracle] = None) -> int:
    """Exact M(floor(x)) from M(x) = 1 - sum_{2<=n<=x} M(floor(x/n))"""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if oracle is None:
        oracle = SummatoryOracle(SummatoryKind.MERTENS, default_threshold(x))
    return int(oracle.value(x))


def psi_sublinear(x: float, oracle: Optional[SummatoryOracle] = None) -> float:
    """psi(x) from psi(x) = log(floor(x)!) - sum_{2<=n<=x} psi(floor(x/n))"""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if oracle is None:
        oracle = SummatoryOracle(SummatoryKind.CHEBYSHEV_PSI, default_threshold(x))
    return float(oracle.value(x))


def divisor_summatory(x: float) -> int:
    """D(x) = sum_{m<=x} floor(x/m) = 2 sum_{m<=sqrt x} floor(x/m) - floor(sqrt x)^2"""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    v = int(math.floor(x))
    r = math.isqrt(v)
    m = np.arange(1, r + 1, dtype=np.int64)
    return 2 * int(np.sum(v // m)) - r * r


def divisor_summatory_direct(x: float) -> int:
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    v = int(math.floor(x))
    return int(np.sum(v // np.arange(1, v + 1, dtype=np.int64)))


def prime_count(x: float, table: ArithTable) -> int:
    if x < 2:
        raise DomainError(f"prime_count needs x >= 2, got {x}")
    v = int(math.floor(x))
    table.require(v)
    return int(np.searchsorted(table.primes, v, side='right'))


def nth_prime(n: int, table: ArithTable) -> int:
    if n < 1:
        raise DomainError(f"nth_prime needs n >= 1, got {n}")
    if n > table.primes.size:
        raise RangeLimitError(
            f"p_{n} lies beyond the sieved range ({table.primes.size} primes known)", limit=table.limit,
        )
    return int(table.primes[n - 1])


def pnt_ratio_series(xs: Sequence[float], table: ArithTable,
                     ns: Optional[Iterable[int]] = None) -> Tuple[RemainderSeries, RemainderSeries, RemainderSeries]:
    """psi(x)/x, pi(x) log x / x and p_n/(n log n), each against main term 1"""
    xs = [float(x) for x in xs]
    if any(x < 2 for x in xs):
        raise DomainError("pnt_ratio_series needs every x >= 2")
    if xs:
        table.require(max(xs))
    psi = psi_sieve(table.limit, table)

    psi_ratio = RemainderSeries('psi_ratio', '1')
    pi_ratio = RemainderSeries('pi_log_ratio', '1')
    for x in xs:
        v = int(math.floor(x))
        psi_ratio.append(x, psi[v] / x, 1.0, 1.0)
        pi_ratio.append(x, prime_count(x, table) * math.log(x) / x, 1.0, 1.0)

    if ns is None:
        ns = sorted({prime_count(x, table) for x in xs} - {0, 1})
    ns = [int(n) for n in ns]
    if any(n < 2 for n in ns):
        raise DomainError("pnt_ratio_series needs every n >= 2, log n vanishes at n = 1")
    prime_ratio = RemainderSeries('nth_prime_ratio', '1')
    for n in ns:
        prime_ratio.append(n, nth_prime(n, table) / (n * math.log(n)), 1.0, 1.0)
    return psi_ratio, pi_ratio, prime_ratio


def chebyshev_sandwich(xs: Sequence[float], table: ArithTable) -> VerificationReport:
    """psi(x)/x <= pi(x) log x/x <= (psi(x)/x) log x / log(x / log^2 x) + 1/log x for x >= 16"""
    points = [float(x) for x in xs if x >= 16]
    if points:
        table.require(max(points))
    psi = psi_sieve(table.limit, table)
    violations: List[float] = []
    for x in points:
        log_x = math.log(x)
        lower = psi[int(x)] / x
        middle = prime_count(x, table) * log_x / x
        upper = lower * log_x / math.log(x / log_x ** 2) + 1.0 / log_x
        violations.append(max(0.0, lower - middle, middle - upper))
    return VerificationReport.from_violations(
        'chebyshev_sandwich', points, violations, 1e-12,
        notes='x >= 16, where x / log^2 x is increasing and log(x / log^2 x) >= 0.73',
    )


def verify_sublinear_agreement(xs: Sequence[float], table: ArithTable,
                               tol_scale: float = 1.0) -> List[VerificationReport]:
    """Sublinear M and psi against the sieve prefix sums at each x"""
    points = [float(x) for x in xs if x >= 1]
    if points:
        table.require(max(points))
    mertens = mertens_sieve(table.limit, table)
    psi = psi_sieve(table.limit, table)

    top = max(points) if points else 1.0
    threshold = min(default_threshold(top), table.limit)
    mertens_oracle = SummatoryOracle(SummatoryKind.MERTENS, threshold, table)
    psi_oracle = SummatoryOracle(SummatoryKind.CHEBYSHEV_PSI, threshold, table)

    mertens_diff, psi_diff = [], []
    for x in points:
        v = int(math.floor(x))
        mertens_diff.append(abs(mertens_sublinear(x, mertens_oracle) - int(mertens[v])))
        exact = float(psi[v])
        psi_diff.append(abs(psi_sublinear(x, psi_oracle) - exact) / max(exact, 1.0))

    return [
        VerificationReport.from_violations('mertens_sublinear=sieve', points, mertens_diff, 0.0),
        VerificationReport.from_violations('psi_sublinear=sieve', points, psi_diff, 1e-9 * tol_scale),
    ]


def verify_mertens_inversion(xs: Sequence[float], table: ArithTable) -> VerificationReport:
    """sum_{n<=x} M(floor(x/n)) = 1 exactly"""
    points = [int(math.floor(x)) for x in xs if x >= 1]
    if points:
        table.require(max(points))
    mertens = mertens_sieve(table.limit, table)
    violations = []
    for v in points:
        n = np.arange(1, v + 1, dtype=np.int64)
        violations.append(abs(int(np.sum(mertens[v // n])) - 1))
    return VerificationReport.from_violations('sum M(x/n)=1', points, violations, 0.0)


def verify_divisor_hyperbola(N: int) -> VerificationReport:
    """Hyperbola-method D(x) equals the direct sum for every integer x <= N"""
    points = list(range(1, N + 1))
    violations = [abs(divisor_summatory(x) - divisor_summatory_direct(x)) for x in points]
    return VerificationReport.from_violations('divisor_hyperbola=direct', points, violations, 0.0)
