"""
Exact arithmetic functions and the Dirichlet-convolution ring: mu, Lambda, delta, 1, log, K
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional

import numpy as np

from .config import table_cap
from .exceptions import DomainError, RangeLimitError, ResourceLimitError, ShapeMismatchError
from .reports import VerificationReport

logger = logging.getLogger(__name__)

# Above this density the inner operand is treated as dense
_SPARSE_INNER_DENSITY = 0.1


def divisors(n: int) -> List[int]:
    """All divisors of n in ascending order, by trial division up to sqrt(n)"""
    if n < 1:
        raise DomainError(f"divisors are defined for n >= 1, got {n}")
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def mobius_recursive(n: int) -> int:
    """mu(n) from mu(1) = 1 and mu(n) = -sum of mu(d) over proper divisors d of n"""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"mobius_recursive needs an integer n >= 1, got {n!r}")
    return _mobius_recursive(int(n))


@lru_cache(maxsize=None)
def _mobius_recursive(n: int) -> int:
    if n == 1:
        return 1
    return -sum(_mobius_recursive(d) for d in divisors(n)[:-1])


class DenseArithFn:
    """Arithmetic function tabulated on 1..N; index 0 is stored as 0 and never read"""

    def __init__(self, values, exact: bool = False, name: str = ''):
        array = np.asarray(values)
        if array.ndim != 1 or array.size < 2:
            raise ShapeMismatchError(f"values must be a 1-d array covering 0..N with N >= 1, got shape {array.shape}")
        dtype = np.int64 if exact else np.float64
        self.values = np.array(array, dtype=dtype)
        self.values[0] = 0
        self.values.flags.writeable = False
        self.exact = exact
        self.name = name

    @property
    def limit(self) -> int:
        return self.values.size - 1

    def __len__(self) -> int:
        return self.limit

    def __getitem__(self, n):
        return self.values[n]

    def __repr__(self) -> str:
        kind = 'exact' if self.exact else 'real'
        return f"DenseArithFn({self.name or '?'}, N={self.limit}, {kind})"

    def truncated(self, N: int) -> 'DenseArithFn':
        if N > self.limit:
            raise RangeLimitError(f"Cannot truncate {self!r} to N={N}", limit=self.limit)
        return DenseArithFn(self.values[:N + 1], exact=self.exact, name=self.name)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    @classmethod
    def delta(cls, N: int) -> 'DenseArithFn':
        values = np.zeros(N + 1, dtype=np.int64)
        values[1] = 1
        return cls(values, exact=True, name='delta')

    @classmethod
    def one(cls, N: int) -> 'DenseArithFn':
        return cls(np.ones(N + 1, dtype=np.int64), exact=True, name='one')

    @classmethod
    def log(cls, N: int, power: int = 1) -> 'DenseArithFn':
        n = np.arange(N + 1, dtype=np.float64)
        n[0] = 1.0
        name = 'log' if power == 1 else f'log^{power}'
        return cls(np.log(n) ** power, name=name)


@dataclass(frozen=True, eq=False)
class ArithTable:
    """Sieved mu, Lambda and primes on 1..N; arrays are indexed by n and read-only"""
    limit: int
    mu: np.ndarray
    lam: np.ndarray
    primes: np.ndarray
    spf: np.ndarray

    def mu_fn(self, N: Optional[int] = None) -> DenseArithFn:
        N = self._check(N)
        return DenseArithFn(self.mu[:N + 1], exact=True, name='mu')

    def lambda_fn(self, N: Optional[int] = None) -> DenseArithFn:
        N = self._check(N)
        return DenseArithFn(self.lam[:N + 1], name='Lambda')

    def require(self, N: float) -> None:
        if N > self.limit:
            raise RangeLimitError(f"Arithmetic table does not cover {N:g}", limit=self.limit)

    def _check(self, N: Optional[int]) -> int:
        if N is None:
            return self.limit
        self.require(N)
        return int(N)


def _smallest_prime_factors(N: int) -> np.ndarray:
    """Eratosthenes-style smallest-prime-factor table, one vectorised stride per prime p <= sqrt N"""
    spf = np.zeros(N + 1, dtype=np.int32)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == 0:
            multiples = spf[p * p::p]
            multiples[multiples == 0] = p
    unmarked = np.flatnonzero(spf == 0)
    unmarked = unmarked[unmarked >= 2]
    spf[unmarked] = unmarked
    return spf


def _dyadic_blocks(N: int) -> Iterator[slice]:
    """Blocks [2^k, 2^(k+1)) of 2..N; n // spf(n) of any n in a block lies below it"""
    lo = 2
    while lo <= N:
        hi = min(2 * lo - 1, N)
        yield slice(lo, hi + 1)
        lo = hi + 1


def build_arith_table(N: int, cap: Optional[int] = None) -> ArithTable:
    """Sieve mu and Lambda on 1..N via smallest prime factors"""
    if N < 1:
        raise DomainError(f"Table limit must be >= 1, got {N}")
    cap = table_cap() if cap is None else cap
    if N > cap:
        raise ResourceLimitError(N, cap)

    spf = _smallest_prime_factors(N)

    # mu(n) = 0 if p^2 | n else -mu(n/p), p = spf(n); filled block by block
    mu = np.zeros(N + 1, dtype=np.int8)
    mu[1] = 1
    for block in _dyadic_blocks(N):
        n = np.arange(block.start, block.stop)
        p = spf[block]
        m = n // p
        mu[block] = np.where(spf[m] == p, 0, -mu[m])

    primes = np.flatnonzero(spf[2:] == np.arange(2, N + 1)) + 2
    lam = np.zeros(N + 1, dtype=np.float64)
    lam[primes] = np.log(primes)
    for p in primes[primes <= math.isqrt(N)]:
        p = int(p)
        power = p * p
        while power <= N:
            lam[power] = lam[p]
            power *= p

    for array in (mu, lam, primes, spf):
        array.flags.writeable = False
    logger.info(f"Arithmetic table built up to N={N} ({primes.size} primes)")
    return ArithTable(limit=N, mu=mu, lam=lam, primes=primes, spf=spf)


def dirichlet_convolve(f: DenseArithFn, g: DenseArithFn) -> DenseArithFn:
    """(f * g)(n) = sum over ab = n of f(a) g(b), by the loop over pairs with ab <= N"""
    if f.limit != g.limit:
        raise ShapeMismatchError(f"Cannot convolve functions with limits {f.limit} and {g.limit}")
    N = f.limit
    exact = f.exact and g.exact
    dtype = np.int64 if exact else np.float64
    out = np.zeros(N + 1, dtype=dtype)

    outer, inner = (f, g) if f.support().size <= g.support().size else (g, f)
    outer_values = outer.values.astype(dtype)
    inner_values = inner.values.astype(dtype)
    inner_support = inner.support()
    sparse_inner = inner_support.size < _SPARSE_INNER_DENSITY * N

    for a in outer.support():
        a = int(a)
        m = N // a
        if sparse_inner:
            bs = inner_support[:np.searchsorted(inner_support, m, side='right')]
            out[a * bs] += outer_values[a] * inner_values[bs]
        else:
            out[a::a] += outer_values[a] * inner_values[1:m + 1]

    return DenseArithFn(out, exact=exact, name=f"{f.name}*{g.name}")


def mangoldt_from_definition(N: int, table: Optional[ArithTable] = None) -> DenseArithFn:
    """Lambda(n) = -sum over d | n of mu(d) log d"""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    table = table if table is not None else build_arith_table(N)
    mu = table.mu_fn(N)
    weighted = DenseArithFn(mu.values * DenseArithFn.log(N).values, name='mu*log')
    summed = dirichlet_convolve(weighted, DenseArithFn.one(N))
    return DenseArithFn(-summed.values, name='Lambda_def')


def verify_mangoldt_definition(table: ArithTable, N: int) -> VerificationReport:
    """Lambda from -sum mu(d) log d against the sieve, within 1e-9 (1 + log n)"""
    table.require(N)
    defined = mangoldt_from_definition(N, table)
    log_n = DenseArithFn.log(N).values
    return _scaled_report('Lambda_def=Lambda_sieve', N, defined.values - table.lam[:N + 1], 1.0 + log_n, 1e-9)


def k_function(table: ArithTable) -> DenseArithFn:
    """K(1) = 0 and K(n) = (Lambda * Lambda)(n) / log n for n >= 2"""
    lam = table.lambda_fn()
    convolved = dirichlet_convolve(lam, lam).values
    values = np.zeros_like(convolved)
    n = np.arange(2, table.limit + 1, dtype=np.float64)
    values[2:] = convolved[2:] / np.log(n)
    return DenseArithFn(values, name='K')


def _scaled_report(name: str, N: int, diff: np.ndarray, scale: np.ndarray,
                   tolerance: float, notes: str = '') -> VerificationReport:
    n = np.arange(1, N + 1)
    violations = np.abs(diff[1:]) / scale[1:]
    return VerificationReport.from_violations(
        name, n, violations, tolerance, range_desc=f"n in [1, {N}]", notes=notes,
    )


def verify_mobius_unit(table: ArithTable, N: int) -> VerificationReport:
    """(mu * 1)(n) = delta(n), integer arithmetic, zero tolerance"""
    table.require(N)
    convolved = dirichlet_convolve(table.mu_fn(N), DenseArithFn.one(N))
    diff = convolved.values - DenseArithFn.delta(N).values
    return _scaled_report('mu*1=delta', N, diff, np.ones(N + 1), 0.0)


def verify_mangoldt_sum(table: ArithTable, N: int, tol_scale: float = 1.0) -> VerificationReport:
    """(Lambda * 1)(n) = log n within 1e-9 (1 + log n)"""
    table.require(N)
    convolved = dirichlet_convolve(table.lambda_fn(N), DenseArithFn.one(N))
    log_n = DenseArithFn.log(N).values
    return _scaled_report('Lambda*1=log', N, convolved.values - log_n, 1.0 + log_n, 1e-9 * tol_scale)


def verify_selberg(table: ArithTable, N: int, tol_scale: float = 1.0) -> VerificationReport:
    """Lambda(n) log n + (Lambda * Lambda)(n) = sum over d | n of mu(d) log^2(n/d)"""
    table.require(N)
    lam = table.lambda_fn(N)
    log_n = DenseArithFn.log(N).values
    lhs = lam.values * log_n + dirichlet_convolve(lam, lam).values
    rhs = dirichlet_convolve(table.mu_fn(N), DenseArithFn.log(N, power=2)).values
    scale = np.log(np.arange(N + 1) + 2.0) ** 2
    return _scaled_report('selberg', N, lhs - rhs, scale, 1e-6 * tol_scale)


def verify_weighted_inversion(table: ArithTable, f: DenseArithFn, N: Optional[int] = None,
                              tol_scale: float = 1.0) -> VerificationReport:
    """f(n) log n + (Lambda * f)(n) = sum over d | n of mu(d) log(n/d) F(n/d), F = f * 1"""
    N = f.limit if N is None else N
    table.require(N)
    f = f.truncated(N)
    f_real = DenseArithFn(f.values, name=f.name)
    log_n = DenseArithFn.log(N).values
    lhs = f_real.values * log_n + dirichlet_convolve(table.lambda_fn(N), f_real).values
    big_f = dirichlet_convolve(f_real, DenseArithFn.one(N))
    weighted = DenseArithFn(log_n * big_f.values, name='log*F')
    rhs = dirichlet_convolve(table.mu_fn(N), weighted).values
    return _scaled_report(f"weighted_inversion[{f.name}]", N, lhs - rhs, 1.0 + np.abs(lhs),
                          1e-7 * tol_scale)


def verify_sieve_oracle(table: ArithTable, N: int) -> VerificationReport:
    """Sieved mu equals the recursive definition on 1..N"""
    table.require(N)
    recursive = np.array([0] + [mobius_recursive(n) for n in range(1, N + 1)], dtype=np.int64)
    diff = table.mu[:N + 1].astype(np.int64) - recursive
    return _scaled_report('mu_sieve=mu_recursive', N, diff, np.ones(N + 1), 0.0)


def verify_multiplicativity(table: ArithTable, rng: np.random.Generator,
                            trials: int = 1000) -> VerificationReport:
    """mu(nm) = mu(n) mu(m) on random coprime pairs with nm <= N"""
    N = table.limit
    checked, violations, products = 0, [], []
    attempts = 0
    while checked < trials and attempts < 50 * trials and N >= 2:
        attempts += 1
        n = int(rng.integers(1, max(2, math.isqrt(N)) + 1))
        m = int(rng.integers(1, N // n + 1))
        if math.gcd(n, m) != 1:
            continue
        checked += 1
        products.append(n * m)
        violations.append(abs(int(table.mu[n * m]) - int(table.mu[n]) * int(table.mu[m])))
    return VerificationReport.from_violations(
        'mu_multiplicative', products, violations, 0.0,
        range_desc=f"{checked} coprime pairs, nm <= {N}",
    )


def _random_function(rng: np.random.Generator, N: int, exact: bool, name: str) -> DenseArithFn:
    if exact:
        return DenseArithFn(rng.integers(-5, 6, size=N + 1), exact=True, name=name)
    return DenseArithFn(rng.uniform(-1.0, 1.0, size=N + 1), name=name)


def verify_convolution_laws(N: int, rng: np.random.Generator, exact: bool,
                            tol_scale: float = 1.0) -> List[VerificationReport]:
    """Commutativity and associativity on a random triple"""
    f, g, h = (_random_function(rng, N, exact, name) for name in 'fgh')
    tolerance = 0.0 if exact else 1e-9 * tol_scale

    fg = dirichlet_convolve(f, g)
    gf = dirichlet_convolve(g, f)
    left = dirichlet_convolve(fg, h)
    right = dirichlet_convolve(f, dirichlet_convolve(g, h))

    kind = 'int' if exact else 'real'
    if exact:
        comm_scale = assoc_scale = np.ones(N + 1)
    else:
        comm_scale = 1.0 + np.abs(fg.values)
        assoc_scale = 1.0 + np.abs(left.values)
    return [
        _scaled_report(f'commutative[{kind}]', N, fg.values - gf.values, comm_scale, tolerance),
        _scaled_report(f'associative[{kind}]', N, left.values - right.values, assoc_scale, tolerance),
    ]


def verify_value_bounds(table: ArithTable, k: Optional[DenseArithFn] = None) -> List[VerificationReport]:
    """|mu(n)| <= 1, Lambda(n) >= 0 and K(n) >= 0 on 1..N"""
    N = table.limit
    n = np.arange(1, N + 1)
    k = k if k is not None else k_function(table)
    range_desc = f"n in [1, {N}]"
    return [
        VerificationReport.from_violations(
            '|mu|<=1', n, np.maximum(np.abs(table.mu[1:].astype(np.int64)) - 1, 0), 0.0, range_desc),
        VerificationReport.from_violations('Lambda>=0', n, np.maximum(-table.lam[1:], 0.0), 0.0, range_desc),
        VerificationReport.from_violations('K>=0', n, np.maximum(-k.values[1:], 0.0), 0.0, range_desc),
    ]
