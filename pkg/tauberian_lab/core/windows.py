"""
Exponential substitution s(t) = e^-t g(e^t) and the grid-measure machinery on its windows
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainError, PreconditionError, RangeLimitError
from .reports import VerificationReport
from .tauberian import TauberianInstance

logger = logging.getLogger(__name__)

MAX_DELTA = 1e-2

# relative slack for comparisons between separately rounded quantities
_REL_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class ExpProfile:
    """s sampled at t = 0, delta, 2 delta, ..., with the constants M and M'"""
    s: np.ndarray
    delta: float
    M: float
    M_prime: float
    label: str = ''
    exact_integrals: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError(f"delta must be > 0, got {self.delta}")
        if self.s.ndim != 1 or self.s.size < 2:
            raise DomainError("a profile needs at least two samples")
        if not np.all(np.isfinite(self.s)):
            raise DomainError("profile samples must be finite")
        if self.M < 0 or self.M_prime < 0:
            raise DomainError(f"M and M' must be >= 0, got {self.M}, {self.M_prime}")
        self.s.flags.writeable = False

    @classmethod
    def from_samples(cls, s: Sequence[float], delta: float, M: float,
                     M_prime: Optional[float] = None, label: str = '') -> 'ExpProfile':
        """Profile of a piecewise-constant s, constant on each [t_i, t_i + delta)"""
        samples = np.array(s, dtype=np.float64)
        if M_prime is None:
            M_prime = float(np.max(np.abs(_left_integrals(samples, delta))))
        return cls(samples, float(delta), float(M), float(M_prime), label)

    @property
    def size(self) -> int:
        return self.s.size

    @property
    def T(self) -> float:
        return self.delta * (self.s.size - 1)

    @property
    def ts(self) -> np.ndarray:
        return np.arange(self.s.size) * self.delta

    def k(self, M: Optional[float] = None) -> np.ndarray:
        """k(t) = e^t (s(t) + M)"""
        M = self.M if M is None else M
        return np.exp(self.ts) * (self.s + M)

    def integrals(self) -> np.ndarray:
        """int_0^t s at each grid point; left sums unless the exact values are known"""
        if self.exact_integrals is not None:
            return self.exact_integrals
        return _left_integrals(self.s, self.delta)

    def limsup_proxy(self) -> float:
        """max |s| over the last quarter of the domain"""
        start = int(0.75 * (self.s.size - 1))
        return float(np.max(np.abs(self.s[start:])))

    def index(self, t: float) -> int:
        return int(round(t / self.delta))


def _left_integrals(s: np.ndarray, delta: float) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(s[:-1]) * delta))


def exp_transform(inst: TauberianInstance, T: float, delta: float) -> ExpProfile:
    """s(t) = e^-t (f(e^t) - A e^t) on [0, T]; M = A and M' = max over the grid of |int_1^{e^t} g/u^2|"""
    if T <= 0:
        raise DomainError(f"T must be > 0, got {T}")
    if not 0 < delta <= MAX_DELTA:
        raise DomainError(f"delta must lie in (0, {MAX_DELTA}], got {delta}")
    count = int(math.floor(T / delta + 1e-9)) + 1
    ts = np.arange(count) * delta
    us = np.exp(ts)
    if us[-1] >= inst.domain_end:
        raise RangeLimitError(f"e^T = {us[-1]:g} lies beyond the instance's tabulated range",
                              limit=inst.domain_end)

    s = inst.f(us) / us - inst.A
    inner = inst.f.integral_g_over_t2(inst.A, us)
    M_prime = float(np.max(np.abs(inner)))
    logger.debug(f"Profile for {inst.label.value}: {count} samples, M'={M_prime:.6g}")
    return ExpProfile(s, float(delta), float(inst.A), M_prime, inst.label.value, exact_integrals=inner)


def check_condition_s1(profile: ExpProfile, M: Optional[float] = None) -> VerificationReport:
    """k(t) = e^t (s(t) + M) non-decreasing across consecutive grid points within 1e-9 e^t"""
    M = profile.M if M is None else M
    k = profile.k(M)
    ts = profile.ts
    drops = np.maximum(k[:-1] - k[1:], 0.0) / np.exp(ts[1:])
    tolerance = 1e-9
    failing = np.flatnonzero(drops > tolerance)
    name = f"k_non_decreasing[M={M:g}]"
    range_desc = f"t in [0, {profile.T:g}]"
    if failing.size:
        first = int(failing[0])
        return VerificationReport(name, range_desc, float(np.max(drops)), float(ts[first + 1]), tolerance,
                                  notes=f"first drop between t={ts[first]:.6g} and t={ts[first + 1]:.6g}")
    return VerificationReport.from_violations(name, ts[1:], drops, tolerance, range_desc=range_desc)


class SBounds(NamedTuple):
    lower: float
    upper: float


def s_bounds(M: float, M_prime: float, h: float) -> SBounds:
    """
    -(2M' + M(e^h - 1 - h))/(e^h - 1) <= s(t) <= (2M' + M(e^-h - 1 + h))/(1 - e^-h)
    """
    if h <= 0:
        raise DomainError(f"h must be > 0, got {h}")
    if M < 0 or M_prime < 0:
        raise DomainError(f"M and M' must be >= 0, got {M}, {M_prime}")
    down = -math.expm1(-h)
    upper = (2.0 * M_prime + M * (math.expm1(-h) + h)) / down
    if h < 700.0:
        up = math.expm1(h)
        lower = -(2.0 * M_prime + M * (up - h)) / up
    else:
        # divide through by e^h
        decay = math.exp(-h)
        lower = -(2.0 * M_prime * decay + M * (1.0 - decay - h * decay)) / down
    return SBounds(lower, upper)


class TightestBounds(NamedTuple):
    lower: float
    h_lower: float
    upper: float
    h_upper: float


def tightest_s_bounds(M: float, M_prime: float, hs: Optional[Sequence[float]] = None) -> TightestBounds:
    """Largest lower and smallest upper bound over a log-spaced h grid"""
    hs = np.geomspace(1e-3, 1e3, 601) if hs is None else np.asarray(hs, dtype=np.float64)
    bounds = [s_bounds(M, M_prime, float(h)) for h in hs]
    lowers = np.array([b.lower for b in bounds])
    uppers = np.array([b.upper for b in bounds])
    i, j = int(np.argmax(lowers)), int(np.argmin(uppers))
    return TightestBounds(float(lowers[i]), float(hs[i]), float(uppers[j]), float(hs[j]))


@dataclass(frozen=True)
class WindowParams:
    """S > S1 >= S2 > 0 with e = log((S1 + M)/(S2 + M)) and h >= 2(e + M'/S1 + M'/S2)"""
    S: float
    S1: float
    S2: float
    M: float
    M_prime: float
    h: float

    def __post_init__(self):
        if not 0 < self.S2 <= self.S1 < self.S:
            raise PreconditionError('0 < S2 <= S1 < S', f"S={self.S}, S1={self.S1}, S2={self.S2}")
        if self.S2 + self.M <= 0:
            raise PreconditionError('S2 + M > 0')
        if self.h < self.min_h(self.S1, self.S2, self.M, self.M_prime) * (1.0 - _REL_SLACK):
            raise PreconditionError('h >= 2(e + M\'/S1 + M\'/S2)',
                                    f"h={self.h}, minimum {self.min_h(self.S1, self.S2, self.M, self.M_prime)}")

    @property
    def e(self) -> float:
        return math.log((self.S1 + self.M) / (self.S2 + self.M))

    @staticmethod
    def min_h(S1: float, S2: float, M: float, M_prime: float) -> float:
        e = math.log((S1 + M) / (S2 + M))
        return 2.0 * (e + M_prime / S1 + M_prime / S2)

    @classmethod
    def minimal(cls, S: float, S1: float, S2: float, M: float, M_prime: float) -> 'WindowParams':
        return cls(S, S1, S2, M, M_prime, cls.min_h(S1, S2, M, M_prime))

    @classmethod
    def for_profile(cls, profile: ExpProfile, s1_fraction: float = 0.8,
                    s2_fraction: float = 0.4) -> 'WindowParams':
        """S from the profile's limsup proxy, S1 and S2 as fractions of it, minimal h"""
        S = profile.limsup_proxy()
        if S <= 0:
            raise PreconditionError('S > 0', f"profile {profile.label} vanishes on its last quarter")
        return cls.minimal(S, s1_fraction * S, s2_fraction * S, profile.M, profile.M_prime)


class Window(NamedTuple):
    lo: int
    hi: int
    clipped: bool


def window_indices(profile: ExpProfile, x: float, h: float, clip: bool = False) -> Window:
    """Grid indices of [x, x + h]; with clip the window is cut to [0, T]"""
    if x < 0:
        raise RangeLimitError(f"Window start {x:g} lies before t = 0", limit=profile.T)
    end = x + h
    clipped = end > profile.T * (1.0 + _REL_SLACK)
    if clipped and not clip:
        raise RangeLimitError(f"Window [{x:g}, {end:g}] leaves the profile", limit=profile.T)
    lo = int(math.ceil(x / profile.delta - 1e-9))
    hi = min(int(math.floor(end / profile.delta + 1e-9)), profile.size - 1)
    if lo > hi:
        raise RangeLimitError(f"Window start {x:g} lies beyond the profile", limit=profile.T)
    return Window(lo, hi, clipped)


def measure_E(profile: ExpProfile, x: float, params: WindowParams, clip: bool = False) -> float:
    """delta times the number of grid points t in [x, x + h] with |s(t)| <= S1"""
    window = window_indices(profile, x, params.h, clip)
    inside = np.abs(profile.s[window.lo:window.hi + 1]) <= params.S1
    return profile.delta * int(np.count_nonzero(inside))


class MeasureCheck(NamedTuple):
    measure: float
    bound: float
    passed: bool


def isoperimetric_check(ts: Sequence[float], k: Sequence[float], C1: float, C2: float) -> MeasureCheck:
    """
    Grid measure of {t : C2 e^t <= k(t) <= C1 e^t} against log(C1/C2), for non-decreasing
    k sampled on a uniform grid from t1 to t2.
    """
    ts = np.asarray(ts, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if ts.shape != k.shape or ts.size < 2:
        raise PreconditionError('k sampled on a grid of at least two points')
    if not C1 > C2 > 0:
        raise PreconditionError('C1 > C2 > 0', f"C1={C1}, C2={C2}")
    delta = float(ts[1] - ts[0])
    steps = np.diff(ts)
    if np.any(steps <= 0) or not np.allclose(steps, delta, rtol=1e-9, atol=0.0):
        raise PreconditionError('uniform increasing grid')

    upper = C1 * np.exp(ts)
    lower = C2 * np.exp(ts)
    if k[0] < upper[0] * (1.0 - _REL_SLACK):
        raise PreconditionError('k(t1) >= C1 e^t1', f"k(t1)={k[0]:.6g}, C1 e^t1={upper[0]:.6g}")
    if k[-1] > lower[-1] * (1.0 + _REL_SLACK):
        raise PreconditionError('k(t2) <= C2 e^t2', f"k(t2)={k[-1]:.6g}, C2 e^t2={lower[-1]:.6g}")
    if np.any(np.diff(k) < -1e-9 * np.abs(k[1:])):
        raise PreconditionError('k non-decreasing')

    between = (k >= lower * (1.0 - _REL_SLACK)) & (k <= upper * (1.0 + _REL_SLACK))
    measure = delta * int(np.count_nonzero(between))
    bound = math.log(C1 / C2)
    return MeasureCheck(measure, bound, measure >= bound - 2.0 * delta)


def corollary_E2_check(profile: ExpProfile, t1: float, t2: float, params: WindowParams) -> MeasureCheck:
    """Measure of {t in [t1, t2] : S2 <= s(t) <= S1} against e, via k(t) = e^t (s(t) + M)"""
    i, j = profile.index(t1), profile.index(t2)
    if not 0 <= i <= j < profile.size:
        raise PreconditionError('0 <= t1 <= t2 <= T', f"t1={t1}, t2={t2}, T={profile.T}")
    s = profile.s
    if not s[i] >= params.S1 >= params.S2 >= s[j]:
        raise PreconditionError('s(t1) >= S1 >= S2 >= s(t2)',
                                f"s(t1)={s[i]:.6g}, S1={params.S1:.6g}, S2={params.S2:.6g}, s(t2)={s[j]:.6g}")
    if params.S2 + params.M <= 0:
        raise PreconditionError('S2 + M > 0')

    if params.S1 == params.S2:
        inside = (s[i:j + 1] >= params.S2) & (s[i:j + 1] <= params.S1)
        return MeasureCheck(profile.delta * int(np.count_nonzero(inside)), 0.0, True)
    ts = profile.ts[i:j + 1]
    k = np.exp(ts) * (s[i:j + 1] + params.M)
    return isoperimetric_check(ts, k, params.S1 + params.M, params.S2 + params.M)


def find_crossing_pairs(profile: ExpProfile, S1: float, S2: float,
                        limit: Optional[int] = None) -> List[Tuple[float, float]]:
    """
    Disjoint (t1, t2) with s(t1) >= S1, s(t2) <= S2 and t1 < t2; t1 is the last point at
    or above S1 before the first point at or below S2.
    """
    pairs = []
    last_high = None
    for i, value in enumerate(profile.s):
        if value >= S1:
            last_high = i
        elif value <= S2 and last_high is not None:
            pairs.append((last_high * profile.delta, i * profile.delta))
            last_high = None
            if limit is not None and len(pairs) >= limit:
                break
    return pairs


class Branch(str, Enum):
    MEASURE = 'I'
    CROSSING = 'II'
    INCONCLUSIVE = 'INCONCLUSIVE'
    COUNTEREXAMPLE = 'COUNTEREXAMPLE'


@dataclass(frozen=True)
class DichotomyResult:
    branch: Branch
    x: float
    measure: float
    t1: Optional[float] = None
    t2: Optional[float] = None
    notes: str = ''

    @property
    def found(self) -> bool:
        return self.branch in (Branch.MEASURE, Branch.CROSSING)


def lemma_E1_dichotomy(profile: ExpProfile, x: float, params: WindowParams,
                       clip: bool = False) -> DichotomyResult:
    """
    Either |s| <= S1 on measure >= e of [x, x + h] (branch I), or some t1 < t2 in the window
    has s(t1) >= S1 and s(t2) <= S2 (branch II). Thresholds are relaxed by 2 delta times the
    largest adjacent-sample difference in the window.
    """
    if params.e <= 0:
        raise PreconditionError('e > 0', 'S1 must exceed S2')
    window = window_indices(profile, x, params.h, clip)
    measure = measure_E(profile, x, params, clip)
    delta = profile.delta
    if measure >= params.e - 2.0 * delta:
        return DichotomyResult(Branch.MEASURE, x, measure)

    s = profile.s[window.lo:window.hi + 1]
    relax = 2.0 * delta * (float(np.max(np.abs(np.diff(s)))) if s.size > 1 else 0.0)
    lows = np.flatnonzero(s <= params.S2 + relax)
    if lows.size:
        j = int(lows[-1])
        highs = np.flatnonzero(s[:j] >= params.S1 - relax)
        if highs.size:
            i = int(highs[-1])
            return DichotomyResult(Branch.CROSSING, x, measure,
                                   t1=(window.lo + i) * delta, t2=(window.lo + j) * delta)

    if window.clipped:
        return DichotomyResult(Branch.INCONCLUSIVE, x, measure,
                               notes=f"window clipped at T={profile.T:g}")
    worst = float(np.max(np.abs(profile.integrals())))
    if worst > profile.M_prime * (1.0 + _REL_SLACK):
        cause = f"profile violates |int_0^x s| <= M' ({worst:.6g} > {profile.M_prime:.6g})"
    else:
        cause = 'integral bound holds; dichotomy search failed'
    logger.warning(f"No branch found for window at x={x:g}: {cause}")
    return DichotomyResult(Branch.COUNTEREXAMPLE, x, measure, notes=cause)


def window_measure_report(profile: ExpProfile, params: WindowParams, positions: Sequence[float],
                          clip: bool = True) -> VerificationReport:
    """measure_E >= e - 2 delta at each window position"""
    shortfalls = []
    for x in positions:
        shortfalls.append(max(0.0, params.e - measure_E(profile, x, params, clip)))
    return VerificationReport.from_violations(
        f"window_measure[{profile.label}]", positions, shortfalls, 2.0 * profile.delta,
        notes=f"e={params.e:.6g}, h={params.h:.6g}, clipped to T={profile.T:g}" if clip else f"e={params.e:.6g}",
    )


def dichotomy_report(profile: ExpProfile, params: WindowParams, positions: Sequence[float],
                     clip: bool = True) -> Tuple[VerificationReport, List[DichotomyResult]]:
    """One row per window position; only COUNTEREXAMPLE counts as a violation"""
    results = [lemma_E1_dichotomy(profile, x, params, clip) for x in positions]
    violations = [1.0 if r.branch is Branch.COUNTEREXAMPLE else 0.0 for r in results]
    counts = {branch: sum(r.branch is branch for r in results) for branch in Branch}
    notes = ', '.join(f"{branch.value}={count}" for branch, count in counts.items())
    report = VerificationReport.from_violations(
        f"lemma_E1[{profile.label}]", positions, violations, 0.0, notes=notes,
    )
    return report, results


def corollary_report(profile: ExpProfile, params: WindowParams,
                     pairs: Sequence[Tuple[float, float]]) -> VerificationReport:
    """Corollary check at every crossing pair; violation is the shortfall below e - 2 delta"""
    shortfalls = []
    for t1, t2 in pairs:
        check = corollary_E2_check(profile, t1, t2, params)
        shortfalls.append(max(0.0, check.bound - check.measure))
    return VerificationReport.from_violations(
        f"corollary_E2[{profile.label}]", [t1 for t1, _ in pairs], shortfalls, 2.0 * profile.delta,
        notes=f"{len(pairs)} crossing pairs",
    )


def average_bound_report(profile: ExpProfile, params: WindowParams,
                         s_hat: Optional[float] = None) -> VerificationReport:
    """
    (1/x) int_0^x |s| <= (1 - e/h) S_hat + (e/h) S1 + 4M'/x on the last quarter of the
    domain, where S_hat (default: the limsup proxy) bounds |s|.
    """
    s_hat = profile.limsup_proxy() if s_hat is None else s_hat
    ratio = params.e / params.h
    start = max(1, int(0.75 * (profile.size - 1)))
    ts = profile.ts[start:]
    averages = _left_integrals(np.abs(profile.s), profile.delta)[start:] / ts
    bound = (1.0 - ratio) * s_hat + ratio * params.S1 + 4.0 * profile.M_prime / ts
    return VerificationReport.from_violations(
        f"average_bound[{profile.label}]", ts, np.maximum(averages - bound, 0.0), 0.0,
        notes=f"S_hat={s_hat:.6g}, e/h={ratio:.6g}",
    )


def random_isoperimetric_fixture(rng: np.random.Generator, delta: float = 1e-3
                                 ) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """
    Non-decreasing random step k on [0, t2] with k(0) >= C1 and k(t2) <= C2 e^t2.
    t2 is log(k_final/C2) plus a random margin, rounded up to the grid.
    """
    C2 = float(rng.uniform(0.5, 2.0))
    C1 = C2 * math.exp(float(rng.uniform(0.05, 1.5)))
    k0 = C1 * (1.0 + 0.5 * float(rng.uniform()))
    jumps = rng.exponential(0.3 * C1, size=int(rng.integers(0, 8)))
    k_final = k0 + float(np.sum(jumps))
    t2 = math.log(k_final / C2) + float(rng.uniform(0.0, 1.0))
    count = int(math.ceil(t2 / delta)) + 1
    ts = np.arange(count) * delta

    k = np.full(count, k0)
    for position, size in zip(rng.integers(1, count, size=jumps.size), jumps):
        k[position:] += size
    return ts, k, C1, C2


def _paired_blocks(rng: np.random.Generator, cells: int, max_block: int) -> Tuple[np.ndarray, float, float]:
    """Blocks +a then -a (or the reverse) of equal length, with zero gaps: |int_0^t s| <= max a L"""
    s = np.zeros(cells)
    position, bound, top = 0, 0.0, 0.0
    while position < cells:
        kind = rng.uniform()
        length = int(rng.integers(1, max_block + 1))
        if kind < 0.25:
            position += length
            continue
        amplitude = float(rng.uniform(0.2, 3.0))
        sign = 1.0 if kind < 0.625 else -1.0
        first = slice(position, min(position + length, cells))
        second = slice(min(position + length, cells), min(position + 2 * length, cells))
        s[first] = sign * amplitude
        s[second] = -sign * amplitude
        bound = max(bound, amplitude * length)
        top = max(top, amplitude)
        position += 2 * length
    return s, bound, top


def random_dichotomy_fixture(rng: np.random.Generator, delta: float = 1e-2
                             ) -> Tuple[ExpProfile, float, WindowParams]:
    """
    Profile whose running integral is bounded by construction, a grid-aligned x and
    parameters with the minimal admissible h; the profile extends past x + h.
    """
    max_block = int(rng.integers(5, 200))
    M = float(rng.uniform(0.0, 2.0))
    S1 = float(rng.uniform(0.2, 2.5))
    S2 = S1 * float(rng.uniform(0.1, 0.9))
    x_cells = int(rng.integers(0, 500))
    # M' is at most 3 * max_block * delta; size the profile for that bound
    cells = x_cells + int(math.ceil(WindowParams.min_h(S1, S2, M, 3.0 * max_block * delta) / delta)) + 2 * max_block + 2

    s, bound, top = _paired_blocks(rng, cells, max_block)
    M_prime = bound * delta
    profile = ExpProfile.from_samples(s, delta, M, M_prime=M_prime, label='fixture')
    params = WindowParams.minimal(max(top, S1) * 1.25 + 1.0, S1, S2, M, M_prime)
    return profile, x_cells * delta, params


def fixture_reports(rng: np.random.Generator, trials: int = 500) -> List[VerificationReport]:
    """isoperimetric_check and lemma_E1_dichotomy over seeded random fixtures"""
    shortfalls, locations = [], []
    for trial in range(trials):
        ts, k, C1, C2 = random_isoperimetric_fixture(rng)
        check = isoperimetric_check(ts, k, C1, C2)
        shortfalls.append(max(0.0, check.bound - check.measure))
        locations.append(trial)
    iso = VerificationReport.from_violations(
        'isoperimetric[fixtures]', locations, shortfalls, 2e-3, range_desc=f"{trials} trials",
    )

    misses = []
    for trial in range(trials):
        profile, x, params = random_dichotomy_fixture(rng)
        result = lemma_E1_dichotomy(profile, x, params)
        misses.append(0.0 if result.found else 1.0)
    dichotomy = VerificationReport.from_violations(
        'lemma_E1[fixtures]', locations, misses, 0.0, range_desc=f"{trials} trials",
    )
    return [iso, dichotomy]


def s_bounds_report(profile: ExpProfile, hs: Optional[Sequence[float]] = None) -> VerificationReport:
    """
    s against the tightest bounds: the upper one at every t, the lower one for t >= h,
    since it integrates over [t - h, t]. M' is widened by delta max|s| for the grid.
    """
    M_prime = profile.M_prime + profile.delta * float(np.max(np.abs(profile.s)))
    tight = tightest_s_bounds(profile.M, M_prime, hs)
    ts = profile.ts
    above = np.maximum(profile.s - tight.upper, 0.0)
    below = np.where(ts >= tight.h_lower, np.maximum(tight.lower - profile.s, 0.0), 0.0)
    return VerificationReport.from_violations(
        f"s_bounds[{profile.label}]", ts, np.maximum(above, below), 1e-12,
        notes=f"lower={tight.lower:.6g} (h={tight.h_lower:.3g}), upper={tight.upper:.6g} (h={tight.h_upper:.3g})",
    )
