"""
Suite service: one static method per command, building tables, running checks and writing results
"""
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from tauberian_lab.core.arith import (
    ArithTable, DenseArithFn, build_arith_table, k_function, verify_convolution_laws,
    verify_mangoldt_definition, verify_mangoldt_sum, verify_mobius_unit, verify_multiplicativity,
    verify_selberg, verify_sieve_oracle, verify_value_bounds, verify_weighted_inversion,
)
from tauberian_lab.core.config import RunConfig
from tauberian_lab.core.estimates import (
    Constants, ElementaryKind, MobiusKind, c_integral_form, compute_c, compute_gamma,
    divisor_series, elementary_series, erdos_karamata_series, gamma_partial_sum, mobius_series,
    u_series, verify_mu1_bound,
)
from tauberian_lab.core.exceptions import DomainError, PreconditionError
from tauberian_lab.core.reports import RemainderSeries, VerificationReport
from tauberian_lab.core.summatory import (
    chebyshev_sandwich, divisor_summatory, mertens_sieve, mertens_sublinear, pnt_ratio_series,
    prime_count, psi_sieve, psi_sublinear, verify_divisor_hyperbola, verify_mertens_inversion,
    verify_sublinear_agreement,
)
from tauberian_lab.core.tauberian import (
    TauberianInstance, build_instance, doubling_series, hypothesis_series, prop_estim_checks,
    prop_estim_series, tail_constant_series, theorem1_decay_report, theorem1_gap_report,
    theorem1_report, theorem1_series, weighted_inversion_residual,
)
from tauberian_lab.core.transforms import RealFn, StepFunction, verify_inversion_roundtrip, verify_tatuzawa_iseki
from tauberian_lab.core.windows import (
    WindowParams, average_bound_report, check_condition_s1, corollary_report, dichotomy_report,
    exp_transform, find_crossing_pairs, fixture_reports, s_bounds_report, window_measure_report,
)

from .tasks import SuiteTask, run_tasks
from .writers import write_reports, write_series

logger = logging.getLogger(__name__)

# oracle checks with quadratic or per-point cost run up to here
ORACLE_LIMIT = 10_000
INVERSION_POINTS = 50
AGREEMENT_POINTS = 200
WINDOW_POSITIONS = 20
MAX_CROSSING_PAIRS = 50
FIXTURE_TRIALS = 500


class TimedValue(NamedTuple):
    name: str
    value: float
    oracle: Optional[float]
    seconds: float


@dataclass
class SuiteOutcome:
    suite: str
    reports: List[VerificationReport] = field(default_factory=list)
    series: List[RemainderSeries] = field(default_factory=list)
    values: List[TimedValue] = field(default_factory=list)
    files: List[Path] = field(default_factory=list)

    @property
    def failures(self) -> List[VerificationReport]:
        return [report for report in self.reports if not report.passed]

    @property
    def passed(self) -> bool:
        return not self.failures


def _log_points(lo: float, hi: float, count: int) -> List[float]:
    if hi <= lo:
        return [float(hi)]
    return sorted(set(float(p) for p in np.geomspace(lo, hi, count)))


def _inversion_family(table: ArithTable, N: int) -> List[RealFn]:
    """1, id, psi and M + floor as real functions exact on [1, N]"""
    psi = StepFunction.from_arith(table.lam[:N + 1], name='psi')
    mertens_floor = StepFunction.from_arith(table.mu[:N + 1].astype(np.float64) + 1.0, name='M+floor')
    return [RealFn.constant_one(), RealFn.identity(), RealFn.step(psi), RealFn.step(mertens_floor)]


class SuiteService:
    """Service running the verification suites"""

    @staticmethod
    def constants(config: RunConfig) -> Tuple[Constants, List[VerificationReport]]:
        """gamma and c at the configured term counts, with their cross-checks"""
        try:
            gamma = compute_gamma(config.gamma_terms)
            c = compute_c(config.c_terms)
            constants = Constants(gamma=gamma, c=c)

            gamma_alt = gamma_partial_sum(config.gamma_terms, accelerated=True)
            gamma_plain = gamma_partial_sum(config.gamma_terms)
            c_coarse = compute_c(max(1, config.c_terms // 10))
            integral_terms = max(2, config.gamma_terms)
            c_integral = c_integral_form(integral_terms)
            reports = [
                VerificationReport('gamma_two_formulas', f"N={config.gamma_terms}", abs(gamma - gamma_alt),
                                   config.gamma_terms, 1e-12, notes=f"gamma={gamma:.15g}"),
                VerificationReport('gamma_partial_sum', f"N={config.gamma_terms}", abs(gamma_plain - gamma),
                                   config.gamma_terms, 1.0 / (2 * config.gamma_terms),
                                   notes='unaccelerated sum, error below 1/(2N)'),
                VerificationReport('c_stable', f"N={max(1, config.c_terms // 10)} vs {config.c_terms}",
                                   abs(c - c_coarse), config.c_terms, 1e-9, notes=f"c={c:.15g}"),
                VerificationReport('c_integral_form', f"N={integral_terms}", abs(c - c_integral),
                                   integral_terms, 1e-9),
            ]
            logger.info(f"Constants: gamma={gamma:.15g}, c={c:.15g}")
            return constants, reports
        except Exception as e:
            logger.error(f"Failed to compute constants: {e}")
            raise

    @staticmethod
    def write_outcome(outcome: SuiteOutcome, config: RunConfig) -> SuiteOutcome:
        """Series files then the report file, serialized in the calling thread"""
        try:
            out_dir = Path(config.out)
            for series in outcome.series:
                outcome.files.append(write_series(out_dir, outcome.suite, series, config.format))
            outcome.files.append(write_reports(out_dir, outcome.suite, outcome.reports, config.format))
            logger.info(f"Suite {outcome.suite}: wrote {len(outcome.files)} files to {out_dir}")
            return outcome
        except Exception as e:
            logger.error(f"Failed to write {outcome.suite} results to {config.out}: {e}")
            raise

    @staticmethod
    def cmd_identities(config: RunConfig) -> SuiteOutcome:
        """Exact identities up to limit, oracle comparisons and inversion round-trips"""
        try:
            N = config.limit
            table = build_arith_table(N, cap=config.table_cap)
            rng = np.random.default_rng(config.seed)
            small = min(N, ORACLE_LIMIT)

            # random draws stay on this thread so the seed fixes them
            reports = [verify_multiplicativity(table, rng)]
            reports += verify_convolution_laws(small, rng, exact=True)
            reports += verify_convolution_laws(small, rng, exact=False, tol_scale=config.tol_scale)

            tasks = [
                SuiteTask('mu*1', verify_mobius_unit, (table, N)),
                SuiteTask('Lambda*1', verify_mangoldt_sum, (table, N, config.tol_scale)),
                SuiteTask('selberg', verify_selberg, (table, N, config.tol_scale)),
                SuiteTask('Lambda_def', verify_mangoldt_definition, (table, N)),
                SuiteTask('weighted_inversion[one]', verify_weighted_inversion,
                          (table, DenseArithFn.one(N)), {'tol_scale': config.tol_scale}),
                SuiteTask('weighted_inversion[mu]', verify_weighted_inversion,
                          (table, table.mu_fn(N)), {'tol_scale': config.tol_scale}),
                SuiteTask('sieve_oracle', verify_sieve_oracle, (table, small)),
                SuiteTask('value_bounds', verify_value_bounds, (table, k_function(table))),
            ]
            xs = _log_points(1.0, float(small), INVERSION_POINTS)
            for f in _inversion_family(table, small):
                tasks.append(SuiteTask(f"roundtrip[{f.label}]", verify_inversion_roundtrip,
                                       (f, xs, table, config.tol_scale)))
                tasks.append(SuiteTask(f"tatuzawa_iseki[{f.label}]", verify_tatuzawa_iseki,
                                       (f, xs, table, config.tol_scale)))

            for result in run_tasks(tasks, config.workers):
                reports += result if isinstance(result, list) else [result]

            outcome = SuiteOutcome('identities', reports=reports)
            return SuiteService.write_outcome(outcome, config)
        except Exception as e:
            logger.error(f"Failed to run identities suite: {e}")
            raise

    @staticmethod
    def cmd_estimates(config: RunConfig) -> SuiteOutcome:
        """Remainder series for the elementary, Mobius, Erdos-Karamata, U and divisor estimates"""
        try:
            table = build_arith_table(config.limit, cap=config.table_cap)
            constants, reports = SuiteService.constants(config)
            xs = [x for x in config.sample_points(upper=config.limit) if x >= 2]
            k = k_function(table)

            tasks = [SuiteTask(kind.value, elementary_series, (kind, xs, constants)) for kind in ElementaryKind]
            tasks += [SuiteTask(kind.value, mobius_series, (kind, xs, table)) for kind in MobiusKind]
            tasks += [
                SuiteTask('EK', erdos_karamata_series, (xs, table, k.values)),
                SuiteTask('U', u_series, (xs, table)),
                SuiteTask('divisor', divisor_series, (xs, constants)),
            ]
            series = run_tasks(tasks, config.workers)

            reports.append(verify_mu1_bound(table))
            reports += [s.trend_report() for s in series]
            outcome = SuiteOutcome('estimates', reports=reports, series=list(series))
            return SuiteService.write_outcome(outcome, config)
        except Exception as e:
            logger.error(f"Failed to run estimates suite: {e}")
            raise

    @staticmethod
    def window_checks(inst: TauberianInstance, config: RunConfig) -> List[VerificationReport]:
        """Profile on [0, log limit]: monotonicity of k, s bounds, windows, crossings, averages"""
        try:
            if config.limit < 3:
                logger.info(f"Limit {config.limit} leaves no room for a profile, skipping window checks")
                return []
            profile = exp_transform(inst, math.log(config.limit), config.delta)
            reports = [check_condition_s1(profile), s_bounds_report(profile)]
            try:
                params = WindowParams.for_profile(profile)
            except PreconditionError as e:
                logger.warning(f"Skipping window checks for {inst.label.value}: {e}")
                return reports

            positions = [float(p) for p in np.linspace(0.0, 0.95 * profile.T, WINDOW_POSITIONS)]
            dichotomy, _ = dichotomy_report(profile, params, positions, clip=True)
            pairs = find_crossing_pairs(profile, params.S1, params.S2, limit=MAX_CROSSING_PAIRS)
            reports += [
                window_measure_report(profile, params, positions, clip=True),
                dichotomy,
                corollary_report(profile, params, pairs),
                average_bound_report(profile, params),
            ]
            return reports
        except Exception as e:
            logger.error(f"Failed to run window checks for {inst.label.value}: {e}")
            raise

    @staticmethod
    def cmd_tauberian(config: RunConfig, label: Optional[str] = None) -> SuiteOutcome:
        """Theorem-1 harness, boundedness checks and the window machinery for one instance"""
        try:
            label = label or config.label
            table = build_arith_table(config.limit, cap=config.table_cap)
            constants = Constants(gamma=compute_gamma(config.gamma_terms), c=compute_c(config.c_terms))
            inst = build_instance(label, table, constants)
            name = inst.label.value
            xs = [x for x in config.sample_points(upper=config.limit) if x > 1]

            rows = theorem1_report(inst, xs)
            reports = [theorem1_gap_report(rows, label=name), theorem1_decay_report(rows, label=name)]
            reports += prop_estim_checks(inst, xs)

            tasks = [
                SuiteTask('weighted_inversion', weighted_inversion_residual, (inst, xs, table)),
                SuiteTask('hypothesis', hypothesis_series, (inst, xs)),
                SuiteTask('tail_constant', tail_constant_series, (inst, xs, constants)),
                SuiteTask('doubling', doubling_series, (inst, xs)),
            ]
            checked = run_tasks(tasks, config.workers)
            reports += [s.trend_report() for s in checked]

            reports += SuiteService.window_checks(inst, config)
            reports += fixture_reports(np.random.default_rng(config.seed), FIXTURE_TRIALS)

            series = [theorem1_series(rows, name), *prop_estim_series(inst, xs), *checked]
            outcome = SuiteOutcome(f"tauberian_{name}", reports=reports, series=series)
            return SuiteService.write_outcome(outcome, config)
        except Exception as e:
            logger.error(f"Failed to run tauberian suite: {e}")
            raise

    @staticmethod
    def timed_values(x: float, table: ArithTable) -> List[TimedValue]:
        """M, psi, pi and D at x, each timed, next to the sieve prefix sums"""
        v = int(math.floor(x))
        measured = []
        for name, compute, oracle in (
            ('M', lambda: mertens_sublinear(x), lambda: float(mertens_sieve(v, table)[v])),
            ('psi', lambda: psi_sublinear(x), lambda: float(psi_sieve(v, table)[v])),
            ('pi', lambda: prime_count(x, table) if x >= 2 else 0, lambda: None),
            ('D', lambda: divisor_summatory(x), lambda: None),
        ):
            started = time.perf_counter()
            value = float(compute())
            elapsed = time.perf_counter() - started
            measured.append(TimedValue(name, value, oracle(), elapsed))
        return measured

    @staticmethod
    def cmd_summatory(config: RunConfig, x: Optional[float] = None) -> SuiteOutcome:
        """Sublinear values at x, oracle agreement and the prime number theorem ratios"""
        try:
            x = config.max_x if x is None else float(x)
            if x < 1:
                raise DomainError(f"x must be >= 1, got {x}")
            v = int(math.floor(x))
            table = build_arith_table(v, cap=config.table_cap)
            small = min(v, ORACLE_LIMIT)

            values = SuiteService.timed_values(x, table)
            reports = verify_sublinear_agreement(_log_points(1.0, x, AGREEMENT_POINTS), table, config.tol_scale)
            reports += [
                verify_mertens_inversion(_log_points(1.0, float(small), INVERSION_POINTS), table),
                verify_divisor_hyperbola(small),
            ]

            series: Sequence[RemainderSeries] = ()
            if x >= 2:
                points = [p for p in config.sample_points(upper=x) if p >= 2]
                series = pnt_ratio_series(points, table)
                reports.append(chebyshev_sandwich(points, table))

            outcome = SuiteOutcome('summatory', reports=reports, series=list(series), values=values)
            return SuiteService.write_outcome(outcome, config)
        except Exception as e:
            logger.error(f"Failed to run summatory suite at x={x}: {e}")
            raise
