"""
Multistart simplex search for near-extremal pole configurations.

A configuration of k poles with fixed multiplicities and half-plane signs is
the vector (x_1..x_k, log y_1..log y_k). Decoding divides every coordinate by
min y, which pins Y(rho) = 1; the functionals are invariant under rescaling,
so this only removes the degenerate scale direction.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.optimize import minimize

from apps.bounds.services import theorem1_check, theorem2_check
from apps.core.exceptions import DomainError, SPFLabError
from apps.core.models import SPF
from apps.core.services import make_spf
from apps.norms.models import FunctionalKind
from apps.norms.services import functional

from .models import CertificateBundle, ScanRow, SearchConfig, SearchRecord

logger = logging.getLogger(__name__)

INITIAL_STEP = 0.5
MIN_STEP = 1e-6
STAGNATION_RTOL = 1e-10
VALUE_MISMATCH_RTOL = 1e-6
RATIO_FLOOR = 1e-3
CERTIFICATE_SUP_RTOL = 1e-12
CERTIFICATE_PANEL_TOL = 1e-13
TALL_POLE_HEIGHT = 1e6


def pole_signs(config: SearchConfig) -> np.ndarray:
    """+1/-1 per pole: conjugate pairs alternate, or all +1 in the upper-half regime."""
    count = len(config.multiplicity_pattern)
    if config.restrict_upper_half:
        return np.ones(count)
    return np.array([1.0 if j % 2 == 0 else -1.0 for j in range(count)])


def canonical_seed(config: SearchConfig) -> np.ndarray:
    """
    Pairs of conjugate poles at height 1 on a sinh-spaced horizontal grid
    (each pair shares an abscissa); upper-half runs spread every pole.
    """
    count = len(config.multiplicity_pattern)
    slots = count if config.restrict_upper_half else (count + 1) // 2
    grid = np.sinh(np.arange(slots) - (slots - 1) / 2.0)
    xs = grid if config.restrict_upper_half else np.repeat(grid, 2)[:count]
    return np.concatenate([xs, np.zeros(count)])


def decode(vector: np.ndarray, config: SearchConfig) -> SPF:
    """SPF of a parameter vector, gauge-fixed to Y = 1."""
    count = len(config.multiplicity_pattern)
    xs = np.asarray(vector[:count], dtype=float)
    ys = np.exp(np.asarray(vector[count:], dtype=float))
    scale = ys.min()
    locations = (xs + 1j * pole_signs(config) * ys) / scale
    return make_spf(zip(locations.tolist(), config.multiplicity_pattern))


def objective_value(vector: np.ndarray, config: SearchConfig, tolerance: Optional[float] = None) -> float:
    """The functional at a parameter vector; coincident or invalid poles give inf."""
    if not np.all(np.isfinite(vector)):
        return math.inf
    try:
        spf = decode(vector, config)
        return functional(spf, config.functional, config.p, tolerance).value
    except SPFLabError as exc:
        logger.debug(f"objective rejected point: {exc.__class__.__name__}: {exc}")
        return math.inf


@dataclass
class StartOutcome:
    index: int
    value: float
    vector: np.ndarray
    evals: int
    exhausted: bool
    history: List[Tuple[int, float]] = field(default_factory=list)


class _CountingObjective:
    def __init__(self, config: SearchConfig, tolerance: float, start: np.ndarray):
        self.config = config
        self.tolerance = tolerance
        self.evals = 0
        self.best_value = math.inf
        self.best_vector = np.array(start, dtype=float)
        self.history = []

    def __call__(self, vector):
        self.evals += 1
        value = objective_value(vector, self.config, self.tolerance)
        if value < self.best_value:
            self.best_value = value
            self.best_vector = np.array(vector, dtype=float)
            self.history.append((self.evals, value))
        return value


def _simplex(center: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([center] + [center + step * row for row in np.eye(center.size)])


def run_start(config: SearchConfig, index: int, tolerance: Optional[float] = None,
              initial: Optional[np.ndarray] = None) -> StartOutcome:
    """
    One start: Nelder-Mead with restarts from the incumbent on a shrinking
    simplex until the per-start budget is spent or a restart stops improving.

    Start 0 begins at `initial`, or at the canonical seed when there is none;
    the others at a perturbation of the canonical seed drawn from the stream
    SeedSequence([seed, index]).
    """
    if tolerance is None:
        tolerance = settings.SPFLAB_SEARCH_RTOL
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, index]))
    count = len(config.multiplicity_pattern)
    start = canonical_seed(config)
    if index == 0 and initial is not None:
        start = np.array(initial, dtype=float)
    elif index > 0:
        start = start + np.concatenate([rng.normal(0.0, 1.0, count), rng.normal(0.0, 0.5, count)])

    objective = _CountingObjective(config, tolerance, start)
    objective(start)
    step = INITIAL_STEP
    exhausted = False
    while step >= MIN_STEP:
        remaining = config.eval_budget - objective.evals
        if remaining <= 0:
            exhausted = True
            break
        before = objective.best_value
        result = minimize(
            objective, objective.best_vector, method='Nelder-Mead',
            options={
                'initial_simplex': _simplex(objective.best_vector, step),
                'maxfev': remaining,
                'xatol': 1e-10,
                'fatol': 1e-12 * max(1.0, before if math.isfinite(before) else 1.0),
                'adaptive': True,
            },
        )
        if objective.evals >= config.eval_budget and not result.success:
            exhausted = True
            break
        improved = math.isfinite(before) and before - objective.best_value > STAGNATION_RTOL * before
        if not improved:
            step /= 10.0

    logger.debug(f"start {index}: value {objective.best_value:.12g} after {objective.evals} evaluations")
    return StartOutcome(
        index=index,
        value=objective.best_value,
        vector=objective.best_vector,
        evals=objective.evals,
        exhausted=exhausted,
        history=objective.history,
    )


def reduce_starts(outcomes: Sequence[StartOutcome]) -> StartOutcome:
    """Minimum value, ties broken by the lower start index."""
    return min(outcomes, key=lambda outcome: (outcome.value, outcome.index))


def optimize(config: SearchConfig, tolerance: Optional[float] = None,
             initial: Optional[np.ndarray] = None) -> SearchRecord:
    """
    Multistart minimization of the configured functional; `initial`, if
    given, replaces the canonical seed of start 0.

    Starts run on a thread pool capped by SPFLAB_THREADS; each owns its random
    stream, so the record depends only on the config.
    """
    logger.info(
        f"Search n={config.order_n} pattern={list(config.multiplicity_pattern)} {config.functional} "
        f"p={config.p} starts={config.multistarts} budget={config.eval_budget} seed={config.seed}"
    )
    workers = max(1, min(settings.SPFLAB_THREADS, config.multistarts))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(
            lambda index: run_start(config, index, tolerance, initial), range(config.multistarts)
        ))

    best = reduce_starts(outcomes)
    best_spf = decode(best.vector, config)
    best_value = functional(best_spf, config.functional, config.p).value
    record = SearchRecord(
        best_spf=best_spf,
        best_value=best_value,
        history=tuple(best.history),
        config=config,
        wall_evals=sum(outcome.evals for outcome in outcomes),
        best_start=best.index,
        budget_exhausted=best.exhausted,
        best_vector=tuple(float(v) for v in best.vector),
    )
    if record.budget_exhausted:
        logger.warning(f"Search n={config.order_n}: winning start {best.index} exhausted its budget")
    logger.info(f"Search n={config.order_n} finished: best {best_value:.12g} from start {best.index}")
    return record


def warm_start_vector(previous: SearchRecord, config: SearchConfig) -> Optional[np.ndarray]:
    """
    The winner of a lower-order search padded to `config` with tall poles.

    Applies to sup-norm functionals when the previous multiplicity pattern is
    a prefix of the new one under the same sign rule; otherwise None. Added
    pole j gets height TALL_POLE_HEIGHT * (j + 1) times the previous minimum
    height, so on the real axis it contributes at most 1 / TALL_POLE_HEIGHT
    relative to the unit-height poles.
    """
    old = previous.config.multiplicity_pattern
    new = config.multiplicity_pattern
    compatible = (
        previous.best_vector and math.isinf(config.p) and len(new) > len(old) and new[:len(old)] == old
        and previous.config.restrict_upper_half == config.restrict_upper_half
    )
    if not compatible:
        return None
    vector = np.asarray(previous.best_vector, dtype=float)
    xs, log_ys = vector[:len(old)], vector[len(old):]
    extra = len(new) - len(old)
    tall = log_ys.min() + np.log(TALL_POLE_HEIGHT * np.arange(1, extra + 1))
    return np.concatenate([xs, np.full(extra, float(np.median(xs))), log_ys, tall])


def reference_rate(config: SearchConfig) -> Optional[float]:
    """ln ln n / ln n for Gorin, ln n / sqrt(n) for upper-half Gelfond, sqrt(ln n / n) otherwise."""
    n = config.order_n
    if config.functional == FunctionalKind.GORIN:
        return math.log(math.log(n)) / math.log(n) if n >= 4 else None
    if config.restrict_upper_half:
        return math.log(n) / math.sqrt(n)
    return math.sqrt(math.log(n) / n)


def scan_orders(n_list: Sequence[int], template: SearchConfig, pattern: str = 'ones',
                tolerance: Optional[float] = None, warm_start: bool = True) -> List[ScanRow]:
    """
    One search per order; rows carry best_value / reference_rate.

    With warm_start, start 0 of each order begins from the previous winner
    padded by warm_start_vector, which keeps best_value non-increasing along
    an increasing n_list.
    """
    rows = []
    previous = None
    for n in n_list:
        if n < 2:
            raise DomainError(f"Scan orders must be at least 2, got {n}.")
        config = replace(SearchConfig.for_pattern(pattern, n), **{
            key: getattr(template, key)
            for key in ('functional', 'p', 'restrict_upper_half', 'multistarts', 'eval_budget', 'seed')
        })
        initial = warm_start_vector(previous, config) if warm_start and previous is not None else None
        record = optimize(config, tolerance, initial)
        previous = record
        rate = reference_rate(config)
        rows.append(ScanRow(
            n=n,
            pattern=pattern,
            best_value=record.best_value,
            reference_rate=rate,
            ratio=record.best_value / rate if rate else None,
            seed=config.seed,
            evals=record.wall_evals,
            record=record,
        ))
    return rows


def certificate(record: SearchRecord) -> CertificateBundle:
    """
    Re-evaluate the record's functional at tight tolerance and run the theorem
    checks on its SPF. Anomalies: value_mismatch when the recomputed value
    differs by more than 1e-6 relative, ratio_near_zero when a theorem ratio
    falls below 1e-3.
    """
    config = record.config
    tolerance = CERTIFICATE_SUP_RTOL if math.isinf(config.p) else CERTIFICATE_PANEL_TOL
    recomputed = functional(record.best_spf, config.functional, config.p, tolerance)

    reports = []
    if record.best_spf.order >= 4:
        reports.extend(theorem1_check(record.best_spf))
    if record.best_spf.order >= 2:
        reports.append(theorem2_check(record.best_spf))

    anomalies = []
    if abs(recomputed.value - record.best_value) > VALUE_MISMATCH_RTOL * abs(recomputed.value):
        anomalies.append('value_mismatch')
    if any(report.ratio is not None and report.ratio < RATIO_FLOOR for report in reports):
        anomalies.append('ratio_near_zero')
    for anomaly in anomalies:
        logger.warning(f"certificate n={config.order_n}: {anomaly}")
    return CertificateBundle(recomputed=recomputed, reports=reports, anomalies=anomalies)
