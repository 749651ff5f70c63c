"""
Evaluators and checkers for the lower bounds on Y(rho): the Gorin minorant,
the Blaschke-product lemmas behind it, the derivative estimate behind the
Gelfond bound, and the historical estimates they improve on.
"""
import logging
import math
from typing import List, Optional, Tuple

from apps.blaschke.models import SymmetricConfiguration
from apps.blaschke.services import mu, mu_range
from apps.core.exceptions import DomainError
from apps.core.models import SPF
from apps.core.services import rescale, split_half_planes, translate
from apps.norms.services import gelfond_functional, sup_norm_real

from .models import BoundReport, HistoricalBound

logger = logging.getLogger(__name__)

HARD_CHECK_SLACK = 1e-9
FIXED_POINT_ITERATIONS = 200


def _check_order(n: int, minimum: int, what: str):
    if n < minimum:
        raise DomainError(f"{what} needs n >= {minimum}, got {n}.")


def theorem1_minorant(n: int, nk: int) -> Tuple[float, float]:
    """
    (full, simplified) lower bounds for |Im xi_k| ||rho||_inf:
    full = ((ln n)^t + 1) / ((ln n)^t - 1) * ln ln n / ln n with t = 1/nk,
    simplified = 2 nk / ln n.
    """
    _check_order(n, 4, "The Gorin minorant")
    if nk < 1:
        raise DomainError(f"Multiplicity must be positive, got {nk}.")
    log_n = math.log(n)
    log_log_n = math.log(log_n)
    # (L^t + 1) / (L^t - 1) = coth(t ln L / 2)
    ratio = 1.0 / math.tanh(log_log_n / (2.0 * nk))
    return ratio * log_log_n / log_n, 2.0 * nk / log_n


def theorem1_check(spf: SPF) -> List[BoundReport]:
    """One report per pole: |Im xi_k| ||rho||_inf against the full minorant; ratios are recorded."""
    _check_order(spf.order, 4, "theorem1_check")
    sup = sup_norm_real(spf).value
    reports = []
    for pole in spf.poles:
        full, simplified = theorem1_minorant(spf.order, pole.multiplicity)
        lhs = abs(pole.im) * sup
        reports.append(BoundReport.build(
            'theorem1', lhs, full, passed=lhs / full > 0,
            n=spf.order, nk=pole.multiplicity, pole=[pole.re, pole.im],
            sup_norm=sup, simplified=simplified,
        ))
    return reports


def delta_of_theta(theta: float, n1: int, complement: Optional[float] = None) -> float:
    """
    2 (1 - theta)^n1 / ((1 - theta)^n1 + (1 + theta)^n1).

    complement, when given, is 1 - theta carried at full relative precision;
    near theta = 1 the rounded theta alone loses about log10(1 / (1 - theta))
    digits of delta.
    """
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta!r}.")
    if n1 < 1:
        raise DomainError(f"n1 must be positive, got {n1}.")
    if complement is None:
        # ((1 - theta) / (1 + theta))^n1 = exp(-2 n1 atanh(theta))
        epsilon = math.exp(-2.0 * n1 * math.atanh(theta))
    else:
        if not 0 < complement < 1:
            raise DomainError(f"1 - theta must lie in (0, 1), got {complement!r}.")
        epsilon = math.exp(n1 * (math.log(complement) - math.log1p(1.0 - complement)))
    return 2.0 * epsilon / (1.0 + epsilon)


def _root(mu2: float, n1: int) -> float:
    if not mu2 > 10:
        raise DomainError(f"mu2 must exceed 10, got {mu2!r}.")
    if n1 < 1:
        raise DomainError(f"n1 must be positive, got {n1}.")
    return math.exp(math.log1p(2.0 * mu2 - 2.0) / n1)


def theta_of_mu2(mu2: float, n1: int) -> float:
    """The theta with mu2 * delta_of_theta(theta, n1) = 1."""
    s = _root(mu2, n1)
    return (s - 1.0) / (s + 1.0)


def theta_complement_of_mu2(mu2: float, n1: int) -> float:
    """1 - theta_of_mu2(mu2, n1) = 2 / (s + 1), computed without cancellation."""
    return 2.0 / (_root(mu2, n1) + 1.0)


def axis_multiplicity(conf: SymmetricConfiguration, y1: float) -> int:
    for pole in conf.upper_poles:
        if pole.re == 0 and pole.im == y1:
            return pole.multiplicity
    raise DomainError(f"The configuration has no pole at {complex(0, y1)!r}.")


def lemma1_check(conf: SymmetricConfiguration, y1: float, theta: float, r: float) -> BoundReport:
    """
    exp(2 theta mu2 y1) >= (mu2 + mu1 - delta mu1 - 4 y0 mu1 / r)
                           / (mu2 - mu1 + delta mu1 + 4 y0 mu1 / r)

    with mu1, mu2 the extrema of mu on [0, r], y0 = theta y1 and delta from
    delta_of_theta for the multiplicity n1 of the pole i y1. A nonpositive
    right-hand side passes trivially. Compared in log space.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r!r}.")
    n1 = axis_multiplicity(conf, y1)
    delta = delta_of_theta(theta, n1)
    mu1, mu2 = mu_range(conf, r)
    y0 = theta * y1
    shift = delta * mu1 + 4.0 * y0 * mu1 / r
    numerator = mu2 + mu1 - shift
    denominator = mu2 - mu1 + shift
    rhs = numerator / denominator
    exponent = 2.0 * theta * mu2 * y1
    passed = rhs <= 0 or exponent >= math.log(rhs) - HARD_CHECK_SLACK * max(1.0, abs(math.log(rhs)))
    return BoundReport.build(
        'lemma1', math.exp(min(exponent, 700.0)), rhs, passed=passed,
        n1=n1, y1=y1, theta=theta, r=r, delta=delta, y0=y0, mu1=mu1, mu2=mu2, lhs_exponent=exponent,
    )


def lemma2_minorant(mu2: float, n1: int) -> float:
    """
    (1 / (2 mu2)) * ((2mu2 - 1)^(1/n1) + 1) / ((2mu2 - 1)^(1/n1) - 1)
    * ln((mu2 - 1) / (2 + 4 ln mu2)); negative values are returned as they are.
    """
    if not mu2 > 10:
        raise DomainError(f"mu2 must exceed 10, got {mu2!r}.")
    argument = (mu2 - 1.0) / (2.0 + 4.0 * math.log(mu2))
    if argument <= 0:
        raise DomainError(f"ln argument {argument!r} is not positive.")
    s = (2.0 * mu2 - 1.0) ** (1.0 / n1)
    return (s + 1.0) / (s - 1.0) * math.log(argument) / (2.0 * mu2)


def lemma2_check(conf: SymmetricConfiguration, y1: float) -> BoundReport:
    """
    y1 against lemma2_minorant(mu2(r), n1) at the r solving r = 4 mu2(r) y1.

    r is found by iterating the nondecreasing map r -> 4 mu2(r) y1 from
    4 mu(0) y1. Only meaningful for y1 <= n1 / 10; otherwise the report is
    marked not applicable and passes.
    """
    n1 = axis_multiplicity(conf, y1)
    if y1 > n1 / 10.0:
        return BoundReport.build('lemma2', y1, 0.0, passed=True, n1=n1, y1=y1, applicable=False)

    r = 4.0 * mu(conf, 0.0) * y1
    for iteration in range(1, FIXED_POINT_ITERATIONS + 1):
        mu1, mu2 = mu_range(conf, r)
        following = 4.0 * mu2 * y1
        if abs(following - r) <= 1e-12 * r:
            r = following
            break
        r = following
    else:
        logger.warning(f"lemma2_check: r = 4 mu2(r) y1 not settled after {FIXED_POINT_ITERATIONS} steps")

    if not mu2 > 10:
        return BoundReport.build('lemma2', y1, 0.0, passed=True, n1=n1, y1=y1, r=r, mu2=mu2, applicable=False)
    minorant = lemma2_minorant(mu2, n1)
    return BoundReport.build(
        'lemma2', y1, minorant, passed=y1 >= minorant - HARD_CHECK_SLACK,
        n1=n1, y1=y1, r=r, mu1=mu1, mu2=mu2, iterations=iteration, applicable=True,
    )


def tanh_series(a: float, tol: float) -> float:
    """
    sum_{k >= 1} 8a / (4a^2 + pi^2 (2k - 1)^2), which equals tanh(a).

    K terms are summed exactly; the rest is the midpoint-rule integral
    (2/pi) arctan(a / (pi K)), whose error is below a / (3 pi^2 K^3) <= tol / 2.
    """
    if not a > 0:
        raise DomainError(f"a must be positive, got {a!r}.")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}.")
    terms = int(math.ceil(max(3.0, a / math.pi, (a / (3.0 * math.pi ** 2 * tol / 2.0)) ** (1.0 / 3.0))))
    partial = [8.0 * a / (4.0 * a * a + math.pi ** 2 * (2 * k - 1) ** 2) for k in range(1, terms + 1)]
    tail = (2.0 / math.pi) * math.atan(a / (math.pi * terms))
    return math.fsum(partial + [tail])


def lemma3_check(spf: SPF) -> BoundReport:
    """
    ||(rho+)'(. - ih)||_inf <= 5 ln n with h = 1/n^2, after rescaling so that
    ||rho'||_inf = 1. An SPF with no upper half-plane poles passes with lhs 0.
    """
    n = spf.order
    _check_order(n, 2, "lemma3_check")
    derivative_norm = sup_norm_real(spf, use_derivative=True).value
    normalized = rescale(spf, derivative_norm ** -0.5)
    rhs = 5.0 * math.log(n)
    h = 1.0 / n ** 2

    upper, _ = split_half_planes(normalized)
    if upper is None:
        logger.debug("lemma3_check: no poles in the upper half-plane")
        return BoundReport.build('lemma3', 0.0, rhs, passed=True, n=n, h=h, degenerate=True)

    # (rho+)'(x - ih) is the derivative of rho+ with poles moved up by ih
    lhs = sup_norm_real(translate(upper, 1j * h), use_derivative=True).value
    return BoundReport.build(
        'lemma3', lhs, rhs, passed=lhs <= rhs + HARD_CHECK_SLACK,
        n=n, h=h, derivative_norm=derivative_norm,
        normalized_derivative_norm=sup_norm_real(normalized, use_derivative=True).value,
        degenerate=False,
    )


def theorem2_check(spf: SPF) -> BoundReport:
    """Gelfond functional at p = inf against sqrt(ln n / n); the ratio is recorded."""
    n = spf.order
    _check_order(n, 2, "theorem2_check")
    lhs = gelfond_functional(spf, math.inf).value
    rhs = math.sqrt(math.log(n) / n)
    return BoundReport.build('theorem2', lhs, rhs, passed=lhs / rhs > 0, n=n)


def historical_bounds(n: int) -> List[HistoricalBound]:
    _check_order(n, 2, "historical_bounds")
    log_n = math.log(n)
    return [
        HistoricalBound('nikolaev', 2.0 * (math.sqrt(2.0) - 1.0) ** (n - 1)),
        HistoricalBound('gelfond', 1.0 / (17.0 * log_n), note='valid for n >= n0, n0 unspecified'),
        HistoricalBound('nikolaev_deriv', n ** -1.5, constant_dropped=True),
        HistoricalBound('gelfond_deriv', 2.0 ** (-n / 4.0), constant_dropped=True),
        HistoricalBound(
            'reference_rate', math.log(log_n) / log_n if n >= 4 else None,
            constant_dropped=True, note='' if n >= 4 else 'defined for n >= 4',
        ),
        HistoricalBound('theorem2_rate', math.sqrt(log_n / n), constant_dropped=True),
    ]
