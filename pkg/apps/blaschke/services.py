"""
Blaschke product, phase density and phase of a symmetric configuration, the
roots of B(x) = -1 and the identities tying them together.
"""
import cmath
import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from apps.bounds.models import BoundReport
from apps.core.exceptions import (
    AsymmetricConfiguration, ConvergenceFailure, DomainError, EvalAtConjugatePole, IndexOutOfRange,
)
from apps.core.models import SPF
from apps.core.services import make_spf, split_half_planes

from .models import RootSet, SymmetricConfiguration

logger = logging.getLogger(__name__)

# Above this total multiplicity B is evaluated as exp(sum of logs)
LOG_PRODUCT_THRESHOLD = 32
ROOT_RESIDUAL_TOL = 1e-10
DECOMPOSITION_TOL = 1e-9
PHASE_INTEGRAL_TOL = 1e-9
MAX_BRACKET_DOUBLINGS = 2000


def make_configuration(poles: Iterable) -> SymmetricConfiguration:
    """
    Validate upper half-plane poles against the four-fold symmetry.

    Raises AsymmetricConfiguration when a pole is in the lower half-plane,
    lacks its mirror -conj(z) with equal multiplicity, or sits on the
    imaginary axis with odd multiplicity.
    """
    spf = make_spf(poles)
    index = {p.location: p.multiplicity for p in spf.poles}
    for pole in spf.poles:
        if pole.im < 0:
            raise AsymmetricConfiguration(f"Pole {pole.location!r} is not in the upper half-plane.")
        if pole.re == 0:
            if pole.multiplicity % 2:
                raise AsymmetricConfiguration(
                    f"Pole {pole.location!r} on the imaginary axis has odd multiplicity {pole.multiplicity}."
                )
            continue
        mirror = complex(-pole.re, pole.im)
        if index.get(mirror) != pole.multiplicity:
            raise AsymmetricConfiguration(
                f"Pole {pole.location!r} has no mirror {mirror!r} of multiplicity {pole.multiplicity}."
            )
    return SymmetricConfiguration(upper_poles=spf.poles)


def configuration_from_spf(spf: SPF) -> SymmetricConfiguration:
    """Upper poles of an SPF that is symmetric in both axes."""
    if not spf.is_conjugate_symmetric():
        raise AsymmetricConfiguration("The SPF is not closed under conjugation.")
    upper, _ = split_half_planes(spf)
    return make_configuration(upper.poles)


def configuration_to_spf(conf: SymmetricConfiguration) -> SPF:
    """The full SPF: upper poles and their conjugates."""
    return make_spf(
        [(p.location, p.multiplicity) for p in conf.upper_poles]
        + [(p.location.conjugate(), p.multiplicity) for p in conf.upper_poles]
    )


def blaschke_eval(conf: SymmetricConfiguration, z: complex) -> complex:
    """B(z) = prod ((z - z_k) / (z - conj z_k))^n_k."""
    z = complex(z)
    for pole in conf.upper_poles:
        if z == pole.location.conjugate():
            raise EvalAtConjugatePole(f"{z!r} is a pole of B.")
    if any(z == pole.location for pole in conf.upper_poles):
        return 0j

    if conf.eta2 <= LOG_PRODUCT_THRESHOLD:
        value = 1 + 0j
        for pole in conf.upper_poles:
            value *= ((z - pole.location) / (z - pole.location.conjugate())) ** pole.multiplicity
        return value

    log_terms = [
        pole.multiplicity * (cmath.log(z - pole.location) - cmath.log(z - pole.location.conjugate()))
        for pole in conf.upper_poles
    ]
    log_value = complex(math.fsum(t.real for t in log_terms), math.fsum(t.imag for t in log_terms))
    return cmath.exp(log_value)


def mu(conf: SymmetricConfiguration, x: float) -> float:
    """mu(x) = sum n_k y_k / ((x - x_k)^2 + y_k^2)."""
    return math.fsum(
        p.multiplicity * p.im / ((x - p.re) ** 2 + p.im ** 2) for p in conf.upper_poles
    )


def mu_many(conf: SymmetricConfiguration, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)[..., None]
    return np.sum(conf.weights * conf.y / ((xs - conf.x) ** 2 + conf.y ** 2), axis=-1)


def mu_slope_many(conf: SymmetricConfiguration, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)[..., None]
    dx = xs - conf.x
    return np.sum(-2.0 * conf.weights * conf.y * dx / (dx ** 2 + conf.y ** 2) ** 2, axis=-1)


def phase(conf: SymmetricConfiguration, x: float) -> float:
    """Theta(x) = 2 sum n_k [arctan((x - x_k)/y_k) + arctan(x_k/y_k)], so Theta(0) = 0."""
    return 2.0 * math.fsum(
        p.multiplicity * (math.atan((x - p.re) / p.im) + math.atan(p.re / p.im))
        for p in conf.upper_poles
    )


def _solve_phase(conf: SymmetricConfiguration, target: float) -> float:
    """Positive t with Theta(t) = target, for 0 < target < pi * eta2."""
    lo, hi = 0.0, max(1.0, conf.max_abs_real + conf.min_height)
    doublings = 0
    while phase(conf, hi) <= target:
        lo, hi = hi, 2.0 * hi
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise ConvergenceFailure(f"Could not bracket the phase level {target!r}.")

    t = brentq(lambda x: phase(conf, x) - target, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # Newton polish with Theta' = 2 mu
    for _ in range(3):
        step = (phase(conf, t) - target) / (2.0 * mu(conf, t))
        if not abs(step) > 0 or not lo <= t - step <= hi:
            break
        t -= step
    return t


def minus_one_roots(conf: SymmetricConfiguration) -> RootSet:
    """
    The eta2 real solutions of B(t) = -1, i.e. Theta(t) in {+-pi, +-3pi, ...}.

    Theta is odd and strictly increasing with total increment 2 pi eta2, so
    the positive roots solve Theta(r_j) = (2j - 1) pi for j = 1..eta and the
    negative ones are their negatives.
    """
    positive = []
    for j in range(1, conf.eta + 1):
        t = _solve_phase(conf, (2 * j - 1) * math.pi)
        assert t > 0, "B(0) = 1, so 0 is never a root"
        residual = abs(blaschke_eval(conf, t) + 1)
        if residual > ROOT_RESIDUAL_TOL:
            raise ConvergenceFailure(f"Root {j} at {t!r} leaves |B + 1| = {residual:.3e}.")
        positive.append(t)

    roots = tuple([-t for t in reversed(positive)] + positive)
    logger.debug(f"Found {len(roots)} roots of B = -1 for eta2 = {conf.eta2}")
    return RootSet(roots=roots)


def decomposition_check(conf: SymmetricConfiguration, sample_points: Sequence[complex],
                        roots: Optional[RootSet] = None) -> BoundReport:
    """
    (1 - B(z)) / (1 + B(z)) = i sum_k 1 / (mu(t_k) (z - t_k)) at every sample.

    lhs is the largest residual scaled by 1 + |(1 - B)/(1 + B)|.
    """
    if roots is None:
        roots = minus_one_roots(conf)
    weights = [1.0 / mu(conf, t) for t in roots.roots]
    worst, worst_raw, worst_point = 0.0, 0.0, None
    for z in sample_points:
        z = complex(z)
        if z.imag == 0 and z.real in roots.roots:
            raise DomainError(f"Sample point {z!r} is a root of B = -1.")
        b = blaschke_eval(conf, z)
        left = (1 - b) / (1 + b)
        terms = [w / (z - t) for w, t in zip(weights, roots.roots)]
        right = 1j * complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
        raw = abs(left - right)
        scaled = raw / (1 + abs(left))
        if scaled >= worst:
            worst, worst_raw, worst_point = scaled, raw, z
    return BoundReport.build(
        'decomposition', worst, DECOMPOSITION_TOL,
        passed=worst <= DECOMPOSITION_TOL,
        eta2=conf.eta2, samples=len(sample_points), max_residual=worst_raw,
        worst_point=None if worst_point is None else [worst_point.real, worst_point.imag],
    )


def phase_integral_check(conf: SymmetricConfiguration, k: int, roots: Optional[RootSet] = None) -> BoundReport:
    """int_0^{r_k} mu = Theta(r_k)/2 against pi (2k - 1) / 2."""
    if not 1 <= k <= conf.eta:
        raise IndexOutOfRange(f"k must lie in 1..{conf.eta}, got {k}.")
    if roots is None:
        roots = minus_one_roots(conf)
    r_k = roots.positive_roots[k - 1]
    closed_form = phase(conf, r_k) / 2.0
    expected = math.pi * (2 * k - 1) / 2.0
    breakpoints = [x for x in np.unique(np.abs(conf.x)) if 0 < x < r_k]
    quadrature, _ = quad(lambda x: mu(conf, x), 0.0, r_k, points=breakpoints or None, limit=500,
                         epsabs=1e-13, epsrel=1e-13)
    difference = abs(closed_form - expected)
    return BoundReport.build(
        'phase-integral', closed_form, expected,
        passed=difference <= PHASE_INTEGRAL_TOL,
        k=k, r_k=r_k, difference=difference, quadrature=quadrature,
    )


def mu_range(conf: SymmetricConfiguration, r: float, grid_points: Optional[int] = None):
    """
    (min, max) of mu on [0, r].

    Sign changes of mu' are located on a grid finer than the smallest height
    and refined by brentq; the extrema are taken over those points and the
    endpoints.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r!r}.")
    if grid_points is None:
        grid_points = int(min(200001, max(2001, math.ceil(40.0 * r / conf.min_height))))
    xs = np.linspace(0.0, r, grid_points)
    slopes = mu_slope_many(conf, xs)
    candidates = [0.0, r]
    for i in np.nonzero(np.sign(slopes[:-1]) * np.sign(slopes[1:]) < 0)[0]:
        candidates.append(brentq(lambda x: float(mu_slope_many(conf, x)), xs[i], xs[i + 1], xtol=1e-15))
    candidates.extend(xs[1:-1][slopes[1:-1] == 0].tolist())
    values = [mu(conf, x) for x in candidates]
    return min(values), max(values)


def mu_continuity_check(conf: SymmetricConfiguration, y1: float, pairs: Sequence, scale: float = 1.0) -> BoundReport:
    """
    |mu(x1) - mu(x2)| <= 3 scale ln(1 + r / (2 y1)), r = |x1 - x2|, for every pair.

    scale is the sup-norm of the SPF the configuration came from (1 for a
    normalised source). Reports the pair with the largest excess.
    """
    if not y1 > 0:
        raise DomainError(f"y1 must be positive, got {y1!r}.")
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if not pairs.size:
        return BoundReport.build('mu-continuity', 0.0, 0.0, passed=True, pairs=0, y1=y1, scale=scale)
    first, second = mu_many(conf, pairs[:, 0]), mu_many(conf, pairs[:, 1])
    gaps = np.abs(first - second)
    bounds = 3.0 * scale * np.log1p(np.abs(pairs[:, 0] - pairs[:, 1]) / (2.0 * y1))
    slack = 1e-12 * np.maximum(first, second)
    excess = gaps - bounds
    worst = int(np.argmax(excess))
    return BoundReport.build(
        'mu-continuity', float(gaps[worst]), float(bounds[worst]),
        passed=bool(np.all(gaps <= bounds + slack)),
        pairs=int(len(pairs)), y1=y1, scale=scale,
        worst_pair=pairs[worst].tolist(), violations=int(np.count_nonzero(gaps > bounds + slack)),
    )


def mu_sup_ratio(conf: SymmetricConfiguration) -> BoundReport:
    """Records ||mu||_inf / ln n, n = 2 eta2; an empirical statistic, always passes."""
    n = 2 * conf.eta2
    reach = max(conf.max_abs_real, conf.min_height)
    sup_mu = mu_range(conf, reach)[1]
    return BoundReport.build('mu-sup', sup_mu, math.log(n), passed=True, n=n)
