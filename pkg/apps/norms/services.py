"""
Norms of SPFs and their derivatives on the real axis, and the scale-invariant
Gorin/Gelfond functionals built from them.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from django.conf import settings

from apps.bounds.models import BoundReport
from apps.core.exceptions import UnsupportedExponent
from apps.core.models import SPF
from apps.core.services import evaluate_many, min_abs_imag, split_half_planes

from .models import FunctionalKind, FunctionalValue, NormResult, conjugate_exponent

logger = logging.getLogger(__name__)

GAUSS_ORDER = 15
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)

# Offsets (in units of |Im xi_k|) around each pole shadow Re xi_k
SHADOW_OFFSETS = np.array([-8.0, -4.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0])

# Pole-level rows processed at once when bounding panels
PANEL_CHUNK = 2048


def _pole_shadow_points(spf: SPF) -> np.ndarray:
    re = spf.locations.real[:, None]
    y = spf.heights[:, None]
    return (re + y * SHADOW_OFFSETS[None, :]).ravel()


def _distance_sums(spf: SPF, left: np.ndarray, right: np.ndarray, powers):
    """
    For each panel [left, right] and each p in powers: sum_k n_k / dist_k^p,
    where dist_k is the distance from xi_k to the panel.
    """
    re = spf.locations.real[None, :]
    y2 = (spf.heights ** 2)[None, :]
    weights = spf.weights[None, :]
    out = {p: np.empty(left.shape) for p in powers}
    for start in range(0, left.size, PANEL_CHUNK):
        a = left[start:start + PANEL_CHUNK, None]
        b = right[start:start + PANEL_CHUNK, None]
        gap = np.maximum(np.maximum(a - re, re - b), 0.0)
        dist2 = gap * gap + y2
        for p in powers:
            out[p][start:start + PANEL_CHUNK] = np.sum(weights / dist2 ** (p / 2.0), axis=1)
    return out


class SupNormEngine:
    """
    Certified sup over the real axis of |rho^(j)(x)|, j in {0, 1}.

    Works on g = |rho^(j)|^2. Outside the window [-X, X] the tail bound
    |rho^(j)(x)| <= j! n / (|x| - a)^(j+1), a = max |Re xi_k|, keeps g below
    the sampled maximum. Inside, panels are refined by bisection until their
    upper bound max(g(left), g(right)) + K h^2 / 8, with K a bound for |g''|
    over the panel, no longer exceeds the best value found. Local maxima are
    polished by safeguarded Newton on g'.
    """

    def __init__(self, spf: SPF, derivative_order: int = 0, rtol: Optional[float] = None,
                 max_levels: int = 120, initial_nodes: int = 2049):
        self.spf = spf
        self.j = derivative_order
        self.rtol = settings.SPFLAB_SUP_RTOL if rtol is None else rtol
        self.max_levels = max_levels
        self.initial_nodes = initial_nodes
        self.levels = 0
        self.panels_examined = 0

    def _g(self, xs: np.ndarray) -> np.ndarray:
        values = evaluate_many(self.spf, xs, self.j)
        return values.real ** 2 + values.imag ** 2

    def _curvature_bound(self, left, right) -> np.ndarray:
        # |rho^(m)| <= m! S_(m+1), S_p = sum n_k / dist_k^p
        if self.j == 0:
            s = _distance_sums(self.spf, left, right, (1, 2, 3))
            return 2.0 * (s[2] ** 2 + 2.0 * s[1] * s[3])
        s = _distance_sums(self.spf, left, right, (2, 3, 4))
        return 2.0 * (4.0 * s[3] ** 2 + 6.0 * s[2] * s[4])

    def _polish(self, x0: float, lo: float, hi: float):
        """Safeguarded Newton on g'(x) = 2 Re(f' conj f) inside [lo, hi]."""
        best_x, best_g = x0, float(self._g(np.array([x0]))[0])
        x = x0
        for _ in range(30):
            point = np.array([x])
            f = evaluate_many(self.spf, point, self.j)[0]
            f1 = evaluate_many(self.spf, point, self.j + 1)[0]
            f2 = evaluate_many(self.spf, point, self.j + 2)[0]
            d1 = 2.0 * (f1 * f.conjugate()).real
            d2 = 2.0 * (abs(f1) ** 2 + (f2 * f.conjugate()).real)
            if d1 > 0:
                lo = x
            elif d1 < 0:
                hi = x
            else:
                break
            step_ok = d2 < 0
            candidate = x - d1 / d2 if step_ok else 0.5 * (lo + hi)
            if not (lo < candidate < hi):
                candidate = 0.5 * (lo + hi)
            if abs(candidate - x) <= 1e-15 * max(1.0, abs(x)):
                x = candidate
                break
            x = candidate
            g = float(self._g(np.array([x]))[0])
            if g > best_g:
                best_x, best_g = x, g
        return best_x, best_g

    def run(self) -> NormResult:
        spf = self.spf
        n = spf.order
        a = spf.max_abs_real
        factorial = math.factorial(self.j)

        seeds = np.concatenate([[0.0], _pole_shadow_points(spf)])
        seed_g = self._g(seeds)
        m0 = math.sqrt(float(np.max(seed_g)))
        # tail bound at X is half the sampled maximum
        reach = (2.0 * factorial * n / m0) ** (1.0 / (self.j + 1))
        window = a + reach

        nodes = np.concatenate([
            np.linspace(-window, window, self.initial_nodes),
            seeds[np.abs(seeds) < window],
        ])
        nodes = np.unique(nodes)
        values = self._g(nodes)

        best_index = int(np.argmax(values))
        best_x, best_g = float(nodes[best_index]), float(values[best_index])

        # polish the strongest interior local maxima
        interior = np.arange(1, nodes.size - 1)
        is_peak = (values[interior] >= values[interior - 1]) & (values[interior] >= values[interior + 1])
        peaks = interior[is_peak]
        for index in peaks[np.argsort(values[peaks])[::-1][:16]]:
            x, g = self._polish(float(nodes[index]), float(nodes[index - 1]), float(nodes[index + 1]))
            if g > best_g:
                best_x, best_g = x, g

        left, right = nodes[:-1], nodes[1:]
        g_left, g_right = values[:-1], values[1:]
        threshold_factor = 1.0 + 2.0 * self.rtol
        upper_bound = best_g * threshold_factor

        while True:
            self.levels += 1
            self.panels_examined += left.size
            widths = right - left
            bound = np.maximum(g_left, g_right) + self._curvature_bound(left, right) * widths ** 2 / 8.0
            active = bound > best_g * threshold_factor
            if not np.any(active):
                upper_bound = best_g * threshold_factor
                break
            if self.levels >= self.max_levels:
                upper_bound = max(best_g * threshold_factor, float(np.max(bound[active])))
                logger.warning(
                    f"Sup-norm refinement stopped after {self.levels} levels with "
                    f"{int(np.count_nonzero(active))} open panels"
                )
                break

            left, right = left[active], right[active]
            g_left, g_right = g_left[active], g_right[active]
            middle = 0.5 * (left + right)
            g_middle = self._g(middle)

            top = int(np.argmax(g_middle))
            if g_middle[top] > best_g:
                best_x, best_g = float(middle[top]), float(g_middle[top])
                x, g = self._polish(best_x, float(left[top]), float(right[top]))
                if g > best_g:
                    best_x, best_g = x, g

            left, right = np.concatenate([left, middle]), np.concatenate([middle, right])
            g_left, g_right = np.concatenate([g_left, g_middle]), np.concatenate([g_middle, g_right])

        value = math.sqrt(best_g)
        error = math.sqrt(upper_bound) - value
        error = max(error, 4.0 * np.finfo(float).eps * value)
        logger.debug(
            f"sup |rho^({self.j})| = {value!r} at {best_x!r} "
            f"(window {window:.3g}, {self.levels} levels, {self.panels_examined} panels)"
        )
        return NormResult(value=value, witness=best_x, certified_error=error)


class LpNormEngine:
    """
    (int_R |rho^(j)(x)|^p dx)^(1/p) for finite p > 1.

    The window [-X, X] is split at the pole shadows and integrated by adaptive
    bisection with order-15 Gauss panels. Beyond X the substitution
    x = X e^s turns the algebraic tail into an exponentially decaying one.
    Past the last integrated point the leading term j! n / x^(j+1) is
    integrated in closed form and its relative deviation goes into
    certified_error, so p close to 1 keeps its slowly decaying tail.
    """

    MAX_PANELS = 200000

    def __init__(self, spf: SPF, p: float, derivative_order: int = 0,
                 panel_tol: Optional[float] = None, relative_tol: float = 1e-13):
        if not p > 1 or math.isinf(p) or math.isnan(p):
            raise UnsupportedExponent(f"L^p norms need a finite p > 1, got {p!r}.")
        self.spf = spf
        self.p = float(p)
        self.j = derivative_order
        self.panel_tol = settings.SPFLAB_LP_PANEL_TOL if panel_tol is None else panel_tol
        self.relative_tol = relative_tol
        self.panels_accepted = 0
        self.scale = 1.0

    def _integrand(self, xs: np.ndarray) -> np.ndarray:
        values = np.abs(evaluate_many(self.spf, xs, self.j)) / self.scale
        return values ** self.p

    def _tail_integrand(self, sign: float, window: float):
        def integrand(s: np.ndarray) -> np.ndarray:
            x = window * np.exp(s)
            return self._integrand(sign * x) * x
        return integrand

    def _gauss(self, integrand, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        half = 0.5 * (right - left)
        centre = 0.5 * (right + left)
        points = centre[:, None] + half[:, None] * GAUSS_NODES[None, :]
        values = integrand(points.ravel()).reshape(points.shape)
        return half * (values @ GAUSS_WEIGHTS)

    def _adaptive(self, integrand, breakpoints: np.ndarray):
        """Adaptive bisection; returns (integral, error estimate) with a fixed reduction order."""
        left, right = breakpoints[:-1], breakpoints[1:]
        coarse = self._gauss(integrand, left, right)
        accepted_values, accepted_errors, accepted_left = [], [], []
        while left.size:
            middle = 0.5 * (left + right)
            fine_left = self._gauss(integrand, left, middle)
            fine_right = self._gauss(integrand, middle, right)
            fine = fine_left + fine_right
            error = np.abs(fine - coarse)
            tolerance = np.maximum(self.panel_tol, self.relative_tol * np.abs(fine))
            too_narrow = (right - left) <= 1e-14 * np.maximum(1.0, np.abs(middle))
            done = (error <= tolerance) | too_narrow
            if self.panels_accepted + left.size > self.MAX_PANELS:
                logger.warning(f"L^p quadrature hit the panel cap of {self.MAX_PANELS}")
                done = np.ones_like(done)

            accepted_values.append(fine[done])
            accepted_errors.append(error[done])
            accepted_left.append(left[done])
            self.panels_accepted += int(np.count_nonzero(done))

            keep = ~done
            left, middle, right = left[keep], middle[keep], right[keep]
            coarse_next = np.concatenate([fine_left[keep], fine_right[keep]])
            left, right = np.concatenate([left, middle]), np.concatenate([middle, right])
            coarse = coarse_next

        starts = np.concatenate(accepted_left)
        order = np.argsort(starts, kind='stable')
        values = np.concatenate(accepted_values)[order]
        errors = np.concatenate(accepted_errors)[order]
        return math.fsum(values), math.fsum(errors)

    def _far_tail(self, x_far: float) -> Tuple[float, float]:
        """
        (estimate, error) for int_{x_far}^inf |rho^(j)(x)|^p dx in scaled units.

        Past R = max |xi_k| the leading term C / x^(j+1), C = j! n, is exact up
        to a factor (1 +- eta) with eta = (x / (x - R))^(j+1) - 1.
        """
        c = math.factorial(self.j) * self.spf.order / self.scale
        exponent = self.p * (self.j + 1) - 1.0
        log_value = self.p * math.log(c) - exponent * math.log(x_far) - math.log(exponent)
        estimate = math.exp(min(log_value, 700.0))
        reach = float(np.max(np.abs(self.spf.locations)))
        eta = math.expm1(-(self.j + 1) * math.log1p(-reach / x_far))
        return estimate, estimate * math.expm1(self.p * math.log1p(eta))

    def run(self) -> NormResult:
        spf = self.spf
        a = spf.max_abs_real
        window = a + 8.0 * float(np.max(spf.heights)) + 1.0

        shadows = _pole_shadow_points(spf)
        self.scale = float(np.max(np.abs(evaluate_many(spf, shadows, self.j))))
        breakpoints = np.unique(np.concatenate([[-window, window], shadows[np.abs(shadows) < window]]))
        interior, interior_error = self._adaptive(self._integrand, breakpoints)

        # far point: leading-term remainder below 1e-16 of the interior, capped to stay finite
        c = math.factorial(self.j) * spf.order / self.scale
        exponent = self.p * (self.j + 1) - 1.0
        target = 1e-16 * max(interior, 1e-300)
        log_far = (self.p * math.log(c) - math.log(exponent) - math.log(target)) / exponent
        x_far = a + math.exp(min(max(log_far, math.log(2.0 * window)), 300.0))
        s_max = math.log(x_far / window)
        s_breaks = [0.0]
        while s_breaks[-1] < s_max:
            s_breaks.append(min(s_max, max(1.0, 2.0 * s_breaks[-1])))
        s_breaks = np.array(s_breaks)

        tails, tail_errors = [], []
        for sign in (1.0, -1.0):
            value, error = self._adaptive(self._tail_integrand(sign, window), s_breaks)
            tails.append(value)
            tail_errors.append(error)
        far, far_error = self._far_tail(x_far)
        remainder = 2.0 * far_error

        total = math.fsum([interior] + tails + [2.0 * far])
        quadrature_error = math.fsum([interior_error] + tail_errors)
        value = self.scale * total ** (1.0 / self.p)
        upper = self.scale * (total + quadrature_error + remainder) ** (1.0 / self.p)
        lower = self.scale * max(total - quadrature_error - remainder, 0.0) ** (1.0 / self.p)
        error = max(upper - value, value - lower, 4.0 * np.finfo(float).eps * value)
        logger.debug(
            f"||rho^({self.j})||_{self.p:g} = {value!r} "
            f"({self.panels_accepted} panels, tail to {x_far:.3g})"
        )
        return NormResult(value=value, witness=None, certified_error=error)


def sup_norm_real(spf: SPF, use_derivative: bool = False, rtol: Optional[float] = None) -> NormResult:
    return SupNormEngine(spf, derivative_order=1 if use_derivative else 0, rtol=rtol).run()


def lp_norm_real(spf: SPF, p: float, use_derivative: bool = False,
                 panel_tol: Optional[float] = None) -> NormResult:
    return LpNormEngine(spf, p, derivative_order=1 if use_derivative else 0, panel_tol=panel_tol).run()


def norm_real(spf: SPF, p: float, use_derivative: bool = False, tolerance: Optional[float] = None) -> NormResult:
    """sup-norm for p = inf, L^p otherwise; tolerance is rtol or the panel tolerance."""
    if math.isinf(p) and p > 0:
        return sup_norm_real(spf, use_derivative, rtol=tolerance)
    return lp_norm_real(spf, p, use_derivative, panel_tol=tolerance)


def gorin_functional(spf: SPF, p: float, tolerance: Optional[float] = None) -> FunctionalValue:
    """Y(rho) * ||rho||_p^q."""
    norm = norm_real(spf, p, use_derivative=False, tolerance=tolerance).value
    y = min_abs_imag(spf)
    q = conjugate_exponent(p)
    return FunctionalValue(kind=FunctionalKind.GORIN.value, p=p, value=y * norm ** q, norm=norm, y=y)


def gelfond_functional(spf: SPF, p: float, tolerance: Optional[float] = None) -> FunctionalValue:
    """Y(rho) * ||rho'||_p^(q/(q+1)); the exponent is 1/2 at p = inf."""
    norm = norm_real(spf, p, use_derivative=True, tolerance=tolerance).value
    y = min_abs_imag(spf)
    q = conjugate_exponent(p)
    return FunctionalValue(kind=FunctionalKind.GELFOND.value, p=p, value=y * norm ** (q / (q + 1.0)), norm=norm, y=y)


def functional(spf: SPF, kind: str, p: float, tolerance: Optional[float] = None) -> FunctionalValue:
    if kind == FunctionalKind.GORIN:
        return gorin_functional(spf, p, tolerance)
    return gelfond_functional(spf, p, tolerance)


def beta_p_bound(p: float) -> float:
    """2 p sin^(-q)(pi / p)."""
    q = conjugate_exponent(p)
    return 2.0 * p * math.sin(math.pi / p) ** (-q)


def beta_p_check(spf: SPF, p: float) -> BoundReport:
    """
    max(||rho+||_inf, ||rho-||_inf) <= 2p sin^(-q)(pi/p) ||rho||_p^q.

    An empty half-plane side contributes 0 to the left-hand side.
    """
    if not p > 1 or math.isinf(p):
        raise UnsupportedExponent(f"The half-plane estimate needs a finite p > 1, got {p!r}.")
    upper, lower = split_half_planes(spf)
    sides = [sup_norm_real(side).value if side is not None else 0.0 for side in (upper, lower)]
    lhs = max(sides)
    q = conjugate_exponent(p)
    rhs_without_constant = lp_norm_real(spf, p).value ** q
    constant = beta_p_bound(p)
    return BoundReport.build(
        'beta-p', lhs, rhs_without_constant,
        passed=lhs <= constant * rhs_without_constant,
        p=p, q=q, beta_p_bound=constant, rhs=constant * rhs_without_constant,
        upper_sup_norm=sides[0], lower_sup_norm=sides[1], n=spf.order,
    )
