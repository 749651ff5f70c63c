"""
SPF algebra: construction, evaluation, symmetry splits, rescaling and Y(rho).

All operations are pure; an SPF is never mutated.
"""
import logging
import math
from typing import Iterable, Optional, Tuple

import numpy as np

from .exceptions import (
    DomainError, DuplicatePole, EmptyInput, EvalAtPole, NonpositiveScale, RealPole,
)
from .models import SPF, Pole, is_finite_complex

logger = logging.getLogger(__name__)

# Rows of the (points x poles) matrix evaluated at once by evaluate_many.
EVAL_CHUNK = 4096


def _as_pole(item) -> Pole:
    if isinstance(item, Pole):
        return item
    location, multiplicity = item
    return Pole(location=complex(location), multiplicity=int(multiplicity))


def make_spf(poles: Iterable) -> SPF:
    """
    Build an SPF from (location, multiplicity) pairs or Pole instances.

    Raises EmptyInput, RealPole or DuplicatePole. Duplicate detection is exact
    coordinate equality; coincident poles are never merged here.
    """
    items = [_as_pole(item) for item in poles]
    if not items:
        raise EmptyInput("An SPF needs at least one pole.")

    seen = set()
    normalized = []
    for pole in items:
        if not is_finite_complex(pole.location):
            raise RealPole(f"Pole location {pole.location!r} is not finite.")
        if pole.multiplicity < 1:
            raise DomainError(f"Multiplicity must be a positive integer, got {pole.multiplicity}.")
        if pole.location.imag == 0:
            raise RealPole(f"Pole {pole.location!r} lies on the real axis.")
        # -0.0 and 0.0 must compare and print alike
        location = complex(pole.location.real + 0.0, pole.location.imag)
        if location in seen:
            raise DuplicatePole(f"Pole {location!r} is listed more than once.")
        seen.add(location)
        normalized.append(Pole(location=location, multiplicity=pole.multiplicity))

    normalized.sort(key=lambda p: p.sort_key)
    return SPF(poles=tuple(normalized))


def merge_poles(poles: Iterable) -> SPF:
    """Like make_spf, but coincident locations add their multiplicities."""
    merged = {}
    for pole in (_as_pole(item) for item in poles):
        merged[pole.location] = merged.get(pole.location, 0) + pole.multiplicity
    return make_spf(merged.items())


def min_pole_distance(spf: SPF, z: complex) -> float:
    return float(np.min(np.abs(complex(z) - spf.locations)))


def evaluate(spf: SPF, z: complex) -> complex:
    """rho(z) = sum n_k / (z - xi_k)."""
    z = complex(z)
    terms = []
    for pole in spf.poles:
        if z == pole.location:
            raise EvalAtPole(f"{z!r} is a pole of the SPF.")
        terms.append(pole.multiplicity / (z - pole.location))
    # fsum keeps conjugate pairs cancelling exactly on the real axis
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def evaluate_derivative(spf: SPF, z: complex) -> complex:
    """rho'(z) = -sum n_k / (z - xi_k)^2."""
    z = complex(z)
    terms = []
    for pole in spf.poles:
        if z == pole.location:
            raise EvalAtPole(f"{z!r} is a pole of the SPF.")
        terms.append(-pole.multiplicity / (z - pole.location) ** 2)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def evaluate_many(spf: SPF, points, derivative_order: int = 0) -> np.ndarray:
    """
    Vectorised rho^(j) at many points, j in {0, 1, 2, 3}.

    No pole check: callers pass points off the pole set (the norm engines only
    evaluate on or near the real axis).
    """
    points = np.asarray(points, dtype=complex).ravel()
    sign_and_factorial = {0: 1.0, 1: -1.0, 2: 2.0, 3: -6.0}[derivative_order]
    power = derivative_order + 1
    out = np.empty(points.shape, dtype=complex)
    locations = spf.locations[None, :]
    weights = spf.weights[None, :]
    for start in range(0, points.size, EVAL_CHUNK):
        chunk = points[start:start + EVAL_CHUNK, None]
        out[start:start + EVAL_CHUNK] = sign_and_factorial * np.sum(
            weights / (chunk - locations) ** power, axis=1
        )
    return out


def min_abs_imag(spf: SPF) -> float:
    """Y(rho) = min_k |Im xi_k|."""
    return min(abs(p.im) for p in spf.poles)


def rescale(spf: SPF, c: float) -> SPF:
    """c * rho(c z): poles move to xi_k / c, multiplicities unchanged."""
    if not c > 0 or not math.isfinite(c):
        raise NonpositiveScale(f"Scale must be a positive finite number, got {c!r}.")
    if c == 1:
        return spf
    return make_spf((p.location / c, p.multiplicity) for p in spf.poles)


def translate(spf: SPF, w: complex) -> SPF:
    """rho(z - w): poles move to xi_k + w."""
    w = complex(w)
    return make_spf((p.location + w, p.multiplicity) for p in spf.poles)


def split_half_planes(spf: SPF) -> Tuple[Optional[SPF], Optional[SPF]]:
    """Partial sums over the upper and lower half-plane poles; None when empty."""
    upper = [p for p in spf.poles if p.im > 0]
    lower = [p for p in spf.poles if p.im < 0]
    return (
        make_spf(upper) if upper else None,
        make_spf(lower) if lower else None,
    )


def conjugate_closure(spf: SPF) -> SPF:
    """Poles of rho(z) + conj(rho(conj z)); coincident poles add."""
    return merge_poles(
        [(p.location, p.multiplicity) for p in spf.poles]
        + [(p.location.conjugate(), p.multiplicity) for p in spf.poles]
    )


def mirror_closure(spf: SPF) -> SPF:
    """Poles of s(z) - conj(s(-conj z)), i.e. the set plus its images under xi -> -conj(xi)."""
    return merge_poles(
        [(p.location, p.multiplicity) for p in spf.poles]
        + [(-p.location.conjugate(), p.multiplicity) for p in spf.poles]
    )


def triangle_bound(spf: SPF, derivative_order: int = 0) -> float:
    """sum n_k / |Im xi_k|^(j+1), an upper bound for sup |rho^(j)| on the real axis."""
    factorial = math.factorial(derivative_order)
    return factorial * float(np.sum(spf.weights / spf.heights ** (derivative_order + 1)))
