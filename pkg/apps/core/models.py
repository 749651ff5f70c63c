"""
Domain types of the SPF algebra.

A simple partial fraction (SPF) is rho(z) = sum_k n_k / (z - xi_k), the
logarithmic derivative of prod_k (z - xi_k)^{n_k}. Types here are immutable
values; nothing is persisted.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class Pole:
    location: complex
    multiplicity: int

    @property
    def re(self) -> float:
        return self.location.real

    @property
    def im(self) -> float:
        return self.location.imag

    @property
    def sort_key(self):
        return (self.location.real, self.location.imag)

    def __str__(self):
        return f"{self.multiplicity}/(z - ({format_complex(self.location)}))"


@dataclass(frozen=True)
class SPF:
    """
    Finite multiset of poles off the real axis.

    Poles are kept sorted by (re, im); multiplicities are explicit, so a
    location never appears twice. Build instances with
    apps.core.services.make_spf, which enforces the invariants.
    """
    poles: Tuple[Pole, ...]
    order: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'order', sum(p.multiplicity for p in self.poles))

    @cached_property
    def locations(self) -> np.ndarray:
        return np.array([p.location for p in self.poles], dtype=complex)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([p.multiplicity for p in self.poles], dtype=float)

    @property
    def pole_count(self) -> int:
        return len(self.poles)

    @property
    def max_abs_real(self) -> float:
        return max(abs(p.re) for p in self.poles)

    @property
    def heights(self) -> np.ndarray:
        return np.abs(self.locations.imag)

    def is_conjugate_symmetric(self) -> bool:
        index = {p.location: p.multiplicity for p in self.poles}
        return all(index.get(p.location.conjugate()) == p.multiplicity for p in self.poles)

    def __iter__(self):
        return iter(self.poles)

    def __str__(self):
        return ' + '.join(str(p) for p in self.poles)


def is_finite_complex(value: complex) -> bool:
    return math.isfinite(value.real) and math.isfinite(value.imag)


def format_complex(value: complex) -> str:
    """Render as "re+imi", e.g. "1.0+0.0i"."""
    sign = '-' if math.copysign(1.0, value.imag) < 0 else '+'
    return f"{float(value.real)!r}{sign}{abs(float(value.imag))!r}i"
