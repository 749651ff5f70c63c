"""
Symmetric pole configurations in the upper half-plane and the real solutions
of B(x) = -1.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from apps.core.models import Pole


@dataclass(frozen=True)
class SymmetricConfiguration:
    """
    Upper half-plane poles z_k = x_k + i y_k, closed under z -> -conj(z) with
    equal multiplicities; poles on the imaginary axis carry even multiplicity.

    eta2 (= 2 eta) is the total multiplicity. Build instances through
    apps.blaschke.services.make_configuration.
    """
    upper_poles: Tuple[Pole, ...]
    eta2: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'eta2', sum(p.multiplicity for p in self.upper_poles))

    @property
    def eta(self) -> int:
        return self.eta2 // 2

    @cached_property
    def x(self) -> np.ndarray:
        return np.array([p.re for p in self.upper_poles], dtype=float)

    @cached_property
    def y(self) -> np.ndarray:
        return np.array([p.im for p in self.upper_poles], dtype=float)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([p.multiplicity for p in self.upper_poles], dtype=float)

    @property
    def min_height(self) -> float:
        return float(np.min(self.y))

    @property
    def max_abs_real(self) -> float:
        return float(np.max(np.abs(self.x)))

    def __iter__(self):
        return iter(self.upper_poles)


@dataclass(frozen=True)
class RootSet:
    """Sorted t_1 < ... < t_2eta; antisymmetric, never containing 0."""
    roots: Tuple[float, ...]

    @property
    def eta(self) -> int:
        return len(self.roots) // 2

    @property
    def positive_roots(self) -> Tuple[float, ...]:
        return self.roots[self.eta:]

    def __len__(self):
        return len(self.roots)
