"""
Search configuration and result types.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from django.db import models
from django.utils.translation import gettext_lazy as _

from apps.bounds.models import BoundReport
from apps.core.exceptions import DomainError
from apps.core.models import SPF
from apps.norms.models import FunctionalKind, FunctionalValue


class MultiplicityPattern(models.TextChoices):
    ONES = 'ones', _('All simple poles')
    SINGLE_HEAVY = 'single-heavy', _('One pole of multiplicity ceil(n/2), the rest simple')
    BALANCED = 'balanced', _('ceil(sqrt(n)) poles with near-equal multiplicities')


def multiplicity_pattern(name: str, n: int) -> Tuple[int, ...]:
    """Pole multiplicities, summing to n, for one of the MultiplicityPattern names."""
    if n < 1:
        raise DomainError(f"Order must be positive, got {n}.")
    if name == MultiplicityPattern.ONES:
        return (1,) * n
    if name == MultiplicityPattern.SINGLE_HEAVY:
        heavy = math.ceil(n / 2)
        return (heavy,) + (1,) * (n - heavy)
    if name == MultiplicityPattern.BALANCED:
        count = math.ceil(math.sqrt(n))
        base, extra = divmod(n, count)
        return (base + 1,) * extra + (base,) * (count - extra)
    raise DomainError(f"Unknown multiplicity pattern {name!r}.")


@dataclass(frozen=True)
class SearchConfig:
    order_n: int
    multiplicity_pattern: Tuple[int, ...]
    functional: str = FunctionalKind.GORIN.value
    p: float = math.inf
    restrict_upper_half: bool = False
    multistarts: int = 32
    eval_budget: int = 20000
    seed: int = 0
    pattern_name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'multiplicity_pattern', tuple(int(m) for m in self.multiplicity_pattern))
        if self.order_n < 1:
            raise DomainError(f"Order must be positive, got {self.order_n}.")
        if any(m < 1 for m in self.multiplicity_pattern) or sum(self.multiplicity_pattern) != self.order_n:
            raise DomainError(
                f"Multiplicities {list(self.multiplicity_pattern)} do not sum to n = {self.order_n}."
            )
        if self.functional not in FunctionalKind.values:
            raise DomainError(f"Unknown functional {self.functional!r}.")
        if not self.p > 1:
            raise DomainError(f"p must exceed 1, got {self.p!r}.")
        if self.multistarts < 1 or self.eval_budget < 1:
            raise DomainError("multistarts and eval_budget must be positive.")
        if self.seed < 0:
            raise DomainError(f"seed must be unsigned, got {self.seed}.")

    @classmethod
    def for_pattern(cls, name: str, n: int, **kwargs) -> 'SearchConfig':
        return cls(order_n=n, multiplicity_pattern=multiplicity_pattern(name, n), pattern_name=name, **kwargs)


@dataclass(frozen=True)
class SearchRecord:
    """
    Best configuration found by optimize().

    best_value is the functional of best_spf recomputed at full accuracy;
    history holds (evaluation, running minimum) pairs of the winning start;
    best_vector is the winning parameter vector (x.., log y..) before gauge fixing.
    """
    best_spf: SPF
    best_value: float
    history: Tuple[Tuple[int, float], ...]
    config: SearchConfig
    wall_evals: int
    best_start: int = 0
    budget_exhausted: bool = False
    best_vector: Tuple[float, ...] = ()


@dataclass(frozen=True)
class ScanRow:
    n: int
    pattern: str
    best_value: float
    reference_rate: Optional[float]
    ratio: Optional[float]
    seed: int
    evals: int
    record: Optional[SearchRecord] = None


@dataclass(frozen=True)
class CertificateBundle:
    recomputed: FunctionalValue
    reports: List[BoundReport] = field(default_factory=list)
    anomalies: List[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.anomalies
