"""
Report types for inequality checks.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional


@dataclass(frozen=True)
class BoundReport:
    """
    Outcome of one inequality check.

    The meaning of `passed` depends on the check: lemma checks are hard
    pass/fail, theorem checks only record a ratio since the absolute constant
    is unknown.
    """
    name: str
    lhs: float
    rhs_without_constant: float
    passed: bool
    ratio: Optional[float] = None
    context: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, name, lhs, rhs_without_constant, passed, **context):
        ratio = None
        if rhs_without_constant > 0 and math.isfinite(lhs):
            ratio = lhs / rhs_without_constant
        return cls(
            name=name,
            lhs=float(lhs),
            rhs_without_constant=float(rhs_without_constant),
            passed=bool(passed),
            ratio=ratio,
            context=context,
        )

    def __str__(self):
        verdict = 'pass' if self.passed else 'FAIL'
        return f"{self.name}: lhs={self.lhs:.6g} rhs={self.rhs_without_constant:.6g} [{verdict}]"


@dataclass(frozen=True)
class HistoricalBound:
    name: str
    value: Optional[float]
    constant_dropped: bool = False
    note: str = ''
