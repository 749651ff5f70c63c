import math
from dataclasses import dataclass
from typing import Optional

from django.db import models
from django.utils.translation import gettext_lazy as _


class FunctionalKind(models.TextChoices):
    GORIN = 'gorin', _('Gorin: Y * ||rho||_p^q')
    GELFOND = 'gelfond', _("Gelfond: Y * ||rho'||_p^(q/(q+1))")


@dataclass(frozen=True)
class NormResult:
    """
    A norm on the real axis with a bound on |reported - true|.

    witness is the argmax for sup-norms and None for L^p norms.
    """
    value: float
    witness: Optional[float]
    certified_error: float


@dataclass(frozen=True)
class FunctionalValue:
    kind: str
    p: float
    value: float
    norm: float
    y: float

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)


def conjugate_exponent(p: float) -> float:
    """q with 1/p + 1/q = 1; q = 1 at p = inf."""
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)
