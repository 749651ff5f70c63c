from dataclasses import dataclass, field
from typing import Dict, Optional

from apps.blaschke.models import SymmetricConfiguration
from apps.core.models import SPF

STAGE_NAMES = ('s1', 'sigma0', 'sigma', 'rho', 'R')


@dataclass(frozen=True)
class PipelineOutput:
    """
    Result of the symmetrization pipeline.

    tracked_pole is 8i y1 for a target pole of height y1; norm_factor is
    ||sigma0||_inf / ||input||_inf, at most 4. stages maps STAGE_NAMES to the
    intermediate SPFs.
    """
    result: SymmetricConfiguration
    tracked_pole: complex
    tracked_residue: int
    source_height: float
    sigma0_sup_norm: Optional[float] = None
    result_sup_norm: Optional[float] = None
    source_sup_norm: Optional[float] = None
    norm_factor: Optional[float] = None
    stages: Dict[str, SPF] = field(default_factory=dict)
