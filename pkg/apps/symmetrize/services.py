"""
Reduction of an arbitrary SPF to a four-fold symmetric configuration.

Stages, for a target pole i y1 (after a horizontal shift):
  s1(z)     = rho(z) + conj(rho(conj z))
  sigma0(z) = s1(z) - conj(s1(-conj z))
  sigma     = upper half-plane part of sigma0
  rho(z)    = sigma(z - i y1) + conj(sigma(conj z - i y1))
  R(z)      = rho(z / 4) / 4
"""
import logging
from dataclasses import replace

from apps.blaschke.services import configuration_from_spf
from apps.core.exceptions import DegenerateCancellation, IndexOutOfRange
from apps.core.models import SPF
from apps.core.services import (
    conjugate_closure, make_spf, mirror_closure, rescale, split_half_planes, translate,
)
from apps.norms.services import sup_norm_real

from .models import PipelineOutput

logger = logging.getLogger(__name__)


def symmetrize_real(spf: SPF) -> SPF:
    """s1(z) = rho(z) + conj(rho(conj z)); coincident poles add multiplicities."""
    return conjugate_closure(spf)


def antisymmetrize_imag(spf: SPF) -> SPF:
    """sigma0(z) = s1(z) - conj(s1(-conj z)): poles closed under z -> -conj(z)."""
    sigma0 = mirror_closure(spf)
    if sigma0.order != 2 * spf.order:
        raise DegenerateCancellation(
            f"Antisymmetrization lost residues: order {sigma0.order} from {spf.order}."
        )
    return sigma0


def lift_and_scale(sigma0: SPF, y1: float, with_norms: bool = True) -> PipelineOutput:
    """
    Lift the upper part of sigma0 by i y1, restore conjugate symmetry and
    dilate by 4. The tracked pole i y1 of sigma0 ends at 8i y1.
    """
    sigma, _ = split_half_planes(sigma0)
    if sigma is None:
        raise DegenerateCancellation("sigma0 has no poles in the upper half-plane.")
    lifted = [(p.location + 1j * y1, p.multiplicity) for p in sigma.poles]
    rho = make_spf(lifted + [(location.conjugate(), mult) for location, mult in lifted])
    big_r = rescale(rho, 0.25)

    tracked_pole = complex(0.0, 8.0 * y1)
    tracked_residue = next((p.multiplicity for p in big_r.poles if p.location == tracked_pole), 0)

    sigma0_norm = result_norm = None
    if with_norms:
        sigma0_norm = sup_norm_real(sigma0).value
        result_norm = sup_norm_real(big_r).value
    return PipelineOutput(
        result=configuration_from_spf(big_r),
        tracked_pole=tracked_pole,
        tracked_residue=tracked_residue,
        source_height=y1,
        sigma0_sup_norm=sigma0_norm,
        result_sup_norm=result_norm,
        stages={'sigma0': sigma0, 'sigma': sigma, 'rho': rho, 'R': big_r},
    )


def run_pipeline(spf: SPF, target_pole_index: int, with_norms: bool = True) -> PipelineOutput:
    """
    symmetrize_real -> antisymmetrize_imag -> lift_and_scale around the pole
    at target_pole_index (0-based, in the SPF's sorted order).

    The SPF is first shifted horizontally so the target pole is purely
    imaginary; a lower half-plane target is tracked through its conjugate.
    """
    if not 0 <= target_pole_index < spf.pole_count:
        raise IndexOutOfRange(f"Pole index must lie in 0..{spf.pole_count - 1}, got {target_pole_index}.")
    target = spf.poles[target_pole_index]
    y1 = abs(target.im)

    shifted = translate(spf, -target.re) if target.re != 0 else spf
    s1 = symmetrize_real(shifted)
    sigma0 = antisymmetrize_imag(s1)
    output = lift_and_scale(sigma0, y1, with_norms=with_norms)

    source_norm = sup_norm_real(spf).value if with_norms else None
    norm_factor = output.sigma0_sup_norm / source_norm if with_norms else None
    logger.info(
        f"Symmetrized order {spf.order} around pole {target.location!r}: order {2 * output.result.eta2}, "
        f"tracked residue {output.tracked_residue}"
        + (f", norm factor {norm_factor:.6g}" if with_norms else '')
    )
    return replace(
        output,
        source_sup_norm=source_norm,
        norm_factor=norm_factor,
        stages={'s1': s1, **output.stages},
    )


def lifted_part(output: PipelineOutput) -> SPF:
    """The upper half-plane part of R, i.e. R(z) = lifted(z) + conj(lifted(conj z))."""
    upper, _ = split_half_planes(output.stages['R'])
    return upper
