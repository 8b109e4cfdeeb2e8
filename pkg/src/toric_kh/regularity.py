"""K-regularity verdicts for complete simplicial toric varieties.

Verdicts hold over fields of characteristic 0.  K_0-regularity is asserted only
where the F_K groups split over the maximal charts (surfaces, or isolated
singularities in higher dimension); each chart then has vanishing F_K in
degrees <= 0.  Failures are asserted only with a computed witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .fan import (Cone, Fan, FanError, SingularityReport, cone_index, cone_normal_form_2d,
                  is_complete, is_smooth_cone, make_wps_fan, singular_locus)
from .forms import GradedCechComplex, WitnessVerdict

CHAR_ZERO = "verdicts are over a field of characteristic 0"
NEGATIVE_K_NOTE = ("K_n of every affine chart vanishes for n <= -1 and K_0 of a chart is Z, "
                   "so (F_K)_n of each chart vanishes for n <= 0")


class Verdict(str, Enum):
    REGULAR = "REGULAR"
    UNKNOWN = "UNKNOWN"
    NOT_REGULAR = "NOT_REGULAR"


class NotCompleteError(FanError):
    pass


@dataclass(frozen=True)
class Decomposition:
    applies: bool
    reason: str
    witness: Cone | None = None


@dataclass(frozen=True)
class FormsWitness:
    """A nonzero top Čech class of Ω^j, evidence against K_0-regularity."""

    form_degree: int
    mu: tuple[int, ...]
    class_vector: tuple
    mode: str
    verdict: WitnessVerdict

    @classmethod
    def from_complex(cls, cx: GradedCechComplex, class_vector, verdict: WitnessVerdict) -> FormsWitness:
        return cls(cx.form_degree, cx.mu, tuple(class_vector), cx.mode.value, verdict)


@dataclass
class RegularityReport:
    dim: int
    complete: bool
    singular: SingularityReport
    decomposition_applies: bool
    decomposition_reason: str
    k0_verdict: Verdict
    k0_witness: object = None
    k1_verdict: Verdict = Verdict.UNKNOWN
    k1_witnesses: list[Cone] = field(default_factory=list)
    k_negative_note: str = NEGATIVE_K_NOTE
    notes: list[str] = field(default_factory=list)
    assumptions: tuple[str, ...] = (CHAR_ZERO,)


def decomposition_applies(fan: Fan) -> Decomposition:
    if not is_complete(fan):
        raise NotCompleteError("the F_K decomposition needs a complete fan")
    if fan.dim <= 2:
        return Decomposition(True, "complete toric surface: F_K splits over the maximal charts")
    maximal = set(fan.max_cones)
    for c in fan.all_cones():
        if c not in maximal and not is_smooth_cone(fan, c):
            return Decomposition(False, f"non-maximal cone {c.ray_indices} is singular "
                                        f"(index {cone_index(fan, c)}); singular locus has positive dimension", c)
    return Decomposition(True, "singular locus is 0-dimensional: F_K splits over the maximal charts")


def surface_k1_obstruction(fan: Fan) -> tuple[list[Cone], Verdict]:
    """Maximal cones whose chart is k[u,v,w]/(uw - v^2), and the K_1 verdict."""
    if fan.dim != 2:
        raise FanError("the K_1 obstruction is defined for surfaces")
    if not is_complete(fan):
        raise NotCompleteError("the K_1 obstruction needs a complete fan")
    forms = {c: cone_normal_form_2d(fan.vectors(c)) for c in fan.max_cones}
    witnesses = [c for c, nf in forms.items() if nf == (2, 1)]
    others = [c for c, nf in forms.items() if nf[0] > 1 and nf != (2, 1)]
    if witnesses and not others:
        return witnesses, Verdict.NOT_REGULAR
    return witnesses, Verdict.UNKNOWN


def _singularity_profile(fan: Fan) -> list[tuple[int, int]]:
    return sorted((c.dim, cone_index(fan, c)) for c in singular_locus(fan).singular_cones)


def _matches_p1124(fan: Fan) -> bool:
    if fan.dim != 3 or len(fan.rays) != 4 or len(fan.max_cones) != 4:
        return False
    return _singularity_profile(fan) == _singularity_profile(make_wps_fan((1, 1, 2, 4)))


def regularity_report(fan: Fan, forms_witness: FormsWitness | None = None) -> RegularityReport:
    if not is_complete(fan):
        raise NotCompleteError("regularity verdicts need a complete fan")
    sing = singular_locus(fan)
    dec = decomposition_applies(fan)
    notes = []
    if dec.applies:
        k0, k0_witness = Verdict.REGULAR, None
    elif forms_witness is not None and forms_witness.verdict is WitnessVerdict.NONZERO_CLASS:
        k0, k0_witness = Verdict.NOT_REGULAR, forms_witness
        notes.append("a nonzero top Čech class of Ω^j obstructs K_0-regularity (cdh side vanishes for "
                     "quotients of projective space)")
    else:
        k0, k0_witness = Verdict.UNKNOWN, dec.witness
    k1, k1_w = Verdict.UNKNOWN, []
    if fan.dim == 2:
        k1_w, k1 = surface_k1_obstruction(fan)
        if k1 is Verdict.NOT_REGULAR:
            notes.append("charts of normal form (2,1) are k[u,v,w]/(uw - v^2), whose (F_K)_1 is nonzero")
    if _matches_p1124(fan):
        notes.append("K_{-1}-regular: singularity profile matches P(1,1,2,4) (cited, not re-derived)")
    return RegularityReport(fan.dim, True, sing, dec.applies, dec.reason, k0, k0_witness, k1, k1_w,
                            notes=notes)
