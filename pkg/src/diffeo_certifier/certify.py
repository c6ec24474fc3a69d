"""The certification pipeline.

A polynomial map F is a global C^1-diffeomorphism of R^n iff

    (H1) det JF(x) != 0 for every x, and
    (H2) ||F||^2 is coercive.

(H1) is settled by ``jacobian.nonvanishing_analysis``; (H2) by
``coercivity_verdict`` on f = ||F||^2, possibly after a change of
coordinates y = A x (coercivity of f o A^-1 and of f are equivalent).
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import Field

from diffeo_certifier.circuits import (
    CircuitCertificate,
    CircuitNumber,
    NecessaryVerdict,
    WeightAssignment,
    caratheodory_decompose,
    circuit_number,
    necessary_condition_check,
    sufficient_inequality,
)
from diffeo_certifier.common import Exponent, FrozenModel, Rational, is_even, logger, settings
from diffeo_certifier.conditions import ConditionsReport, check_conditions
from diffeo_certifier.exceptions import InternalConsistencyError, MissingWeightError
from diffeo_certifier.geometry import GemAnalysis, classify_support
from diffeo_certifier.jacobian import (
    CertificateKind,
    NonvanishingStatus,
    NonvanishingTag,
    det_at_origin,
    jacobian_determinant,
    jacobian_determinant_oracle,
    jacobian_transform_law,
    nonvanishing_analysis,
)
from diffeo_certifier.polynomials import (
    Polynomial,
    PolynomialMap,
    RationalMatrix,
    compose_linear,
    sos,
)
from diffeo_certifier.settings import SamplingBudget
from diffeo_certifier.transforms import MatrixFamily
from diffeo_certifier.weighting import get_weighting


class CoercivityTag(str, Enum):
    COERCIVE = "Coercive"
    NOT_COERCIVE = "NotCoercive"
    UNKNOWN = "Unknown"


class TheoremUsed(str, Enum):
    CHARACTERIZATION = "characterization"
    SUFFICIENT = "sufficient"
    NECESSARY_VIOLATION = "necessary-violation"
    NONE = "none"


class DiffeoVerdict(str, Enum):
    DIFFEOMORPHISM = "Diffeomorphism"
    NOT_DIFFEOMORPHISM = "NotDiffeomorphism"
    UNKNOWN = "Unknown"

    @property
    def exit_code(self) -> int:
        return {
            DiffeoVerdict.DIFFEOMORPHISM: 0,
            DiffeoVerdict.NOT_DIFFEOMORPHISM: 1,
            DiffeoVerdict.UNKNOWN: 2,
        }[self]


class CoercivityVerdict(FrozenModel):
    tag: CoercivityTag
    theorem: TheoremUsed
    polynomial: str
    analysis: GemAnalysis
    conditions: ConditionsReport
    necessary: Optional[NecessaryVerdict] = None
    certificates: Tuple[CircuitCertificate, ...] = ()
    weights: Optional[WeightAssignment] = None
    via_transform: bool = False
    notes: Tuple[str, ...] = ()


class TransformRecord(FrozenModel):
    """A^-1 with the verdict for ||F o A^-1||^2."""

    matrix: RationalMatrix
    inverse_determinant: Rational
    det_at_origin: Rational
    verdict: CoercivityVerdict
    tried: int


class DiffeoReport(FrozenModel):
    verdict: DiffeoVerdict
    h1: NonvanishingStatus
    h2: CoercivityVerdict
    jacobian: str
    det_at_origin: Rational
    transform: Optional[TransformRecord] = None
    transforms_tried: int = 0
    notes: Tuple[str, ...] = ()


class CertifyOptions(FrozenModel):
    transforms: bool = False
    transform_bound: int = Field(default_factory=lambda: settings.transform_bound, ge=1)
    transform_budget: int = Field(default_factory=lambda: settings.transform_budget, ge=1)
    weights: str = Field(default_factory=lambda: settings.weights)
    assert_nonvanishing: bool = False
    sampling: SamplingBudget = Field(default_factory=lambda: settings.sampling)
    verify_determinant: bool = Field(default_factory=lambda: settings.verify_determinant)


def _circuit_candidates(f: Polynomial, analysis: GemAnalysis) -> Dict[Exponent, List[CircuitNumber]]:
    return {
        alpha_star: [
            circuit_number(f, decomposition)
            for decomposition in caratheodory_decompose(alpha_star, analysis.vertices_at_infinity)
        ]
        for alpha_star in analysis.degenerate
    }


def coercivity_verdict(
    f: Polynomial,
    weights: Optional[WeightAssignment] = None,
    strategy: str = "default",
) -> CoercivityVerdict:
    """Coercive, NotCoercive or Unknown for f, with the evidence behind it.

    Order: classify the support; any of (C1)-(C3) failing refutes; gem
    regular with (C1)-(C3) is coercive; a violated circuit lower or upper
    bound refutes; otherwise the weighted strict circuit inequalities either
    certify or leave the question open.
    """
    text = str(f)
    analysis = classify_support(f)
    conditions = check_conditions(f, analysis)
    base = dict(polynomial=text, analysis=analysis, conditions=conditions)

    if not conditions.all_hold:
        necessary = necessary_condition_check(f, analysis, conditions)
        logger.debug(f"conditions fail for {text}: {necessary.detail}")
        return CoercivityVerdict(
            tag=CoercivityTag.NOT_COERCIVE,
            theorem=TheoremUsed.NECESSARY_VIOLATION,
            necessary=necessary,
            **base,
        )
    if analysis.gem_regular:
        return CoercivityVerdict(
            tag=CoercivityTag.COERCIVE, theorem=TheoremUsed.CHARACTERIZATION, **base
        )

    necessary = necessary_condition_check(f, analysis, conditions)
    notes = ()
    if necessary.inapplicable:
        notes = (
            f"necessary conditions inapplicable for {list(necessary.inapplicable)}",
        )
    if not necessary.passed:
        return CoercivityVerdict(
            tag=CoercivityTag.NOT_COERCIVE,
            theorem=TheoremUsed.NECESSARY_VIOLATION,
            necessary=necessary,
            notes=notes,
            **base,
        )

    candidates = _circuit_candidates(f, analysis)
    if weights is None:
        weights = get_weighting(strategy).assign(f, candidates)
    assigned = {entry.alpha for entry in weights.entries}
    missing = [alpha for alpha in candidates if alpha not in assigned]
    if missing:
        raise MissingWeightError(f"no weight given for degenerate exponents {missing}")
    certificates = []
    for alpha_star, circuits in candidates.items():
        weight = weights.weight_of(alpha_star)
        even = is_even(alpha_star)
        holding = next(
            (c for c in circuits if sufficient_inequality(f, c, weight, even)), None
        )
        certificates.append(
            CircuitCertificate(
                alpha_star=alpha_star,
                coefficient=f.coefficient(alpha_star),
                even=even,
                weight=weight,
                circuit=holding or circuits[0],
                holds=holding is not None,
            )
        )
    coercive = all(c.holds for c in certificates)
    return CoercivityVerdict(
        tag=CoercivityTag.COERCIVE if coercive else CoercivityTag.UNKNOWN,
        theorem=TheoremUsed.SUFFICIENT if coercive else TheoremUsed.NONE,
        necessary=necessary,
        certificates=tuple(certificates),
        weights=weights,
        notes=notes,
        **base,
    )


def transform_search(
    F: PolynomialMap,
    family: Optional[MatrixFamily] = None,
    baseline: Optional[CoercivityVerdict] = None,
    strategy: str = "default",
) -> Tuple[Optional[TransformRecord], int]:
    """First A^-1 in the family with ||F o A^-1||^2 certified coercive.

    Returns the record (None once the family is exhausted) and the number of
    matrices tried. A decided ``baseline`` makes the search a no-op.
    """
    if baseline is not None and baseline.tag != CoercivityTag.UNKNOWN:
        return None, 0
    family = family or MatrixFamily(dimension=F.dimension)
    tried = 0
    for matrix in family:
        tried += 1
        transformed = compose_linear(F, matrix)
        verdict = coercivity_verdict(sos(transformed), strategy=strategy)
        logger.debug(f"transform {matrix.rows()}: {verdict.tag.value}")
        if verdict.tag == CoercivityTag.COERCIVE:
            if not jacobian_transform_law(F, transformed, matrix):
                raise InternalConsistencyError(
                    f"det J(F o A^-1) differs from det A^-1 * (det JF o A^-1) for A^-1 = {matrix.rows()}"
                )
            inverse_det = matrix.determinant()
            transformed_det = det_at_origin(transformed)
            return (
                TransformRecord(
                    matrix=matrix,
                    inverse_determinant=inverse_det,
                    det_at_origin=transformed_det,
                    verdict=verdict,
                    tried=tried,
                ),
                tried,
            )
    return None, tried


def _resolve_h1(d: Polynomial, options: CertifyOptions) -> NonvanishingStatus:
    h1 = nonvanishing_analysis(d, options.sampling)
    if not options.assert_nonvanishing:
        return h1
    if h1.tag == NonvanishingTag.UNKNOWN:
        return h1.model_copy(
            update={
                "tag": NonvanishingTag.ASSERTED_NONVANISHING,
                "certificate_kind": CertificateKind.SAMPLING_ASSERTION,
            }
        )
    if h1.tag.vanishing:
        logger.warning(
            f"--assert-nonvanishing contradicted: det JF has a {h1.tag.value} "
            f"at {[tuple(str(v) for v in w) for w in h1.witnesses]}"
        )
    return h1


def diffeomorphism_verdict(F: PolynomialMap, options: Optional[CertifyOptions] = None) -> DiffeoReport:
    options = options or CertifyOptions()
    d = jacobian_determinant(F)
    if options.verify_determinant and jacobian_determinant_oracle(F) != d:
        raise InternalConsistencyError("determinant formula and cofactor expansion disagree")
    h1 = _resolve_h1(d, options)
    origin_det = det_at_origin(F)
    if origin_det != d.coefficient((0,) * F.dimension):
        raise InternalConsistencyError("det JF(0) differs from the constant term of det JF")

    f = sos(F)
    h2 = coercivity_verdict(f, strategy=options.weights)
    notes: List[str] = []
    if origin_det != 0:
        notes.append("det JF(0) != 0, so ||F||^2 has an even vertex on every axis")
        if not h2.conditions.c3.holds:
            raise InternalConsistencyError("det JF(0) != 0 but (C3) fails for ||F||^2")

    transform = None
    tried = 0
    if h2.tag == CoercivityTag.UNKNOWN and options.transforms and not h1.tag.vanishing:
        family = MatrixFamily(
            dimension=F.dimension, bound=options.transform_bound, budget=options.transform_budget
        )
        transform, tried = transform_search(F, family, baseline=h2, strategy=options.weights)
        if transform is not None:
            h2 = h2.model_copy(
                update={
                    "tag": CoercivityTag.COERCIVE,
                    "theorem": transform.verdict.theorem,
                    "via_transform": True,
                    "notes": h2.notes
                    + ("coercive since ||F o A^-1||^2 is coercive for the recorded A^-1",),
                }
            )
        else:
            notes.append(f"no coercive transform among {tried} matrices")

    if h1.tag.vanishing or h2.tag == CoercivityTag.NOT_COERCIVE:
        verdict = DiffeoVerdict.NOT_DIFFEOMORPHISM
    elif h1.tag.nonvanishing and h2.tag == CoercivityTag.COERCIVE:
        verdict = DiffeoVerdict.DIFFEOMORPHISM
    else:
        verdict = DiffeoVerdict.UNKNOWN
        if h1.tag.nonvanishing:
            notes.append("det JF never vanishes but coercivity is undecided; F may still be a diffeomorphism")
    logger.info(f"{F}: {verdict.value}")
    return DiffeoReport(
        verdict=verdict,
        h1=h1,
        h2=h2,
        jacobian=str(d),
        det_at_origin=origin_det,
        transform=transform,
        transforms_tried=tried,
        notes=tuple(notes),
    )


class Certifier:
    """Certifier(options)(F) -> DiffeoReport; options fixed once for many maps."""

    def __init__(self, options: Optional[CertifyOptions] = None, **overrides):
        options = options or CertifyOptions()
        self.options = options.model_copy(update=overrides) if overrides else options

    def coercivity(self, f: Polynomial) -> CoercivityVerdict:
        return coercivity_verdict(f, strategy=self.options.weights)

    def __call__(self, F: PolynomialMap) -> DiffeoReport:
        return diffeomorphism_verdict(F, self.options)
