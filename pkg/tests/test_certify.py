import logging
from fractions import Fraction

import pytest

from diffeo_certifier.certify import (
    Certifier,
    CertifyOptions,
    CoercivityTag,
    DiffeoVerdict,
    TheoremUsed,
    coercivity_verdict,
    diffeomorphism_verdict,
    transform_search,
)
from diffeo_certifier.circuits import WeightAssignment
from diffeo_certifier.conditions import axis_exponent_criterion, check_conditions
from diffeo_certifier.geometry import classify_support
from diffeo_certifier.exceptions import MissingWeightError, UnknownStrategyError
from diffeo_certifier.jacobian import CertificateKind, NonvanishingTag
from diffeo_certifier.polynomials import Polynomial, RationalMatrix, sos
from diffeo_certifier.settings import SamplingBudget
from diffeo_certifier.transforms import MatrixFamily
from diffeo_certifier.weighting import get_weighting
from diffeo_certifier.weighting.proportional import ProportionalWeights
from diffeo_certifier.weighting.uniform import UniformWeights
from tests.data_for_tests import *

logging.getLogger("diffeo_certifier").setLevel(logging.DEBUG)
logger = logging.getLogger("diffeo_certifier_test")

SMALL_SAMPLING = SamplingBudget(uniform_points=30, random_lines=3)

# two degenerate exponents on one edge; only a lopsided weighting certifies it
LOPSIDED = {(6, 0): 1, (0, 6): 1, (3, 3): Fraction(3, 2), (2, 4): 1}


def test_check_conditions_examples():
    report = check_conditions(Polynomial(2, F1_SOS))
    assert report.all_hold
    assert report.c3.k(1) == 3 and report.c3.k(2) == 3

    report = check_conditions(poly("x1^3 + x2^2"))
    assert not report.c1.holds
    assert report.c1.violating == ((3, 0),)

    report = check_conditions(poly("x1^2 + x1^2*x2^2"))
    assert not report.c3.holds
    assert report.c3.missing_axes == (2,)


def test_axis_exponent_criterion():
    assert axis_exponent_criterion(t_family(1))
    assert axis_exponent_criterion(poly_map("x1*x2 + x2^2", "x1^3"))
    assert not axis_exponent_criterion(poly_map("x1*x2", "x1 + x1^2"))


def test_coercive_by_characterization():
    verdict = coercivity_verdict(Polynomial(2, F1_SOS))
    assert verdict.tag == CoercivityTag.COERCIVE
    assert verdict.theorem == TheoremUsed.CHARACTERIZATION
    assert verdict.certificates == ()


def test_coercive_by_circuit_inequality():
    verdict = coercivity_verdict(t_family_sos(Fraction(-1, 2)))
    assert verdict.tag == CoercivityTag.COERCIVE
    assert verdict.theorem == TheoremUsed.SUFFICIENT
    (certificate,) = verdict.certificates
    assert certificate.alpha_star == (3, 3)
    assert certificate.holds
    assert certificate.circuit.power_form == 10


def test_boundary_case_stays_unknown():
    verdict = coercivity_verdict(t_family_sos(-1))
    assert verdict.tag == CoercivityTag.UNKNOWN
    assert verdict.theorem == TheoremUsed.NONE
    assert verdict.necessary.passed
    (certificate,) = verdict.certificates
    assert not certificate.holds


def test_transformed_polynomial_is_coercive():
    verdict = coercivity_verdict(Polynomial(2, TRANSFORMED_SOS))
    assert verdict.tag == CoercivityTag.COERCIVE
    assert verdict.theorem == TheoremUsed.SUFFICIENT
    assert verdict.certificates[0].circuit.power_form == 2304


def test_not_coercive_below_circuit_number():
    verdict = coercivity_verdict(poly("x1^4 + x2^4 - 3*x1^2*x2^2"))
    assert verdict.tag == CoercivityTag.NOT_COERCIVE
    assert verdict.theorem == TheoremUsed.NECESSARY_VIOLATION


def test_exactly_at_circuit_number_is_unknown():
    verdict = coercivity_verdict(poly("x1^4 + x2^4 - 2*x1^2*x2^2"))
    assert verdict.tag == CoercivityTag.UNKNOWN


def test_not_coercive_when_vertex_conditions_fail():
    verdict = coercivity_verdict(poly("x1^3 + x2^2"))
    assert verdict.tag == CoercivityTag.NOT_COERCIVE
    assert verdict.necessary.clause.value == "C1"


def test_explicit_weights_are_used():
    f = t_family_sos(Fraction(-1, 2))
    too_small = WeightAssignment.of({(3, 3): Fraction(1, 2)}, strategy="manual")
    verdict = coercivity_verdict(f, weights=too_small)
    assert verdict.tag == CoercivityTag.UNKNOWN
    assert verdict.weights.strategy == "manual"


def test_proportional_weights_certify_lopsided_polynomial():
    f = Polynomial(2, LOPSIDED)
    assert coercivity_verdict(f).tag == CoercivityTag.UNKNOWN
    verdict = coercivity_verdict(f, strategy="proportional")
    assert verdict.tag == CoercivityTag.COERCIVE
    assert verdict.weights.strategy == "proportional"
    assert verdict.notes


def test_weighting_registry():
    assert isinstance(get_weighting("default"), UniformWeights)
    assert isinstance(get_weighting("uniform"), UniformWeights)
    assert isinstance(get_weighting("proportional"), ProportionalWeights)
    with pytest.raises(UnknownStrategyError):
        get_weighting("greedy")


def test_uniform_weights_split_evenly():
    f = Polynomial(2, LOPSIDED)
    weights = UniformWeights().assign(f, {(3, 3): [], (2, 4): []})
    assert weights.weight_of((3, 3)) == weights.weight_of((2, 4)) == Fraction(1, 2)


def test_diffeomorphism_for_positive_t():
    report = diffeomorphism_verdict(t_family(1))
    assert report.verdict == DiffeoVerdict.DIFFEOMORPHISM
    assert report.verdict.exit_code == 0
    assert report.h1.tag == NonvanishingTag.POSITIVE_EVERYWHERE
    assert report.h2.theorem == TheoremUsed.CHARACTERIZATION
    assert report.det_at_origin == 1


def test_not_diffeomorphism_below_minus_one():
    report = diffeomorphism_verdict(t_family(-2))
    assert report.verdict == DiffeoVerdict.NOT_DIFFEOMORPHISM
    assert report.verdict.exit_code == 1
    assert report.h1.tag == NonvanishingTag.SIGN_CHANGE_WITNESS


def test_boundary_map_unknown_without_transforms():
    report = diffeomorphism_verdict(t_family(-1))
    assert report.verdict == DiffeoVerdict.UNKNOWN
    assert report.verdict.exit_code == 2
    assert report.h1.tag == NonvanishingTag.POSITIVE_EVERYWHERE
    assert report.transform is None
    assert report.notes


def test_boundary_map_certified_with_transforms():
    report = diffeomorphism_verdict(t_family(-1), CertifyOptions(transforms=True))
    assert report.verdict == DiffeoVerdict.DIFFEOMORPHISM
    assert report.h2.tag == CoercivityTag.COERCIVE
    assert report.h2.via_transform
    record = report.transform
    assert record is not None
    assert record.verdict.tag == CoercivityTag.COERCIVE
    assert record.matrix.is_regular()
    assert record.det_at_origin == report.det_at_origin * record.inverse_determinant
    assert report.transforms_tried == record.tried


def test_triangular_map_is_honestly_unknown():
    F = poly_map(*TRIANGULAR_MAP_TEXT)
    report = diffeomorphism_verdict(F, CertifyOptions(transforms=True))
    assert report.verdict == DiffeoVerdict.UNKNOWN
    assert report.h1.tag.nonvanishing
    assert report.h2.tag == CoercivityTag.UNKNOWN
    assert report.h2.analysis.degenerate == ((2, 1),)
    assert report.transform is None
    assert report.transforms_tried > 0


def test_vanishing_determinant_refutes():
    report = diffeomorphism_verdict(poly_map("x1^3", "x2"))
    assert report.verdict == DiffeoVerdict.NOT_DIFFEOMORPHISM
    assert report.h1.tag == NonvanishingTag.ZERO_WITNESS


def test_assert_nonvanishing():
    # det JF = 1 + x1 + x1^2 has no even-monomial certificate
    F = poly_map("x1 + 1/2*x1^2 + 1/3*x1^3", "x2")
    options = CertifyOptions(sampling=SMALL_SAMPLING)
    report = diffeomorphism_verdict(F, options)
    assert report.h1.tag == NonvanishingTag.UNKNOWN
    assert report.verdict == DiffeoVerdict.UNKNOWN

    asserted = diffeomorphism_verdict(F, options.model_copy(update={"assert_nonvanishing": True}))
    assert asserted.h1.tag == NonvanishingTag.ASSERTED_NONVANISHING
    assert asserted.h1.certificate_kind == CertificateKind.SAMPLING_ASSERTION
    assert asserted.verdict == DiffeoVerdict.DIFFEOMORPHISM


def test_assertion_does_not_override_witness():
    options = CertifyOptions(assert_nonvanishing=True)
    report = diffeomorphism_verdict(t_family(-2), options)
    assert report.verdict == DiffeoVerdict.NOT_DIFFEOMORPHISM


def test_transform_search_is_noop_when_decided():
    F = t_family(1)
    baseline = coercivity_verdict(sos(F))
    record, tried = transform_search(F, baseline=baseline)
    assert record is None
    assert tried == 0


def test_transform_search_respects_budget():
    F = poly_map(*TRIANGULAR_MAP_TEXT)
    record, tried = transform_search(F, MatrixFamily(dimension=2, budget=3))
    assert record is None
    assert tried == 3


def test_matrix_family_order():
    matrices = list(MatrixFamily(dimension=2))
    assert matrices[0] == RationalMatrix.identity(2)
    assert all(m.is_regular() for m in matrices)
    assert len({m.entries for m in matrices}) == len(matrices)
    assert SUM_DIFFERENCE_MATRIX in matrices


def test_certifier_with_overrides():
    certifier = Certifier(transforms=True)
    assert certifier.options.transforms
    assert certifier(t_family(-1)).verdict == DiffeoVerdict.DIFFEOMORPHISM
    assert certifier.coercivity(Polynomial(2, F1_SOS)).tag == CoercivityTag.COERCIVE


def test_single_axis_square_is_not_coercive():
    verdict = coercivity_verdict(poly("x1^2"))
    assert verdict.tag == CoercivityTag.NOT_COERCIVE
    assert verdict.necessary.clause.value == "C3"


def test_large_t_is_diffeomorphism():
    report = diffeomorphism_verdict(t_family(5))
    assert report.verdict == DiffeoVerdict.DIFFEOMORPHISM
    assert report.h2.theorem == TheoremUsed.SUFFICIENT


def test_given_weights_must_cover_degenerate_exponents():
    f = t_family_sos(Fraction(-1, 2))
    with pytest.raises(MissingWeightError, match=r"\(3, 3\)"):
        coercivity_verdict(f, weights=WeightAssignment(strategy="manual"))
    covering = get_weighting("default").assign(f, {alpha: [] for alpha in classify_support(f).degenerate})
    assert coercivity_verdict(f, weights=covering).tag == CoercivityTag.COERCIVE
