import logging
import random
from fractions import Fraction

import mpmath
import pytest

from diffeo_certifier.circuits import (
    CaratheodoryDecomposition,
    NecessaryClause,
    WeightAssignment,
    caratheodory_decompose,
    circuit_number,
    necessary_condition_check,
    sufficient_inequality,
)
from diffeo_certifier.common import is_even
from diffeo_certifier.exceptions import NonPositiveCoefficientError, PreconditionError
from diffeo_certifier.geometry import classify_support
from diffeo_certifier.polynomials import Polynomial
from tests.data_for_tests import *

logging.getLogger("diffeo_certifier").setLevel(logging.DEBUG)
logger = logging.getLogger("diffeo_certifier_test")


def test_decompose_midpoint():
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    assert set(zip(decomposition.support, decomposition.lambdas)) == {
        ((6, 0), Fraction(1, 2)),
        ((0, 6), Fraction(1, 2)),
    }
    assert decomposition.denominator == 2


def test_decompose_uneven_weights():
    (decomposition,) = caratheodory_decompose((2, 4), [(6, 0), (0, 6)])
    weights = dict(zip(decomposition.support, decomposition.lambdas))
    assert weights == {(6, 0): Fraction(1, 3), (0, 6): Fraction(2, 3)}
    assert decomposition.denominator == 3


def test_decompose_outside_hull_fails():
    with pytest.raises(PreconditionError):
        caratheodory_decompose((4, 4), [(6, 0), (0, 6)])


def test_decompose_interior_point_of_square():
    decompositions = caratheodory_decompose((1, 1), [(0, 0), (2, 0), (0, 2), (2, 2)])
    assert len(decompositions) == 2
    for decomposition in decompositions:
        assert all(lam > 0 for lam in decomposition.lambdas)
        assert len(decomposition.support) == 2


def test_decomposition_validator_rejects_bad_weights():
    with pytest.raises(ValueError):
        CaratheodoryDecomposition(
            alpha_star=(3, 3), support=((6, 0), (0, 6)), lambdas=(Fraction(1, 3), Fraction(1, 3))
        )
    with pytest.raises(ValueError):
        CaratheodoryDecomposition(
            alpha_star=(3, 3), support=((6, 0), (0, 6)), lambdas=(Fraction(1, 3), Fraction(2, 3))
        )


@pytest.mark.parametrize("t", [0, 1, -1, 2, 3, Fraction(-1, 2), Fraction(1, 2)])
def test_circuit_number_of_t_family(t):
    t = Fraction(t)
    f = t_family_sos(t)
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    theta = circuit_number(f, decomposition)
    assert theta.denominator == 2
    assert theta.power_form == 8 * (1 + t * t)
    assert theta.float_hint == pytest.approx(2 * 2**0.5 * float(1 + t * t) ** 0.5, abs=1e-9)


def test_circuit_number_of_transformed_polynomial():
    f = Polynomial(2, TRANSFORMED_SOS)
    (decomposition,) = caratheodory_decompose((4, 2), [(6, 0), (2, 4), (0, 2)])
    assert set(decomposition.support) == {(6, 0), (2, 4)}
    theta = circuit_number(f, decomposition)
    assert theta.denominator == 2
    assert theta.power_form == 2304
    assert theta.float_hint == pytest.approx(48.0)


def test_circuit_number_needs_positive_coefficients():
    f = Polynomial(2, {(6, 0): 2, (0, 6): -1, (3, 3): 1})
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    with pytest.raises(NonPositiveCoefficientError):
        circuit_number(f, decomposition)


def test_sufficient_inequality_boundary_is_strict():
    f = t_family_sos(-1)
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    theta = circuit_number(f, decomposition)
    assert theta.power_form == 16
    assert f.coefficient((3, 3)) == 4
    assert not sufficient_inequality(f, theta, Fraction(1), alpha_star_even=False)


@pytest.mark.parametrize("t", [0, Fraction(-1, 2), -2, 2])
def test_sufficient_inequality_holds_off_boundary(t):
    f = t_family_sos(t)
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    theta = circuit_number(f, decomposition)
    assert sufficient_inequality(f, theta, Fraction(1), alpha_star_even=False)


def test_sufficient_inequality_even_positive_is_free():
    f = Polynomial(2, TRANSFORMED_SOS)
    (decomposition,) = caratheodory_decompose((4, 2), [(6, 0), (2, 4), (0, 2)])
    theta = circuit_number(f, decomposition)
    assert sufficient_inequality(f, theta, Fraction(1, 1000), alpha_star_even=True)


def test_sufficient_inequality_respects_weight():
    f = poly("x1^4 + x2^4 - x1^2*x2^2")
    (decomposition,) = caratheodory_decompose((2, 2), [(4, 0), (0, 4)])
    theta = circuit_number(f, decomposition)
    assert theta.power_form == 4
    assert sufficient_inequality(f, theta, Fraction(1), alpha_star_even=True)
    assert not sufficient_inequality(f, theta, Fraction(1, 2), alpha_star_even=True)


def test_sufficient_inequality_rejects_nonpositive_weight():
    f = t_family_sos(0)
    (decomposition,) = caratheodory_decompose((3, 3), [(6, 0), (0, 6)])
    theta = circuit_number(f, decomposition)
    with pytest.raises(ValueError):
        sufficient_inequality(f, theta, Fraction(0), alpha_star_even=False)


def test_necessary_condition_violated_below_minus_theta():
    f = poly("x1^4 + x2^4 - 3*x1^2*x2^2")
    verdict = necessary_condition_check(f, classify_support(f))
    assert not verdict.passed
    assert verdict.clause == NecessaryClause.LOWER_BOUND
    assert verdict.alpha_star == (2, 2)
    assert verdict.circuit.power_form == 4


def test_necessary_condition_passes_on_boundary():
    f = poly("x1^4 + x2^4 - 2*x1^2*x2^2")
    verdict = necessary_condition_check(f, classify_support(f))
    assert verdict.passed
    assert verdict.checked == ((2, 2),)


def test_necessary_condition_upper_bound_for_odd_exponent():
    f = poly("x1^6 + x2^6 + 5*x1^3*x2^3")
    verdict = necessary_condition_check(f, classify_support(f))
    assert not verdict.passed
    assert verdict.clause == NecessaryClause.UPPER_BOUND


def test_necessary_condition_reports_failed_vertex_conditions():
    f = poly("x1^6 - x2^6 + x1^2")
    verdict = necessary_condition_check(f, classify_support(f))
    assert not verdict.passed
    assert verdict.clause == NecessaryClause.C2
    assert verdict.alpha_star == (0, 6)

    g = poly("x1^3 + x2^2")
    verdict = necessary_condition_check(g, classify_support(g))
    assert verdict.clause == NecessaryClause.C1


def test_necessary_condition_c3_needs_every_axis():
    f = poly("x1^2 + x1^2*x2^2")
    verdict = necessary_condition_check(f, classify_support(f))
    assert not verdict.passed
    assert verdict.clause == NecessaryClause.C3


def test_circuit_number_scales_linearly():
    rng = random.Random(31)
    for _ in range(25):
        a = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        b = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        s = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        f = Polynomial(2, {(6, 0): a, (0, 6): b, (2, 4): 1})
        g = Polynomial(2, {(6, 0): s * a, (0, 6): s * b, (2, 4): 1})
        (decomposition,) = caratheodory_decompose((2, 4), [(6, 0), (0, 6)])
        theta_f = circuit_number(f, decomposition)
        theta_g = circuit_number(g, decomposition)
        assert theta_g.power_form == s**theta_f.denominator * theta_f.power_form


def test_weight_assignment_validator():
    weights = WeightAssignment.of({(3, 3): Fraction(1, 2), (1, 3): Fraction(1, 2)})
    assert weights.weight_of((3, 3)) == Fraction(1, 2)
    with pytest.raises(KeyError):
        weights.weight_of((0, 0))
    with pytest.raises(ValueError):
        WeightAssignment.of({(3, 3): Fraction(3, 4), (1, 3): Fraction(1, 2)})
    with pytest.raises(ValueError):
        WeightAssignment.of({(3, 3): Fraction(0)})


def _mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


@pytest.mark.property
def test_power_comparison_agrees_with_high_precision_theta():
    rng = random.Random(71)
    compared = 0
    with mpmath.workdps(60):
        while compared < 100:
            a, b = 2 * rng.randint(1, 4), 2 * rng.randint(1, 4)
            vertices = [(a, 0), (0, b), (2 * rng.randint(1, 3), 2 * rng.randint(1, 3))]
            alpha_star = (rng.randint(0, 8), rng.randint(0, 8))
            if alpha_star in vertices:
                continue
            try:
                decomposition = caratheodory_decompose(alpha_star, vertices)[0]
            except PreconditionError:
                continue
            terms = {v: Fraction(rng.randint(1, 12), rng.randint(1, 4)) for v in vertices}
            weight = Fraction(rng.randint(1, 4), 4)
            theta = mpmath.fprod(
                mpmath.power(_mpf(terms[v]) / _mpf(lam), _mpf(lam))
                for v, lam in zip(decomposition.support, decomposition.lambdas)
            )
            bound = _mpf(weight) * theta
            coeff = Fraction(float(bound) * rng.uniform(0.5, 1.5)).limit_denominator(1000)
            coeff *= rng.choice((1, -1))
            if coeff == 0:
                continue
            magnitude = _mpf(abs(coeff))
            if abs(magnitude - bound) <= mpmath.mpf("1e-6") * bound:
                continue
            terms[alpha_star] = coeff
            f = Polynomial(2, terms)
            even = is_even(alpha_star)
            expected = (even and coeff > 0) or magnitude < bound
            circuit = circuit_number(f, decomposition)
            assert sufficient_inequality(f, circuit, weight, even) == expected, f"{f} at {alpha_star}"
            compared += 1
