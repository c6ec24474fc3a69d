"""Jacobian determinants of polynomial maps and the sign of det JF.

``jacobian_determinant`` expands det JF straight from the supports:

    det JF(x) = sum det(a^1, ..., a^n) * prod (F_i)_{a^i} * x^(a^1 + ... + a^n - 1)

over tuples a^i in A(F_i) with a^1 + ... + a^n >= (1, ..., 1). The
cofactor expansion of the entrywise Jacobian is kept as an independent
oracle.
"""

import random
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from diffeo_certifier.common import Exponent, FrozenModel, Rational, is_even, logger
from diffeo_certifier.linear_algebra import determinant, integer_determinant
from diffeo_certifier.polynomials import (
    Polynomial,
    PolynomialMap,
    RationalMatrix,
    evaluate,
    multiply,
    partial_derivative,
    scale,
    substitute_linear,
    unit_vector,
)
from diffeo_certifier.settings import SamplingBudget


class NonvanishingTag(str, Enum):
    POSITIVE_EVERYWHERE = "PositiveEverywhere"
    NEGATIVE_EVERYWHERE = "NegativeEverywhere"
    ZERO_WITNESS = "ZeroWitness"
    SIGN_CHANGE_WITNESS = "SignChangeWitness"
    ASSERTED_NONVANISHING = "AssertedNonvanishing"
    UNKNOWN = "Unknown"

    @property
    def nonvanishing(self) -> bool:
        return self in (
            NonvanishingTag.POSITIVE_EVERYWHERE,
            NonvanishingTag.NEGATIVE_EVERYWHERE,
            NonvanishingTag.ASSERTED_NONVANISHING,
        )

    @property
    def vanishing(self) -> bool:
        return self in (NonvanishingTag.ZERO_WITNESS, NonvanishingTag.SIGN_CHANGE_WITNESS)


class CertificateKind(str, Enum):
    EVEN_POSITIVE_MONOMIALS = "even-positive-monomials"
    SAMPLING_ASSERTION = "constant-sign-sampling-assertion"


class NonvanishingStatus(FrozenModel):
    tag: NonvanishingTag
    witnesses: Tuple[Tuple[Rational, ...], ...] = ()
    values: Tuple[Rational, ...] = ()
    certificate_kind: Optional[CertificateKind] = None
    seed: int
    samples: int = 0


def jacobian_determinant(F: PolynomialMap) -> Polynomial:
    n = F.dimension
    supports: List[List[Tuple[Exponent, Fraction]]] = [list(c.terms.items()) for c in F]
    if any(not support for support in supports):
        return Polynomial.zero(n)
    # reach[i][k]: the most exponent k that components i..n-1 can still contribute
    reach = [[0] * n for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for k in range(n):
            reach[i][k] = reach[i + 1][k] + max(alpha[k] for alpha, _ in supports[i])

    out: Dict[Exponent, Fraction] = {}
    columns: List[Exponent] = []

    def descend(i: int, running: List[int], product: Fraction):
        if any(running[k] + reach[i][k] < 1 for k in range(n)):
            return
        if i == n:
            det = integer_determinant(columns)
            if det:
                gamma = tuple(r - 1 for r in running)
                out[gamma] = out.get(gamma, Fraction(0)) + det * product
            return
        for alpha, coeff in supports[i]:
            if alpha in columns:
                continue
            columns.append(alpha)
            descend(i + 1, [r + a for r, a in zip(running, alpha)], product * coeff)
            columns.pop()

    descend(0, [0] * n, Fraction(1))
    return Polynomial._trusted(n, out)


def jacobian_matrix(F: PolynomialMap) -> List[List[Polynomial]]:
    n = F.dimension
    return [[partial_derivative(component, j) for j in range(1, n + 1)] for component in F]


def jacobian_determinant_oracle(F: PolynomialMap) -> Polynomial:
    """Cofactor expansion of the entrywise Jacobian, row by row."""
    n = F.dimension
    matrix = jacobian_matrix(F)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: Tuple[int, ...]) -> Polynomial:
        if row == n:
            return Polynomial.constant(n, 1)
        total = Polynomial.zero(n)
        for position, col in enumerate(cols):
            entry = matrix[row][col]
            if entry.is_zero():
                continue
            rest = cols[:position] + cols[position + 1 :]
            term = multiply(entry, minor(row + 1, rest))
            total = total - term if position % 2 else total + term
        return total

    return minor(0, tuple(range(n)))


def det_at_origin(F: PolynomialMap) -> Fraction:
    """det JF(0): only tuples of unit vectors reach x^0, i.e. the linear part of F."""
    n = F.dimension
    linear = [[component.coefficient(unit_vector(n, j)) for j in range(1, n + 1)] for component in F]
    return determinant(linear)


def even_sign_certificate(d: Polynomial) -> Optional[NonvanishingTag]:
    """Constant sign from even monomials with coefficients of one sign and a nonzero constant."""
    origin = (0,) * d.dimension
    constant = d.coefficient(origin)
    if constant == 0 or not all(is_even(alpha) for alpha in d.terms):
        return None
    if constant > 0 and all(c > 0 for c in d.terms.values()):
        return NonvanishingTag.POSITIVE_EVERYWHERE
    if constant < 0 and all(c < 0 for c in d.terms.values()):
        return NonvanishingTag.NEGATIVE_EVERYWHERE
    return None


def sample_points(n: int, budget: SamplingBudget) -> Iterator[Tuple[Fraction, ...]]:
    """Origin, the diagonal x(s) = (s, ..., s), uniform points, then random lines."""
    yield (Fraction(0),) * n
    for k in range(1, budget.line_max_numerator + 1):
        for signed in (k, -k):
            s = Fraction(signed, budget.line_denominator)
            yield (s,) * n
    rng = random.Random(budget.seed)
    bound = budget.uniform_radius * budget.point_denominator

    def uniform_point() -> Tuple[Fraction, ...]:
        return tuple(Fraction(rng.randint(-bound, bound), budget.point_denominator) for _ in range(n))

    for _ in range(budget.uniform_points):
        yield uniform_point()
    for _ in range(budget.random_lines):
        base = uniform_point()
        direction = [0] * n
        while not any(direction):
            direction = [rng.randint(-3, 3) for _ in range(n)]
        for k in range(-budget.random_line_max_numerator, budget.random_line_max_numerator + 1):
            s = Fraction(k, budget.random_line_denominator)
            yield tuple(b + s * v for b, v in zip(base, direction))


def nonvanishing_analysis(d: Polynomial, budget: Optional[SamplingBudget] = None) -> NonvanishingStatus:
    budget = budget or SamplingBudget()
    n = d.dimension
    if d.is_zero():
        origin = (Fraction(0),) * n
        return NonvanishingStatus(
            tag=NonvanishingTag.ZERO_WITNESS,
            witnesses=(origin,),
            values=(Fraction(0),),
            seed=budget.seed,
            samples=0,
        )
    tag = even_sign_certificate(d)
    if tag is not None:
        return NonvanishingStatus(
            tag=tag,
            certificate_kind=CertificateKind.EVEN_POSITIVE_MONOMIALS,
            seed=budget.seed,
        )

    first_sign: Optional[Tuple[Tuple[Fraction, ...], Fraction]] = None
    samples = 0
    for point in sample_points(n, budget):
        samples += 1
        value = evaluate(d, point)
        if value == 0:
            logger.debug(f"det JF vanishes at {point}")
            return NonvanishingStatus(
                tag=NonvanishingTag.ZERO_WITNESS,
                witnesses=(point,),
                values=(value,),
                seed=budget.seed,
                samples=samples,
            )
        if first_sign is None:
            first_sign = (point, value)
        elif (value > 0) != (first_sign[1] > 0):
            logger.debug(f"det JF changes sign between {first_sign[0]} and {point}")
            return NonvanishingStatus(
                tag=NonvanishingTag.SIGN_CHANGE_WITNESS,
                witnesses=(first_sign[0], point),
                values=(first_sign[1], value),
                seed=budget.seed,
                samples=samples,
            )
    return NonvanishingStatus(tag=NonvanishingTag.UNKNOWN, seed=budget.seed, samples=samples)


def jacobian_transform_law(F: PolynomialMap, G: PolynomialMap, Ainv: RationalMatrix) -> bool:
    """det JG = det A^-1 * (det JF o A^-1) for G = F o A^-1.

    At the origin this reads det JG(0) = det JF(0) * det A^-1.
    """
    expected = scale(substitute_linear(jacobian_determinant(F), Ainv), Ainv.determinant())
    return jacobian_determinant(G) == expected
