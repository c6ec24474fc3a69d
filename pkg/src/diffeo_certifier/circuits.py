"""Circuit numbers and the coercivity inequalities built on them.

For alpha* = sum(lambda_a * a) over affinely independent vertices a in V*,
the circuit number is

    Theta = prod (f_a / lambda_a) ** lambda_a

which is irrational in general. It is never evaluated: with N the common
denominator of the lambdas, Theta**N is an exact rational and every
comparison against Theta is decided on N-th powers after a sign check.
"""

import math
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from pydantic import model_validator

from diffeo_certifier import linear_algebra
from diffeo_certifier.common import Exponent, FrozenModel, Rational, is_even, logger, sort_grlex
from diffeo_certifier.conditions import ConditionsReport, check_conditions
from diffeo_certifier.exceptions import NonPositiveCoefficientError, PreconditionError
from diffeo_certifier.geometry import GemAnalysis, in_convex_hull, simplicial_faces_through
from diffeo_certifier.polynomials import Polynomial


class CaratheodoryDecomposition(FrozenModel):
    alpha_star: Exponent
    support: Tuple[Exponent, ...]
    lambdas: Tuple[Rational, ...]
    minimal: bool = True

    @model_validator(mode="after")
    def _exact(self):
        if len(self.support) != len(self.lambdas) or not self.support:
            raise ValueError("support and lambdas must be nonempty and of equal length")
        if sum(self.lambdas) != 1:
            raise ValueError(f"lambdas sum to {sum(self.lambdas)}, not 1")
        if any(lam < 0 for lam in self.lambdas):
            raise ValueError("lambdas must be nonnegative")
        rebuilt = tuple(
            sum((lam * a[k] for lam, a in zip(self.lambdas, self.support)), Fraction(0))
            for k in range(len(self.alpha_star))
        )
        if rebuilt != tuple(self.alpha_star):
            raise ValueError(f"decomposition rebuilds {rebuilt}, not {self.alpha_star}")
        if not linear_algebra.affinely_independent(self.support):
            raise ValueError("support is not affinely independent")
        if self.minimal and any(lam == 0 for lam in self.lambdas):
            raise ValueError("a minimal decomposition has only positive lambdas")
        return self

    @property
    def denominator(self) -> int:
        return math.lcm(*(lam.denominator for lam in self.lambdas))


class CircuitNumber(FrozenModel):
    decomposition: CaratheodoryDecomposition
    denominator: int
    power_form: Rational
    float_hint: float

    @property
    def alpha_star(self) -> Exponent:
        return self.decomposition.alpha_star


class WeightedExponent(FrozenModel):
    alpha: Exponent
    weight: Rational


class WeightAssignment(FrozenModel):
    strategy: str = "default"
    entries: Tuple[WeightedExponent, ...] = ()

    @model_validator(mode="after")
    def _budget(self):
        if any(e.weight <= 0 for e in self.entries):
            raise ValueError("weights must be positive")
        if sum((e.weight for e in self.entries), Fraction(0)) > 1:
            raise ValueError("weights sum to more than 1")
        return self

    @classmethod
    def of(cls, weights: dict, strategy: str = "default") -> "WeightAssignment":
        return cls(
            strategy=strategy,
            entries=tuple(
                WeightedExponent(alpha=alpha, weight=weights[alpha]) for alpha in sort_grlex(weights)
            ),
        )

    def weight_of(self, alpha: Sequence[int]) -> Fraction:
        alpha = tuple(alpha)
        for entry in self.entries:
            if entry.alpha == alpha:
                return entry.weight
        raise KeyError(alpha)


class CircuitCertificate(FrozenModel):
    alpha_star: Exponent
    coefficient: Rational
    even: bool
    weight: Rational
    circuit: CircuitNumber
    holds: bool


class NecessaryClause(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    LOWER_BOUND = "f_alpha >= -Theta"
    UPPER_BOUND = "f_alpha <= Theta"


class NecessaryVerdict(FrozenModel):
    """``passed`` only means no necessary condition is violated."""

    passed: bool
    conditions: ConditionsReport
    clause: Optional[NecessaryClause] = None
    detail: str = ""
    alpha_star: Optional[Exponent] = None
    face: Tuple[Exponent, ...] = ()
    circuit: Optional[CircuitNumber] = None
    checked: Tuple[Exponent, ...] = ()
    inapplicable: Tuple[Exponent, ...] = ()


def caratheodory_decompose(
    alpha_star: Sequence[int], vertices: Sequence[Sequence[int]]
) -> List[CaratheodoryDecomposition]:
    """All minimal decompositions of alpha* over subsets of ``vertices``.

    An affinely independent subset with strictly positive barycentric
    coordinates is automatically minimal, since coordinates on an
    independent set are unique.
    """
    alpha_star = tuple(alpha_star)
    ordered = sort_grlex(vertices)
    found: List[CaratheodoryDecomposition] = []
    for size in range(1, len(alpha_star) + 2):
        for subset in combinations(ordered, size):
            if not linear_algebra.affinely_independent(subset):
                continue
            coordinates = linear_algebra.barycentric_coordinates(subset, alpha_star)
            if coordinates is None or any(c <= 0 for c in coordinates):
                continue
            found.append(
                CaratheodoryDecomposition(
                    alpha_star=alpha_star, support=subset, lambdas=tuple(coordinates)
                )
            )
    if not found:
        raise PreconditionError(f"{alpha_star} is not in the convex hull of {list(ordered)}")
    return found


def circuit_number(f: Polynomial, decomposition: CaratheodoryDecomposition) -> CircuitNumber:
    n_power = decomposition.denominator
    power_form = Fraction(1)
    log_theta = 0.0
    for alpha, lam in zip(decomposition.support, decomposition.lambdas):
        if lam == 0:
            # 0^0 = 1
            continue
        coeff = f.coefficient(alpha)
        if coeff <= 0:
            raise NonPositiveCoefficientError(
                f"circuit number needs f_alpha > 0, but f_{alpha} = {coeff}"
            )
        base = coeff / lam
        power_form *= base ** int(lam * n_power)
        log_theta += float(lam) * math.log(base)
    return CircuitNumber(
        decomposition=decomposition,
        denominator=n_power,
        power_form=power_form,
        float_hint=math.exp(log_theta),
    )


def _below_theta(magnitude: Fraction, circuit: CircuitNumber, weight: Fraction, strict: bool) -> bool:
    """Decide magnitude < w * Theta (or <=) for magnitude >= 0 on N-th powers."""
    n_power = circuit.denominator
    lhs = magnitude**n_power
    rhs = weight**n_power * circuit.power_form
    return lhs < rhs if strict else lhs <= rhs


def sufficient_inequality(
    f: Polynomial, circuit: CircuitNumber, weight: Fraction, alpha_star_even: bool
) -> bool:
    """f_a* > -w*Theta for even alpha*, |f_a*| < w*Theta otherwise."""
    if weight <= 0:
        raise ValueError("weights must be positive")
    coeff = f.coefficient(circuit.alpha_star)
    if alpha_star_even and coeff >= 0:
        return True
    return _below_theta(abs(coeff), circuit, Fraction(weight), strict=True)


def qualifying_faces(
    f: Polynomial, alpha_star: Exponent, analysis: GemAnalysis
) -> List[Tuple[Exponent, ...]]:
    """Simplicial faces through alpha* containing no other degenerate exponent."""
    faces = []
    for face in simplicial_faces_through(f, alpha_star, analysis):
        others = [beta for beta in analysis.degenerate if beta != alpha_star]
        if not any(in_convex_hull(face, beta) for beta in others):
            faces.append(face)
    return faces


def _face_circuit(f: Polynomial, alpha_star: Exponent, face: Tuple[Exponent, ...]) -> CircuitNumber:
    lambdas = tuple(linear_algebra.barycentric_coordinates(face, alpha_star))
    decomposition = CaratheodoryDecomposition(
        alpha_star=alpha_star,
        support=face,
        lambdas=lambdas,
        minimal=all(lam > 0 for lam in lambdas),
    )
    return circuit_number(f, decomposition)


def necessary_condition_check(
    f: Polynomial, analysis: GemAnalysis, conditions: Optional[ConditionsReport] = None
) -> NecessaryVerdict:
    """Look for a violated necessary condition of coercivity.

    Conditions C1-C3 come first. Then every degenerate alpha* on a
    simplicial face G with D(f) n G = {alpha*} must satisfy
    f_a* >= -Theta(f, V_G, alpha*), and f_a* <= Theta as well when alpha* has
    an odd entry. Degenerate exponents on no such face are inapplicable.
    """
    conditions = conditions or check_conditions(f, analysis)
    for clause, check in (
        (NecessaryClause.C1, conditions.c1),
        (NecessaryClause.C2, conditions.c2),
    ):
        if not check.holds:
            return NecessaryVerdict(
                passed=False,
                conditions=conditions,
                clause=clause,
                detail=f"{clause.value} fails at {list(check.violating)}",
                alpha_star=check.violating[0],
            )
    if not conditions.c3.holds:
        return NecessaryVerdict(
            passed=False,
            conditions=conditions,
            clause=NecessaryClause.C3,
            detail=f"no even axis vertex for x{list(conditions.c3.missing_axes)}",
        )

    checked: List[Exponent] = []
    inapplicable: List[Exponent] = []
    for alpha_star in analysis.degenerate:
        faces = qualifying_faces(f, alpha_star, analysis)
        if not faces:
            inapplicable.append(alpha_star)
            continue
        checked.append(alpha_star)
        coeff = f.coefficient(alpha_star)
        for face in faces:
            circuit = _face_circuit(f, alpha_star, face)
            violated = None
            if coeff < 0 and not _below_theta(-coeff, circuit, Fraction(1), strict=False):
                violated = NecessaryClause.LOWER_BOUND
            elif not is_even(alpha_star) and coeff > 0 and not _below_theta(
                coeff, circuit, Fraction(1), strict=False
            ):
                violated = NecessaryClause.UPPER_BOUND
            if violated is not None:
                logger.debug(f"necessary condition {violated.value} violated at {alpha_star}")
                return NecessaryVerdict(
                    passed=False,
                    conditions=conditions,
                    clause=violated,
                    detail=(
                        f"f_{alpha_star} = {coeff} violates {violated.value} with "
                        f"Theta^{circuit.denominator} = {circuit.power_form} on face {list(face)}"
                    ),
                    alpha_star=alpha_star,
                    face=face,
                    circuit=circuit,
                    checked=tuple(checked),
                    inapplicable=tuple(inapplicable),
                )
    return NecessaryVerdict(
        passed=True,
        conditions=conditions,
        checked=tuple(checked),
        inapplicable=tuple(inapplicable),
    )
