"""Conditions on the vertices at infinity of f.

(C1) every alpha in V(f) is even; (C2) f_alpha > 0 on V(f);
(C3) for every axis i, V(f) contains some 2*k_i*e_i with k_i >= 1.
"""

from typing import Optional, Tuple

from diffeo_certifier.common import Exponent, FrozenModel, is_even
from diffeo_certifier.geometry import GemAnalysis, classify_support
from diffeo_certifier.polynomials import Polynomial, PolynomialMap


class VertexCondition(FrozenModel):
    holds: bool
    violating: Tuple[Exponent, ...] = ()


class AxisCondition(FrozenModel):
    holds: bool
    axis_vertices: Tuple[Exponent, ...] = ()
    missing_axes: Tuple[int, ...] = ()

    def k(self, axis: int) -> int:
        """k_i of the vertex 2*k_i*e_i found on the given (1-based) axis."""
        for alpha in self.axis_vertices:
            if alpha[axis - 1]:
                return alpha[axis - 1] // 2
        raise KeyError(axis)


class ConditionsReport(FrozenModel):
    c1: VertexCondition
    c2: VertexCondition
    c3: AxisCondition

    @property
    def all_hold(self) -> bool:
        return self.c1.holds and self.c2.holds and self.c3.holds


def _axis_of(alpha: Exponent) -> Optional[int]:
    nonzero = [i for i, a in enumerate(alpha) if a]
    if len(nonzero) == 1 and alpha[nonzero[0]] % 2 == 0:
        return nonzero[0] + 1
    return None


def check_conditions(f: Polynomial, analysis: Optional[GemAnalysis] = None) -> ConditionsReport:
    analysis = analysis or classify_support(f)
    vertices = analysis.vertices_at_infinity
    odd = tuple(alpha for alpha in vertices if not is_even(alpha))
    nonpositive = tuple(alpha for alpha in vertices if f.coefficient(alpha) <= 0)
    found = {}
    for alpha in vertices:
        axis = _axis_of(alpha)
        if axis is not None and axis not in found:
            found[axis] = alpha
    missing = tuple(i for i in range(1, f.dimension + 1) if i not in found)
    return ConditionsReport(
        c1=VertexCondition(holds=not odd, violating=odd),
        c2=VertexCondition(holds=not nonpositive, violating=nonpositive),
        c3=AxisCondition(
            holds=not missing,
            axis_vertices=tuple(found[i] for i in sorted(found)),
            missing_axes=missing,
        ),
    )


def axis_exponent_criterion(F: PolynomialMap) -> bool:
    """True when every x_j occurs as a pure power x_j^k (k >= 1) in some F_i.

    The largest such power k_j then gives the vertex 2*k_j*e_j of ||F||^2,
    so (C3) holds for the sum of squares.
    """
    n = F.dimension
    covered = set()
    for component in F:
        for alpha in component.terms:
            nonzero = [i for i, a in enumerate(alpha) if a]
            if len(nonzero) == 1:
                covered.add(nonzero[0])
    return len(covered) == n
