"""Newton polytope at infinity and the V / D / R partition of a support.

new_inf(f) = conv(A(f) u {0}). Every test here is an exact feasibility
question handed to ``lp``:

- alpha is a vertex iff alpha is not a convex combination of A_0(f) \\ {alpha};
- alpha lies on the gem iff some c has c.beta <= 1 on A_0(f) and c.alpha = 1.
"""

from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

from diffeo_certifier import linear_algebra
from diffeo_certifier.common import Exponent, FrozenModel, Rational, grlex_key, logger, sort_grlex
from diffeo_certifier.exceptions import InternalConsistencyError
from diffeo_certifier.lp import (
    ConstraintSense,
    LinearProgramBuilder,
    LPStatus,
    lp_feasible,
    lp_optimize,
    verify_farkas,
)
from diffeo_certifier.polynomials import Polynomial

Point = Tuple[Fraction, ...]


class VertexTest(FrozenModel):
    """Outcome of "is ``point`` a vertex of conv(others u {point})"."""

    point: Tuple[Rational, ...]
    others: Tuple[Tuple[Rational, ...], ...]
    is_vertex: bool
    combination: Optional[Tuple[Rational, ...]] = None
    farkas: Optional[Tuple[Rational, ...]] = None

    def verify(self) -> bool:
        if self.is_vertex:
            return self.farkas is not None and verify_farkas(
                _combination_program(self.others, self.point), self.farkas
            )
        if self.combination is None or any(w < 0 for w in self.combination):
            return False
        if sum(self.combination) != 1:
            return False
        rebuilt = [
            sum((w * p[k] for w, p in zip(self.combination, self.others)), Fraction(0))
            for k in range(len(self.point))
        ]
        return tuple(rebuilt) == tuple(self.point)


class GemAnalysis(FrozenModel):
    """A(f) = V(f) u D(f) u R(f), disjoint, each part graded-lex sorted."""

    dimension: int
    vertices_at_infinity: Tuple[Exponent, ...] = ()
    degenerate: Tuple[Exponent, ...] = ()
    remaining: Tuple[Exponent, ...] = ()
    origin_is_vertex: bool = True

    @property
    def gem_regular(self) -> bool:
        return not self.degenerate

    @property
    def support(self) -> Tuple[Exponent, ...]:
        return sort_grlex(self.vertices_at_infinity + self.degenerate + self.remaining)

    def vertices_with_origin(self) -> Tuple[Exponent, ...]:
        """V_0(f)."""
        origin = (0,) * self.dimension
        if self.origin_is_vertex:
            return sort_grlex(self.vertices_at_infinity + (origin,))
        return self.vertices_at_infinity


def _combination_program(others: Sequence[Sequence], point: Sequence):
    builder = LinearProgramBuilder(len(others))
    for k in range(len(point)):
        builder.add([p[k] for p in others], ConstraintSense.EQ, point[k])
    builder.add([1] * len(others), ConstraintSense.EQ, 1)
    return builder.build()


def vertex_test(others: Iterable[Sequence], point: Sequence) -> VertexTest:
    """Decide whether ``point`` is outside conv(others), with evidence either way."""
    point = tuple(Fraction(v) for v in point)
    others = tuple(
        tuple(Fraction(v) for v in p) for p in others if tuple(Fraction(v) for v in p) != point
    )
    result = lp_feasible(_combination_program(others, point))
    if result.status == LPStatus.INFEASIBLE:
        return VertexTest(point=point, others=others, is_vertex=True, farkas=result.farkas)
    return VertexTest(point=point, others=others, is_vertex=False, combination=result.point)


def convex_hull_vertices(points: Iterable[Sequence]) -> Tuple[Point, ...]:
    """Vertices of conv(points) for any finite rational point set."""
    distinct = sorted({tuple(Fraction(v) for v in p) for p in points}, key=grlex_key)
    return tuple(p for p in distinct if vertex_test(distinct, p).is_vertex)


def minkowski_sum_vertices(
    p_points: Iterable[Sequence], q_points: Optional[Iterable[Sequence]] = None
) -> Tuple[Point, ...]:
    """Vertices of conv(P) + conv(Q); Q defaults to P.

    Every vertex of a Minkowski sum is a sum of vertices of the summands, so
    only those candidates are tested.
    """
    p_vertices = convex_hull_vertices(p_points)
    q_vertices = p_vertices if q_points is None else convex_hull_vertices(q_points)
    candidates = {tuple(a + b for a, b in zip(v, w)) for v in p_vertices for w in q_vertices}
    return convex_hull_vertices(candidates)


def vertices_at_infinity(f: Polynomial) -> Tuple[Exponent, ...]:
    """V(f): the nonzero exponents of f that are vertices of new_inf(f)."""
    points = f.support_with_origin()
    origin = (0,) * f.dimension
    vertices = tuple(
        alpha for alpha in f.support if alpha != origin and vertex_test(points, alpha).is_vertex
    )
    logger.debug(f"V(f) has {len(vertices)} of {len(f)} exponents")
    return vertices


def gem_membership(f: Polynomial, alpha: Sequence[int]) -> bool:
    """Does alpha lie on a face of new_inf(f) that misses the origin?"""
    alpha = tuple(alpha)
    if not any(alpha):
        return False
    n = f.dimension
    builder = LinearProgramBuilder(n, free=[True] * n)
    for beta in f.support:
        if any(beta) and beta != alpha:
            builder.add(beta, ConstraintSense.LE, 1)
    builder.add(alpha, ConstraintSense.EQ, 1)
    return lp_feasible(builder.build()).status == LPStatus.FEASIBLE


def classify_support(f: Polynomial) -> GemAnalysis:
    n = f.dimension
    origin = (0,) * n
    if f.is_zero():
        return GemAnalysis(dimension=n)
    vertices = vertices_at_infinity(f)
    degenerate: List[Exponent] = []
    remaining: List[Exponent] = []
    for alpha in f.support:
        if alpha in vertices:
            continue
        if gem_membership(f, alpha):
            degenerate.append(alpha)
        else:
            remaining.append(alpha)
    others = [alpha for alpha in f.support if alpha != origin]
    origin_is_vertex = vertex_test(others, origin).is_vertex
    analysis = GemAnalysis(
        dimension=n,
        vertices_at_infinity=vertices,
        degenerate=sort_grlex(degenerate),
        remaining=sort_grlex(remaining),
        origin_is_vertex=origin_is_vertex,
    )
    logger.debug(
        f"classified {len(f)} exponents: |V|={len(vertices)} |D|={len(degenerate)} "
        f"|R|={len(remaining)}"
    )
    return analysis


def split_by_partition(f: Polynomial, analysis: GemAnalysis) -> Tuple[Polynomial, Polynomial, Polynomial]:
    """(f^V, f^D, f^R); the three parts add up to f."""
    parts = (
        f.restrict(analysis.vertices_at_infinity),
        f.restrict(analysis.degenerate),
        f.restrict(analysis.remaining),
    )
    if parts[0] + parts[1] + parts[2] != f:
        raise InternalConsistencyError("V/D/R parts do not add up to f")
    return parts


def in_convex_hull(simplex: Sequence[Sequence], point: Sequence) -> bool:
    """Membership for an affinely independent vertex list."""
    coordinates = linear_algebra.barycentric_coordinates(simplex, point)
    return coordinates is not None and all(c >= 0 for c in coordinates)


def _is_face(vertex_set: Sequence[Exponent], others: Sequence[Exponent], n: int) -> bool:
    # variables (c_1..c_n, d, g): c.v = d on the set, c.u - d + g <= 0 elsewhere, g <= 1
    builder = LinearProgramBuilder(n + 2, free=[True] * (n + 2))
    for v in vertex_set:
        builder.add(list(v) + [-1, 0], ConstraintSense.EQ, 0)
    for u in others:
        builder.add(list(u) + [-1, 1], ConstraintSense.LE, 0)
    builder.add([0] * (n + 1) + [1], ConstraintSense.LE, 1)
    result = lp_optimize(builder.build(objective=[0] * (n + 1) + [1]))
    return result.status == LPStatus.OPTIMAL and result.objective_value > 0


def simplicial_faces_through(
    f: Polynomial, alpha: Sequence[int], analysis: Optional[GemAnalysis] = None
) -> List[Tuple[Exponent, ...]]:
    """Vertex sets V_G of the simplicial faces G of new_inf(f) with alpha in G, 0 not in G.

    Candidates are affinely independent subsets of V(f) of size at most n
    whose hull contains alpha; each is kept only if an exact supporting
    functional separates it strictly from every other vertex of V_0(f).
    """
    alpha = tuple(alpha)
    n = f.dimension
    analysis = analysis or classify_support(f)
    vertices = analysis.vertices_at_infinity
    all_vertices = analysis.vertices_with_origin()
    faces: List[Tuple[Exponent, ...]] = []
    for size in range(1, n + 1):
        for subset in combinations(vertices, size):
            if not linear_algebra.affinely_independent(subset):
                continue
            if not in_convex_hull(subset, alpha):
                continue
            others = [u for u in all_vertices if u not in subset]
            if _is_face(subset, others, n):
                faces.append(subset)
    logger.debug(f"{len(faces)} simplicial faces through {alpha}")
    return faces
