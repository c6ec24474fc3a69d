"""Exact dense linear algebra over the rationals.

Matrices are lists of rows. They are lifted to sympy ``DomainMatrix`` over
``QQ`` (``ZZ`` for integer determinants) and results come back as
``Fraction``.
"""

from fractions import Fraction
from typing import List, Optional, Sequence

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

Matrix = List[List[Fraction]]


def _to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def to_domain_matrix(rows: Sequence[Sequence]) -> DomainMatrix:
    width = len(rows[0]) if rows else 0
    if any(len(row) != width for row in rows):
        raise ValueError("ragged matrix")
    return DomainMatrix([[_to_qq(v) for v in row] for row in rows], (len(rows), width), QQ)


def to_fractions(matrix: DomainMatrix) -> Matrix:
    return [[Fraction(int(v.p), int(v.q)) for v in row] for row in matrix.to_Matrix().tolist()]


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return to_domain_matrix(rows).rank()


def solve_unique(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """The unique solution of ``matrix @ x = rhs``, or None.

    None covers both an inconsistent system and a system with free variables.
    """
    if not matrix:
        return None
    width = len(matrix[0])
    augmented = to_domain_matrix([list(row) + [b] for row, b in zip(matrix, rhs)])
    reduced, pivots = augmented.rref()
    if tuple(pivots) != tuple(range(width)):
        return None
    last = to_fractions(reduced)
    return [last[c][width] for c in range(width)]


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    if any(len(row) != len(matrix) for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    if not matrix:
        return Fraction(1)
    return _from_qq(to_domain_matrix(matrix).det())


def integer_determinant(columns: Sequence[Sequence[int]]) -> int:
    n = len(columns)
    if n == 0:
        return 1
    return int(DomainMatrix([[ZZ(v) for v in col] for col in columns], (n, n), ZZ).det())


def inverse(matrix: Sequence[Sequence]) -> Optional[Matrix]:
    """The exact inverse, or None for a singular matrix."""
    m = to_domain_matrix(matrix)
    if m.det() == QQ.zero:
        return None
    return to_fractions(m.inv())


def affinely_independent(points: Sequence[Sequence]) -> bool:
    if len(points) <= 1:
        return True
    base = points[0]
    differences = [[Fraction(a) - b for a, b in zip(p, base)] for p in points[1:]]
    return rank(differences) == len(points) - 1


def barycentric_coordinates(
    points: Sequence[Sequence], target: Sequence
) -> Optional[List[Fraction]]:
    """Solve ``sum(l_i * (p_i, 1)) = (target, 1)`` for affinely independent points.

    Returns None when the target is outside the affine hull. Signs are not
    checked; a point lies in the convex hull iff every coordinate is >= 0.
    """
    if not points:
        return None
    dim = len(target)
    matrix = [[Fraction(p[k]) for p in points] for k in range(dim)]
    matrix.append([Fraction(1)] * len(points))
    rhs = [Fraction(v) for v in target] + [Fraction(1)]
    return solve_unique(matrix, rhs)
