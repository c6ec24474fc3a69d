"""Finite families of regular integer matrices tried as A^-1 in F o A^-1.

Scaling a column of A^-1 rescales one variable y_j, which changes neither
the gem structure nor the outcome of any circuit inequality, so only one
matrix per column-scaling class is kept: each column primitive (gcd 1)
with a positive leading entry. Matrices come out by total absolute entry
sum, then lexicographically with larger entries first; the identity is
always the first member.
"""

from math import gcd
from typing import Iterator, List, Tuple

from pydantic import Field

from diffeo_certifier.common import FrozenModel, logger
from diffeo_certifier.linear_algebra import integer_determinant
from diffeo_certifier.polynomials import RationalMatrix


class MatrixFamily(FrozenModel):
    dimension: int = Field(ge=1)
    bound: int = Field(default=1, ge=1)
    budget: int = Field(default=5000, ge=1)

    def __iter__(self) -> Iterator[RationalMatrix]:
        yielded = 0
        n = self.dimension
        for weight in range(n, self.bound * n * n + 1):
            for entries in _entries_of_weight(n * n, weight, self.bound):
                rows = [entries[i * n : (i + 1) * n] for i in range(n)]
                if not _canonical_columns(rows):
                    continue
                columns = [[rows[i][j] for i in range(n)] for j in range(n)]
                if integer_determinant(columns) == 0:
                    continue
                yield RationalMatrix.of(rows)
                yielded += 1
                if yielded >= self.budget:
                    logger.debug(f"transform budget of {self.budget} matrices reached")
                    return


def _entries_of_weight(length: int, weight: int, bound: int) -> Iterator[Tuple[int, ...]]:
    chosen: List[int] = []

    def fill(remaining: int) -> Iterator[Tuple[int, ...]]:
        slots = length - len(chosen)
        if slots == 0:
            if remaining == 0:
                yield tuple(chosen)
            return
        if remaining > slots * bound:
            return
        for value in range(bound, -bound - 1, -1):
            if abs(value) > remaining:
                continue
            chosen.append(value)
            yield from fill(remaining - abs(value))
            chosen.pop()

    return fill(weight)


def _canonical_columns(rows: List[Tuple[int, ...]]) -> bool:
    n = len(rows)
    for j in range(n):
        column = [rows[i][j] for i in range(n)]
        nonzero = [v for v in column if v]
        if not nonzero or nonzero[0] < 0:
            return False
        divisor = 0
        for v in nonzero:
            divisor = gcd(divisor, v)
        if divisor != 1:
            return False
    return True
