"""Exact two-phase simplex over the rationals.

Bland's rule (smallest entering index, smallest leaving basis index on ratio
ties) keeps the method finite on degenerate programs, which the vertex and
gem systems produce all the time. Infeasible programs come back with a
Farkas certificate that is re-checked before it is returned.
"""

from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import model_validator

from diffeo_certifier.common import FrozenModel, Rational, logger
from diffeo_certifier.exceptions import InternalConsistencyError

ZERO = Fraction(0)
ONE = Fraction(1)


class ConstraintSense(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LPStatus(str, Enum):
    FEASIBLE = "feasible"
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinearProgram(FrozenModel):
    """``rows @ x (<=|=|>=) rhs``, optionally maximizing ``objective @ x``.

    Variables are nonnegative unless flagged in ``free``.
    """

    num_variables: int
    rows: Tuple[Tuple[Rational, ...], ...] = ()
    rhs: Tuple[Rational, ...] = ()
    senses: Tuple[ConstraintSense, ...] = ()
    objective: Optional[Tuple[Rational, ...]] = None
    free: Tuple[bool, ...] = ()

    @model_validator(mode="after")
    def _shapes(self):
        if self.num_variables < 0:
            raise ValueError("num_variables must be >= 0")
        if not (len(self.rows) == len(self.rhs) == len(self.senses)):
            raise ValueError("rows, rhs and senses must have the same length")
        for row in self.rows:
            if len(row) != self.num_variables:
                raise ValueError(
                    f"row of length {len(row)} in a program with {self.num_variables} variables"
                )
        if self.objective is not None and len(self.objective) != self.num_variables:
            raise ValueError("objective length differs from num_variables")
        if self.free and len(self.free) != self.num_variables:
            raise ValueError("free flags length differs from num_variables")
        return self

    def is_free(self, j: int) -> bool:
        return bool(self.free) and self.free[j]


class LPResult(FrozenModel):
    status: LPStatus
    point: Optional[Tuple[Rational, ...]] = None
    objective_value: Optional[Rational] = None
    farkas: Optional[Tuple[Rational, ...]] = None

    @property
    def feasible(self) -> bool:
        return self.status in (LPStatus.FEASIBLE, LPStatus.OPTIMAL, LPStatus.UNBOUNDED)


class LinearProgramBuilder:
    """Accumulates constraints row by row; ``build()`` freezes them."""

    def __init__(self, num_variables: int, free: Sequence[bool] = ()):
        self.num_variables = num_variables
        self.free = tuple(free)
        self.rows: List[Tuple[Fraction, ...]] = []
        self.rhs: List[Fraction] = []
        self.senses: List[ConstraintSense] = []

    def add(self, row: Sequence, sense: ConstraintSense, rhs) -> "LinearProgramBuilder":
        self.rows.append(tuple(Fraction(v) for v in row))
        self.senses.append(sense)
        self.rhs.append(Fraction(rhs))
        return self

    def build(self, objective: Optional[Sequence] = None) -> LinearProgram:
        return LinearProgram(
            num_variables=self.num_variables,
            rows=tuple(self.rows),
            rhs=tuple(self.rhs),
            senses=tuple(self.senses),
            objective=None if objective is None else tuple(Fraction(v) for v in objective),
            free=self.free,
        )


class _Tableau:
    """Dense standard-form tableau ``A x = b, x >= 0`` with an explicit basis."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        # expanded structural columns: (original index, +1 or -1)
        self.columns: List[Tuple[int, int]] = []
        for j in range(lp.num_variables):
            self.columns.append((j, 1))
            if lp.is_free(j):
                self.columns.append((j, -1))
        structural = len(self.columns)
        m = len(lp.rows)

        self.row_signs: List[int] = []
        senses: List[ConstraintSense] = []
        for b, sense in zip(lp.rhs, lp.senses):
            if b < 0:
                self.row_signs.append(-1)
                senses.append({ConstraintSense.LE: ConstraintSense.GE,
                               ConstraintSense.GE: ConstraintSense.LE,
                               ConstraintSense.EQ: ConstraintSense.EQ}[sense])
            else:
                self.row_signs.append(1)
                senses.append(sense)

        slack_of = {}
        next_col = structural
        for i, sense in enumerate(senses):
            if sense != ConstraintSense.EQ:
                slack_of[i] = next_col
                next_col += 1
        self.artificial_start = next_col
        artificial_of = {}
        for i, sense in enumerate(senses):
            if sense != ConstraintSense.LE:
                artificial_of[i] = next_col
                next_col += 1
        self.width = next_col

        self.rows: List[List[Fraction]] = []
        self.basis: List[int] = []
        self.initial_basic: List[int] = []
        for i in range(m):
            s = self.row_signs[i]
            row = [ZERO] * (self.width + 1)
            for col, (j, sign) in enumerate(self.columns):
                row[col] = s * sign * lp.rows[i][j]
            if i in slack_of:
                row[slack_of[i]] = ONE if senses[i] == ConstraintSense.LE else -ONE
            if i in artificial_of:
                row[artificial_of[i]] = ONE
            row[self.width] = s * lp.rhs[i]
            self.rows.append(row)
            basic = slack_of[i] if senses[i] == ConstraintSense.LE else artificial_of[i]
            self.basis.append(basic)
            self.initial_basic.append(basic)
        self.active_rows = list(range(m))

    def is_artificial(self, col: int) -> bool:
        return col >= self.artificial_start

    def pivot(self, r: int, col: int):
        piv = self.rows[r][col]
        self.rows[r] = [v / piv for v in self.rows[r]]
        pivot_row = self.rows[r]
        for i, row in enumerate(self.rows):
            if i != r and row[col] != 0:
                factor = row[col]
                self.rows[i] = [a - factor * b for a, b in zip(row, pivot_row)]
        self.basis[r] = col

    def reduced_costs(self, cost: List[Fraction]) -> List[Fraction]:
        reduced = list(cost)
        for row, basic in zip(self.rows, self.basis):
            cb = cost[basic]
            if cb:
                for col in range(self.width):
                    if row[col]:
                        reduced[col] -= cb * row[col]
        return reduced

    def objective(self, cost: List[Fraction]) -> Fraction:
        return sum((cost[b] * row[self.width] for row, b in zip(self.rows, self.basis)), ZERO)

    def run(self, cost: List[Fraction], blocked_from: int) -> bool:
        """Minimize ``cost @ x``; False when the objective is unbounded below."""
        iterations = 0
        while True:
            reduced = self.reduced_costs(cost)
            basic = set(self.basis)
            entering = next(
                (c for c in range(blocked_from) if c not in basic and reduced[c] < 0),
                None,
            )
            if entering is None:
                logger.debug(f"simplex optimal after {iterations} pivots")
                return True
            best = None
            for r, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[self.width] / row[entering]
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], entering)
            iterations += 1

    def drive_out_artificials(self):
        r = 0
        while r < len(self.rows):
            if self.is_artificial(self.basis[r]):
                col = next(
                    (c for c in range(self.artificial_start) if self.rows[r][c] != 0),
                    None,
                )
                if col is None:
                    # redundant equality row
                    del self.rows[r]
                    del self.basis[r]
                    del self.initial_basic[r]
                    del self.active_rows[r]
                    continue
                self.pivot(r, col)
            r += 1

    def point(self) -> Tuple[Fraction, ...]:
        values = [ZERO] * self.width
        for row, basic in zip(self.rows, self.basis):
            values[basic] = row[self.width]
        x = [ZERO] * self.lp.num_variables
        for col, (j, sign) in enumerate(self.columns):
            x[j] += sign * values[col]
        return tuple(x)


def _phase_one(lp: LinearProgram) -> Tuple[_Tableau, Optional[Tuple[Fraction, ...]]]:
    tableau = _Tableau(lp)
    cost = [ONE if tableau.is_artificial(c) else ZERO for c in range(tableau.width)]
    tableau.run(cost, tableau.width)
    if tableau.objective(cost) == 0:
        return tableau, None
    # duals of the phase-one optimum: y_i = c_B B^{-1} e_i
    y = []
    for initial in tableau.initial_basic:
        y.append(
            sum((cost[b] * row[initial] for row, b in zip(tableau.rows, tableau.basis)), ZERO)
        )
    certificate = [-s * yi for s, yi in zip(tableau.row_signs, y)]
    scale = -sum((u * b for u, b in zip(certificate, lp.rhs)), ZERO)
    return tableau, tuple(u / scale for u in certificate)


def lp_feasible(lp: LinearProgram) -> LPResult:
    """A feasible point, or a Farkas certificate; the objective is ignored."""
    tableau, farkas = _phase_one(lp)
    if farkas is not None:
        if not verify_farkas(lp, farkas):
            raise InternalConsistencyError("phase one produced an invalid Farkas certificate")
        logger.debug(f"LP with {len(lp.rows)} rows is infeasible")
        return LPResult(status=LPStatus.INFEASIBLE, farkas=farkas)
    point = tableau.point()
    if not verify_feasible_point(lp, point):
        raise InternalConsistencyError("phase one produced an infeasible point")
    return LPResult(status=LPStatus.FEASIBLE, point=point)


def lp_optimize(lp: LinearProgram) -> LPResult:
    """Maximize ``lp.objective``; OPTIMAL, UNBOUNDED or INFEASIBLE."""
    if lp.objective is None:
        raise ValueError("lp_optimize needs an objective")
    tableau, farkas = _phase_one(lp)
    if farkas is not None:
        if not verify_farkas(lp, farkas):
            raise InternalConsistencyError("phase one produced an invalid Farkas certificate")
        return LPResult(status=LPStatus.INFEASIBLE, farkas=farkas)
    tableau.drive_out_artificials()
    cost = [ZERO] * tableau.width
    for col, (j, sign) in enumerate(tableau.columns):
        cost[col] = -sign * lp.objective[j]
    if not tableau.run(cost, tableau.artificial_start):
        return LPResult(status=LPStatus.UNBOUNDED, point=tableau.point())
    point = tableau.point()
    if not verify_feasible_point(lp, point):
        raise InternalConsistencyError("phase two produced an infeasible point")
    value = sum((c * v for c, v in zip(lp.objective, point)), ZERO)
    return LPResult(status=LPStatus.OPTIMAL, point=point, objective_value=value)


def verify_feasible_point(lp: LinearProgram, x: Sequence) -> bool:
    if len(x) != lp.num_variables:
        return False
    x = [Fraction(v) for v in x]
    if any(v < 0 for j, v in enumerate(x) if not lp.is_free(j)):
        return False
    for row, b, sense in zip(lp.rows, lp.rhs, lp.senses):
        lhs = sum((a * v for a, v in zip(row, x)), ZERO)
        if sense == ConstraintSense.LE and lhs > b:
            return False
        if sense == ConstraintSense.GE and lhs < b:
            return False
        if sense == ConstraintSense.EQ and lhs != b:
            return False
    return True


def verify_farkas(lp: LinearProgram, y: Sequence) -> bool:
    """Check that ``y`` proves ``lp`` infeasible.

    Multipliers of ``<=`` rows are >= 0, of ``>=`` rows <= 0; ``y @ A`` is
    >= 0 on nonnegative variables and 0 on free ones; ``y @ b < 0``.
    """
    if len(y) != len(lp.rows):
        return False
    y = [Fraction(v) for v in y]
    for u, sense in zip(y, lp.senses):
        if sense == ConstraintSense.LE and u < 0:
            return False
        if sense == ConstraintSense.GE and u > 0:
            return False
    for j in range(lp.num_variables):
        combined = sum((u * row[j] for u, row in zip(y, lp.rows)), ZERO)
        if lp.is_free(j):
            if combined != 0:
                return False
        elif combined < 0:
            return False
    return sum((u * b for u, b in zip(y, lp.rhs)), ZERO) < 0
