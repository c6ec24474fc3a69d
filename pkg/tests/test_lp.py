import logging
from fractions import Fraction

import pytest

from diffeo_certifier.lp import (
    ConstraintSense,
    LinearProgram,
    LinearProgramBuilder,
    LPStatus,
    lp_feasible,
    lp_optimize,
    verify_farkas,
    verify_feasible_point,
)

logger = logging.getLogger("diffeo_certifier_test")

LE, EQ, GE = ConstraintSense.LE, ConstraintSense.EQ, ConstraintSense.GE


def gem_system(alpha):
    builder = LinearProgramBuilder(2, free=[True, True])
    builder.add((6, 0), LE, 1).add((0, 6), LE, 1).add(alpha, EQ, 1)
    return builder.build()


def test_feasible_gem_system():
    lp = gem_system((3, 3))
    result = lp_feasible(lp)
    assert result.status == LPStatus.FEASIBLE
    assert verify_feasible_point(lp, result.point)
    assert verify_feasible_point(lp, (Fraction(1, 6), Fraction(1, 6)))


def test_infeasible_gem_system_has_certificate():
    lp = gem_system((3, 1))
    result = lp_feasible(lp)
    assert result.status == LPStatus.INFEASIBLE
    assert verify_farkas(lp, result.farkas)
    assert sum(u * b for u, b in zip(result.farkas, lp.rhs)) == -1


def test_contradictory_equalities():
    lp = LinearProgramBuilder(1, free=[True]).add([1], EQ, 1).add([1], EQ, 2).build()
    result = lp_feasible(lp)
    assert result.status == LPStatus.INFEASIBLE
    assert verify_farkas(lp, result.farkas)


def test_negative_right_hand_sides():
    # x + y >= 3, x <= 1, y <= 1 with x, y >= 0
    lp = (
        LinearProgramBuilder(2)
        .add([-1, -1], LE, -3)
        .add([1, 0], LE, 1)
        .add([0, 1], LE, 1)
        .build()
    )
    result = lp_feasible(lp)
    assert result.status == LPStatus.INFEASIBLE
    assert verify_farkas(lp, result.farkas)


def test_optimize_small_program():
    # maximize x + 2y with x + y <= 4, x <= 3, y <= 2
    lp = (
        LinearProgramBuilder(2)
        .add([1, 1], LE, 4)
        .add([1, 0], LE, 3)
        .add([0, 1], LE, 2)
        .build(objective=[1, 2])
    )
    result = lp_optimize(lp)
    assert result.status == LPStatus.OPTIMAL
    assert result.objective_value == 6
    assert result.point == (2, 2)


def test_optimize_with_free_variable_and_equality():
    # maximize -x with x free, x >= -5 written as -x <= 5, and x + y = 1, y >= 0
    lp = (
        LinearProgramBuilder(2, free=[True, False])
        .add([-1, 0], LE, 5)
        .add([1, 1], EQ, 1)
        .build(objective=[-1, 0])
    )
    result = lp_optimize(lp)
    assert result.status == LPStatus.OPTIMAL
    assert result.point == (-5, 6)
    assert result.objective_value == 5


def test_unbounded_program():
    lp = LinearProgramBuilder(2).add([1, -1], LE, 1).build(objective=[1, 1])
    assert lp_optimize(lp).status == LPStatus.UNBOUNDED


def test_degenerate_program_terminates():
    # a classic cycling example for the textbook pivot rule
    lp = (
        LinearProgramBuilder(4)
        .add([Fraction(1, 4), -8, -1, 9], LE, 0)
        .add([Fraction(1, 2), -12, Fraction(-1, 2), 3], LE, 0)
        .add([0, 0, 1, 0], LE, 1)
        .build(objective=[Fraction(3, 4), -20, Fraction(1, 2), -6])
    )
    result = lp_optimize(lp)
    assert result.status == LPStatus.OPTIMAL
    assert result.objective_value == Fraction(5, 4)


def test_redundant_equalities_are_dropped():
    lp = (
        LinearProgramBuilder(2)
        .add([1, 1], EQ, 2)
        .add([2, 2], EQ, 4)
        .build(objective=[1, 0])
    )
    result = lp_optimize(lp)
    assert result.status == LPStatus.OPTIMAL
    assert result.objective_value == 2


def test_program_shape_is_validated():
    with pytest.raises(ValueError):
        LinearProgram(num_variables=2, rows=((1,),), rhs=(1,), senses=(LE,))


def test_wrong_certificate_is_rejected():
    lp = gem_system((3, 1))
    assert not verify_farkas(lp, (0, 0, 0))
    assert not verify_farkas(lp, (-1, 0, 0))
