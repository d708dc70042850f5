"""Bounded simplex tests against scipy's HiGHS interface."""

import numpy as np
import pytest
import scipy.optimize

from edp_ocs.simplex import StandardForm, solve_lp
from edp_ocs.status import BasisStatus, LpStatus, RowSense

SENSES = (RowSense.LE, RowSense.GE, RowSense.EQ)


def _linprog(matrix, rhs, senses, cost, lower, upper):
    """Reference solve of min cᵀx with the same rows and bounds."""
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row, value, sense in zip(matrix, rhs, senses):
        if sense == RowSense.LE:
            a_ub.append(row)
            b_ub.append(value)
        elif sense == RowSense.GE:
            a_ub.append(-row)
            b_ub.append(-value)
        else:
            a_eq.append(row)
            b_eq.append(value)
    bounds = [
        (None if np.isinf(lo) else lo, None if np.isinf(up) else up) for lo, up in zip(lower, upper)
    ]
    return scipy.optimize.linprog(
        cost,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )


def test_small_lp():
    # max x + y  s.t.  x + 2y ≤ 4, 3x + y ≤ 6, 0 ≤ x, y
    form = StandardForm(
        np.array([[1.0, 2.0], [3.0, 1.0]]),
        np.array([4.0, 6.0]),
        [RowSense.LE, RowSense.LE],
        np.array([-1.0, -1.0]),
    )
    result = solve_lp(form, np.zeros(2), np.full(2, np.inf))
    assert result.status == LpStatus.OPTIMAL
    np.testing.assert_allclose(result.x, [1.6, 1.2], atol=1e-9)
    assert result.objective == pytest.approx(-2.8)


def test_infeasible_and_unbounded():
    form = StandardForm(
        np.array([[1.0, 1.0], [1.0, 1.0]]),
        np.array([1.0, 3.0]),
        [RowSense.LE, RowSense.GE],
        np.zeros(2),
    )
    assert solve_lp(form, np.zeros(2), np.full(2, np.inf)).status == LpStatus.INFEASIBLE

    form = StandardForm(np.array([[1.0, -1.0]]), np.array([1.0]), [RowSense.LE], np.array([-1.0, 0.0]))
    assert solve_lp(form, np.zeros(2), np.full(2, np.inf)).status == LpStatus.UNBOUNDED


def test_crossed_bounds_are_infeasible():
    form = StandardForm(np.ones((1, 1)), np.ones(1), [RowSense.LE], np.ones(1))
    assert solve_lp(form, np.ones(1), np.zeros(1)).status == LpStatus.INFEASIBLE


@pytest.mark.parametrize("seed", range(15))
def test_random_lp_matches_reference(seed):
    rng = np.random.default_rng(seed)
    n_rows, n_columns = int(rng.integers(2, 7)), int(rng.integers(2, 9))
    matrix = rng.normal(size=(n_rows, n_columns))
    point = rng.uniform(-1.0, 1.0, size=n_columns)
    senses = [SENSES[k] for k in rng.choice(3, size=n_rows, p=[0.5, 0.3, 0.2])]
    slack = rng.uniform(0.0, 1.0, size=n_rows)
    activity = matrix @ point
    rhs = np.array(
        [
            a + s if sense == RowSense.LE else a - s if sense == RowSense.GE else a
            for a, s, sense in zip(activity, slack, senses)
        ]
    )
    lower = np.where(rng.random(n_columns) < 0.3, -np.inf, -2.0)
    upper = np.where(rng.random(n_columns) < 0.3, np.inf, 2.0)
    cost = rng.normal(size=n_columns)

    reference = _linprog(matrix, rhs, senses, cost, lower, upper)
    result = solve_lp(StandardForm(matrix, rhs, senses, cost), lower, upper)
    if reference.status == 3:
        assert result.status == LpStatus.UNBOUNDED
        return
    assert reference.status == 0
    assert result.status == LpStatus.OPTIMAL
    assert result.objective == pytest.approx(reference.fun, rel=1e-7, abs=1e-7)
    assert np.all(result.x >= lower - 1e-7)
    assert np.all(result.x <= upper + 1e-7)


def test_warm_start_reuses_basis():
    rng = np.random.default_rng(3)
    matrix = rng.uniform(0.1, 1.0, size=(5, 8))
    form = StandardForm(matrix, np.ones(5), [RowSense.LE] * 5, -rng.uniform(0.1, 1.0, size=8))
    lower, upper = np.zeros(8), np.ones(8)
    cold = solve_lp(form, lower, upper)
    warm = solve_lp(form, lower, upper, basis=cold.basis)
    assert warm.status == LpStatus.OPTIMAL
    assert warm.objective == pytest.approx(cold.objective)
    assert warm.pivots == 0

    extended = cold.basis.extend(2)
    assert len(extended.basic) == 7
    assert extended.status[-2:] == (BasisStatus.BASIC, BasisStatus.BASIC)


def test_wrong_shaped_basis_is_ignored():
    form = StandardForm(np.ones((1, 2)), np.ones(1), [RowSense.LE], np.array([-1.0, -2.0]))
    other = StandardForm(np.ones((2, 2)), np.ones(2), [RowSense.LE] * 2, np.zeros(2))
    basis = solve_lp(other, np.zeros(2), np.ones(2)).basis
    result = solve_lp(form, np.zeros(2), np.ones(2), basis=basis)
    assert result.status == LpStatus.OPTIMAL
    assert result.objective == pytest.approx(-2.0)
