"""Enumeration oracle tests."""

import numpy as np
import pytest

from edp_ocs.exceptions import GuardExceededError, InfeasibleInstanceError
from edp_ocs.instance import EdpInstance, SymMatrix
from edp_ocs.oracle import enumerate_optimum, iter_selections
from edp_ocs.status import Method, SolveStatus
from .instance_utils import coancestries, random_instance


def test_toy_optimum(toy_instance):
    report = enumerate_optimum(toy_instance)
    assert report.method == Method.ORACLE
    assert report.status == SolveStatus.OPTIMAL
    assert report.selected == (0, 1)
    assert report.objective == pytest.approx(2.5)
    assert report.coancestry == pytest.approx(0.5)
    assert report.iterations == 3
    assert report.to_dict()["selected"] == [1, 2]


def test_cap_excludes_full_sibs(sib_instance):
    # Only the two founders are unrelated enough
    report = enumerate_optimum(sib_instance)
    assert report.selected == (0, 1)
    assert report.objective == pytest.approx(0.75)
    assert report.coancestry == pytest.approx(0.5)


def test_infeasible():
    inst = EdpInstance(SymMatrix(np.eye(3)), np.array([3.0, 2.0, 1.0]), 2, 0.4)
    with pytest.raises(InfeasibleInstanceError):
        enumerate_optimum(inst)


def test_select_everyone():
    inst = EdpInstance(SymMatrix(np.eye(3)), np.array([3.0, 2.0, 1.0]), 3, 0.5)
    report = enumerate_optimum(inst)
    assert report.selected == (0, 1, 2)
    assert report.objective == pytest.approx(2.0)
    assert report.coancestry == pytest.approx(1 / 3)


def test_ties_go_to_first_selection():
    inst = EdpInstance(SymMatrix(np.eye(4)), np.ones(4), 2, 0.5)
    assert enumerate_optimum(inst).selected == (0, 1)


def test_guard(toy_instance):
    with pytest.raises(GuardExceededError):
        enumerate_optimum(toy_instance, guard=2)
    assert enumerate_optimum(toy_instance, guard=3).selected == (0, 1)


def test_iter_selections(toy_instance):
    rows = list(iter_selections(toy_instance))
    assert [selection for selection, _, _ in rows] == [(0, 1), (0, 2), (1, 2)]
    assert [objective for _, objective, _ in rows] == pytest.approx([2.5, 2.0, 1.5])
    assert [value for _, _, value in rows] == pytest.approx([0.5, 0.5, 0.5])


@pytest.mark.parametrize("seed", range(5))
def test_optimum_is_best_feasible(seed):
    inst = random_instance(seed)
    report = enumerate_optimum(inst)
    values = coancestries(inst.A, inst.m, inst.n_select)
    objectives = [objective for _, objective, _ in iter_selections(inst)]
    feasible = [obj for obj, coa in zip(objectives, values) if coa <= inst.two_theta + 1e-12]
    assert report.objective == pytest.approx(max(feasible))
    assert report.coancestry <= inst.two_theta + 1e-12
