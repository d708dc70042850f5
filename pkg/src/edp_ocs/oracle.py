"""Exact selection by exhaustive enumeration, for small instances."""

import itertools
import math
from typing import Iterator, Tuple

from .exceptions import GuardExceededError, InfeasibleInstanceError, raise_exception
from .instance import EdpInstance, group_coancestry
from .report import SolveReport, make_report
from .solver_logging import get_logger
from .status import Method, SolveStatus
from .util import Deadline

LOG = get_logger()

ENUMERATION_GUARD = 10**7
# Slack on the diversity test, absorbing rounding of the pair sum.
COANCESTRY_SLACK = 1e-12


def iter_selections(inst: EdpInstance) -> Iterator[Tuple[Tuple[int, ...], float, float]]:
    """Every selection of N candidates in lexicographic order.

    :param inst: instance
    :returns: iterator of (0-based selection, objective, coancestry)
    """
    for selection in itertools.combinations(range(inst.m), inst.n_select):
        objective = float(sum(inst.g[i] for i in selection)) / inst.n_select
        yield selection, objective, group_coancestry(inst.A, selection, inst.n_select)


def enumerate_optimum(inst: EdpInstance, guard: int = ENUMERATION_GUARD) -> SolveReport:
    """Best selection meeting the diversity cap, by trying all of them.

    Ties are broken in favour of the lexicographically smallest selection.

    :param inst: instance
    :param guard: largest number of selections to enumerate
    :returns: report of the optimal selection
    :raises GuardExceededError: if C(m, N) exceeds the guard
    :raises InfeasibleInstanceError: if no selection meets the cap
    """
    count = math.comb(inst.m, inst.n_select)
    if count > guard:
        raise_exception(
            GuardExceededError,
            "GuardExceeded",
            f"C({inst.m}, {inst.n_select}) = {count} selections exceeds the guard {guard}",
            __name__,
        )
    deadline = Deadline()
    best, best_objective, feasible = None, -math.inf, 0
    for selection, objective, coancestry in iter_selections(inst):
        if coancestry > inst.two_theta + COANCESTRY_SLACK:
            continue
        feasible += 1
        if objective > best_objective:
            best, best_objective = selection, objective
    LOG.info("Enumerated %d selections, %d within the cap", count, feasible)

    if best is None:
        raise_exception(
            InfeasibleInstanceError,
            "Infeasible",
            f"no selection of {inst.n_select} candidates has coancestry ≤ {inst.two_theta}",
            __name__,
        )
    return make_report(
        inst,
        best,
        Method.ORACLE,
        SolveStatus.OPTIMAL,
        iterations=count,
        bound_final=best_objective,
        wall_time=deadline.elapsed,
    )
