"""Cone decomposition method.

The cone ‖Uy‖ ≤ c₀ is rewritten as the parabolic cones z_i² ≤ w_i·c₀ with
Σw_i ≤ c₀. The master problem drops the parabolic cones; every master
solution that violates some of them is cut off by the supporting hyperplanes
at its projections onto those cones, and the master is solved again.
"""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .exceptions import (
    InfeasibleInstanceError,
    TimeLimitError,
    raise_exception,
    raise_input_error,
)
from .instance import EdpInstance, group_coancestry
from .linalg import apply_upper
from .milp import MilpModel, MilpSolution, ModelBuilder, Row, add_rows, make_row, solve
from .projection import ConePoint, GeometricCut, geometric_cut, is_outside, project
from .report import COANCESTRY_SLACK, SolveReport, make_report
from .simplex import LpBasis
from .solver_logging import get_logger
from .status import ColumnKind, Method, MilpStatus, ObjectiveSense, RowSense, SolveStatus
from .util import Deadline

LOG = get_logger()

# Slack on the master objective sequence before a rise is reported.
MONOTONE_SLACK = 1e-9
# Smallest distance between a normalized cut and its generating point.
MIN_CUT_DEPTH = 1e-7


@dataclass(frozen=True)
class CdmParams:
    """Parameters of the cutting-plane loop.

    :param delta: stall threshold on the change of (ẑ, ŵ) between iterations
    :param gap: relative gap of each master solve
    :param violation_tolerance: threshold on z² − w·c₀; derived from c₀ if None
    :param max_iterations: number of masters to solve at most
    :param time_limit: seconds for the whole loop, None for no limit
    """

    delta: float = 1e-8
    gap: float = 0.01
    violation_tolerance: Optional[float] = None
    max_iterations: int = 500
    time_limit: Optional[float] = 10800.0

    def __post_init__(self):
        if not self.delta >= 0:
            raise_input_error(f"delta must be nonnegative, got {self.delta}", __name__)
        if not self.gap >= 0:
            raise_input_error(f"gap must be nonnegative, got {self.gap}", __name__)
        if self.violation_tolerance is not None and not self.violation_tolerance > 0:
            raise_input_error(
                f"violation tolerance must be positive, got {self.violation_tolerance}", __name__
            )
        if self.max_iterations < 1:
            raise_input_error(
                f"max_iterations must be at least 1, got {self.max_iterations}", __name__
            )
        if self.time_limit is not None and not self.time_limit > 0:
            raise_input_error(f"time limit must be positive, got {self.time_limit}", __name__)


class CutRecord(NamedTuple):
    """Cut generated for cone ``index`` in iteration ``iteration``."""

    iteration: int
    index: int
    cut: GeometricCut
    z: float
    w: float


@dataclass
class CdmState:
    """Progress of one cutting-plane run."""

    # pylint: disable=too-many-instance-attributes

    model: MilpModel
    iteration: int = 0
    values: Optional[np.ndarray] = None
    basis: Optional[LpBasis] = None
    cuts: List[CutRecord] = field(default_factory=list)
    master_objectives: List[float] = field(default_factory=list)
    master_bounds: List[float] = field(default_factory=list)
    cuts_per_iteration: List[int] = field(default_factory=list)
    constraints_first: int = 0

    def selection(self, size: int) -> np.ndarray:
        """0-based indices with y > 1/2 in the last master solution."""
        return np.flatnonzero(self.values[:size] > 0.5)


# -----------------------------------------------------------------------------
# Master problem
# -----------------------------------------------------------------------------


def build_master(inst: EdpInstance) -> MilpModel:
    """Master problem without the parabolic cones.

    Columns y₁..y_m (binary), z₁..z_m (free), w₁..w_m (≥ 0); rows Σy = N
    (``card``), z_i = (Uy)_i (``link<i>``) and Σw ≤ c₀ (``budget``);
    objective max gᵀy/N.

    :param inst: instance
    :returns: master model
    """
    size = inst.m
    builder = ModelBuilder("edp_cdm_master")
    for i in range(size):
        builder.add_column(f"y{i + 1}", ColumnKind.BINARY, objective=inst.g[i] / inst.n_select)
    for i in range(size):
        builder.add_column(f"z{i + 1}", lower=-np.inf)
    for i in range(size):
        builder.add_column(f"w{i + 1}")

    builder.add_row("card", {i: 1.0 for i in range(size)}, RowSense.EQ, inst.n_select)
    upper = inst.factor.values
    for i in range(size):
        coeffs = {size + i: 1.0}
        coeffs.update({k: -upper[i, k] for k in range(i, size)})
        builder.add_row(f"link{i + 1}", coeffs, RowSense.EQ, 0.0)
    builder.add_row("budget", {2 * size + i: 1.0 for i in range(size)}, RowSense.LE, inst.c0)
    return builder.build(ObjectiveSense.MAX)


def violated_cones(
    inst: EdpInstance,
    values: np.ndarray,
    tolerance: Optional[float] = None,
) -> List[Tuple[int, float, float]]:
    """Parabolic cones violated by a master solution.

    :param inst: instance
    :param values: master column values (y, z, w)
    :param tolerance: threshold on ẑ_i² − ŵ_i·c₀; the default scales with c₀
    :returns: (0-based index, ẑ_i, ŵ_i) for every violated cone, by index
    """
    size, c0 = inst.m, inst.c0
    z_hat = np.asarray(values[size : 2 * size], dtype=float)
    w_hat = np.asarray(values[2 * size : 3 * size], dtype=float)
    violated = []
    for i in range(size):
        z, w = float(z_hat[i]), float(w_hat[i])
        if tolerance is None:
            outside = is_outside(ConePoint(z, w, c0))
        else:
            outside = z * z - w * c0 > tolerance
        if outside:
            violated.append((i, z, w))
    return violated


def _cut_rows(
    inst: EdpInstance, iteration: int, violated: List[Tuple[int, float, float]]
) -> Tuple[List[Row], List[CutRecord]]:
    size, c0 = inst.m, inst.c0
    rows, records = [], []
    for i, z, w in violated:
        hat = ConePoint(z, w, c0)
        cut = geometric_cut(hat, project(hat)).normalized()
        depth = cut.violation(z, w)
        if not depth > MIN_CUT_DEPTH:
            LOG.debug(
                "Cut for cone %d is %.3g from (%.10g, %.10g), skipped", i + 1, depth, z, w
            )
            continue
        rows.append(
            make_row(
                f"cut_{iteration}_{i + 1}",
                {size + i: cut.a_z, 2 * size + i: cut.a_w},
                RowSense.LE,
                cut.b,
            )
        )
        records.append(CutRecord(iteration, i, cut, z, w))
    return rows, records


# -----------------------------------------------------------------------------
# Cutting-plane loop
# -----------------------------------------------------------------------------


def lift_feasible(inst: EdpInstance, values: np.ndarray) -> bool:
    """Move a master point onto the parabolic cones if its selection meets the cap.

    The w columns are only bounded by the budget, so a selection with
    ‖Uy‖ ≤ c₀ is completed by w_i = z_i²/c₀, which meets every parabolic cone.

    :param inst: instance
    :param values: master column values (y, z, w), updated in place
    :returns: True if the point was lifted
    """
    size = inst.m
    selected = np.flatnonzero(values[:size] > 0.5)
    if len(selected) != inst.n_select:
        return False
    if group_coancestry(inst.A, selected, inst.n_select) > inst.two_theta + COANCESTRY_SLACK:
        return False
    y = np.zeros(size)
    y[selected] = 1.0
    z = apply_upper(inst.factor, y)
    values[:size] = y
    values[size : 2 * size] = z
    values[2 * size : 3 * size] = z * z / inst.c0
    return True


def _solve_master(state: CdmState, params: CdmParams, deadline: Deadline) -> MilpSolution:
    solution = solve(state.model, gap=params.gap, warm_start=state.basis, deadline=deadline)
    if solution.values is not None:
        return solution
    if solution.status == MilpStatus.INFEASIBLE:
        raise_exception(
            InfeasibleInstanceError,
            "Infeasible",
            f"master problem {state.iteration} is infeasible",
            __name__,
        )
    if solution.status == MilpStatus.TIME_LIMIT:
        raise_exception(
            TimeLimitError,
            "TimeLimit",
            f"time limit reached in master {state.iteration} before a selection was found",
            __name__,
        )
    raise_exception(
        InfeasibleInstanceError,
        "Unbounded",
        f"master problem {state.iteration} ended with status {solution.status.value}",
        __name__,
    )
    return solution  # unreachable


def run_cdm(inst: EdpInstance, params: CdmParams = CdmParams()) -> Tuple[SolveStatus, CdmState]:
    """Run the cutting-plane loop.

    :param inst: instance
    :param params: loop parameters
    :returns: exit status and the final state
    :raises InfeasibleInstanceError: if a master problem is infeasible
    :raises TimeLimitError: if time runs out before the first master is solved
    """
    deadline = Deadline(params.time_limit)
    state = CdmState(build_master(inst))
    state.constraints_first = state.model.n_rows
    size = inst.m
    previous: Optional[np.ndarray] = None

    while True:
        state.iteration += 1
        if state.iteration > 1 and deadline.expired():
            LOG.warning("Time limit reached after %d masters", state.iteration - 1)
            state.iteration -= 1
            return SolveStatus.TIME_LIMIT, state

        solution = _solve_master(state, params, deadline)
        state.values = np.array(solution.values, dtype=float)
        if state.master_objectives and (
            solution.objective
            > state.master_objectives[-1] + MONOTONE_SLACK * max(1.0, abs(state.master_objectives[-1]))
        ):
            LOG.warning(
                "Master objective rose from %.10g to %.10g",
                state.master_objectives[-1],
                solution.objective,
            )
        state.master_objectives.append(solution.objective)
        state.master_bounds.append(solution.bound)
        if solution.status == MilpStatus.TIME_LIMIT:
            LOG.warning("Time limit reached in master %d", state.iteration)
            return SolveStatus.TIME_LIMIT, state

        if lift_feasible(inst, state.values):
            LOG.info(
                "Iteration %d: master objective %.10g, selection meets the cap, %.2f s",
                state.iteration,
                solution.objective,
                deadline.elapsed,
            )
            return SolveStatus.OPTIMAL, state
        violated = violated_cones(inst, state.values, params.violation_tolerance)
        LOG.info(
            "Iteration %d: master objective %.10g, %d rows, %d violated cones, %.2f s",
            state.iteration,
            solution.objective,
            state.model.n_rows,
            len(violated),
            deadline.elapsed,
        )
        if not violated:
            return SolveStatus.OPTIMAL, state

        current = state.values[size : 3 * size]
        if previous is not None:
            dz = np.linalg.norm(current[:size] - previous[:size])
            dw = np.linalg.norm(current[size:] - previous[size:])
            if dz <= params.delta and dw <= params.delta:
                LOG.warning("Stalled at iteration %d: ‖Δz‖ = %.3g, ‖Δw‖ = %.3g", state.iteration, dz, dw)
                return SolveStatus.STALLED, state
        previous = current.copy()

        if state.iteration >= params.max_iterations:
            LOG.warning("Iteration limit %d reached", params.max_iterations)
            return SolveStatus.STALLED, state

        rows, records = _cut_rows(inst, state.iteration, violated)
        if not rows:
            LOG.warning("No separating cut at iteration %d", state.iteration)
            return SolveStatus.STALLED, state
        state.model = add_rows(state.model, rows)
        state.basis = solution.basis.extend(len(rows)) if solution.basis else None
        state.cuts.extend(records)
        state.cuts_per_iteration.append(len(rows))


def solve_edp_cdm(inst: EdpInstance, params: CdmParams = CdmParams()) -> SolveReport:
    """Solve the selection problem with the cone decomposition method.

    The report carries the master objective of every iteration, the number
    of rows in the first and the last master and the final master model.

    :param inst: instance
    :param params: loop parameters
    :returns: report of the last master's selection
    """
    deadline = Deadline()
    status, state = run_cdm(inst, params)
    return make_report(
        inst,
        state.selection(inst.m),
        Method.CDM,
        status,
        iterations=state.iteration,
        cuts_added=len(state.cuts),
        constraints_first=state.constraints_first,
        constraints_last=state.model.n_rows,
        gap_requested=params.gap,
        bound_final=state.master_bounds[-1],
        wall_time=deadline.elapsed,
        master_objectives=tuple(state.master_objectives),
        final_model=state.model,
    )
