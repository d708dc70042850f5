"""Lifted polyhedral relaxation of the selection problem.

The cone constraint ‖Uy‖ ≤ √(2θ)·N is decomposed into a binary tower of
three-variable cones δ^{j+1}_i ≥ ‖(δ^j_{2i−1}, δ^j_{2i})‖, and each of those
is replaced by a rotation recursion of depth s_j(ε): a polyhedron that
contains the three-variable cone and lies inside a slightly widened copy.
"""

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    InfeasibleInstanceError,
    ScanError,
    TimeLimitError,
    raise_exception,
    raise_input_error,
)
from .feature_toggle import FEATURE_PRINTED_ANGLE_SCHEDULE
from .instance import EdpInstance
from .milp import Column, MilpModel, ModelBuilder, Row, make_row, row_activity, solve
from .report import SolveReport, make_report
from .solver_logging import get_logger
from .status import (
    AngleSchedule,
    ColumnKind,
    LppVariant,
    Method,
    MilpStatus,
    ObjectiveSense,
    RowSense,
    SolveStatus,
)
from .util import Deadline

LOG = get_logger()

ACTIVITY_TOLERANCE = 1e-7
TRIG_SNAP = 1e-15


# -----------------------------------------------------------------------------
# Tower decomposition
# -----------------------------------------------------------------------------


class Cell(NamedTuple):
    """Three-variable cone out ≥ ‖(left, right)‖ between layers j and j+1.

    Variables are flat tower indices (layer-major, see TowerLayout.index).
    """

    layer: int
    position: int
    left: int
    right: int
    out: int


class Passthrough(NamedTuple):
    """Odd last variable of a layer carried unchanged to the next layer."""

    layer: int
    source: int
    target: int


@dataclass(frozen=True)
class TowerLayout:
    """Binary tower over m inputs.

    Layer 0 holds the m cone coordinates, the single variable of the last
    layer J is the cone radius.
    """

    m: int
    sizes: Tuple[int, ...]
    cells: Tuple[Cell, ...]
    passthroughs: Tuple[Passthrough, ...]

    @property
    def depth(self) -> int:
        """Number of layers above the inputs, J = ⌈log₂ m⌉."""
        return len(self.sizes) - 1

    @property
    def total(self) -> int:
        """Total number of tower variables T(m), inputs and radius included."""
        return sum(self.sizes)

    @property
    def offsets(self) -> Tuple[int, ...]:
        """Flat index of the first variable of each layer."""
        return tuple(int(x) for x in np.cumsum((0,) + self.sizes[:-1]))

    def index(self, layer: int, position: int) -> int:
        """Flat index of δ^layer_position (positions are 1-based)."""
        return self.offsets[layer] + position - 1

    def cells_in_layer(self, layer: int) -> Tuple[Cell, ...]:
        """Cells whose inputs lie in the given layer."""
        return tuple(cell for cell in self.cells if cell.layer == layer)

    @property
    def root(self) -> int:
        """Flat index of the radius variable."""
        return self.total - 1


def tower_layout(m: int) -> TowerLayout:
    """Decompose an (m+1)-dimensional cone into a tower of 3-variable cones.

    :param m: number of cone coordinates, at least 2
    :returns: layout with t_0 = m, t_{j+1} = ⌈t_j/2⌉ down to t_J = 1
    """
    if m < 2:
        raise_input_error(f"tower needs at least 2 inputs, got {m}", __name__)
    sizes = [m]
    while sizes[-1] > 1:
        sizes.append((sizes[-1] + 1) // 2)
    offsets = np.cumsum([0] + sizes[:-1])

    cells, passthroughs = [], []
    for j, size in enumerate(sizes[:-1]):
        for i in range(1, size // 2 + 1):
            cells.append(
                Cell(
                    j,
                    i,
                    int(offsets[j]) + 2 * i - 2,
                    int(offsets[j]) + 2 * i - 1,
                    int(offsets[j + 1]) + i - 1,
                )
            )
        if size % 2:
            passthroughs.append(
                Passthrough(j, int(offsets[j]) + size - 1, int(offsets[j + 1]) + sizes[j + 1] - 1)
            )
    return TowerLayout(m, tuple(sizes), tuple(cells), tuple(passthroughs))


# -----------------------------------------------------------------------------
# Rotation-recursion blocks
# -----------------------------------------------------------------------------


def approximation_depth(layer: int, epsilon: float, log_base: float = math.e) -> int:
    """Recursion depth s_j(ε) of the cells in a tower layer.

    s_j(ε) = ⌈(j+1)/2⌉ − ⌈log₄((16/9)π⁻² log(1+ε))⌉, at least 1.

    :param layer: tower layer j
    :param epsilon: target accuracy ε > 0
    :param log_base: base of the inner logarithm
    :returns: depth s ≥ 1
    """
    if not epsilon > 0:
        raise_input_error(f"epsilon must be positive, got {epsilon}", __name__)
    if not log_base > 1:
        raise_input_error(f"logarithm base must exceed 1, got {log_base}", __name__)
    inner = (16 / 9) * math.pi**-2 * math.log(1 + epsilon, log_base)
    depth = math.ceil((layer + 1) / 2) - math.ceil(math.log(inner, 4))
    return max(1, depth)


def _trig(angle: float) -> Tuple[float, float]:
    cos, sin = math.cos(angle), math.sin(angle)
    return (0.0 if abs(cos) < TRIG_SNAP else cos, 0.0 if abs(sin) < TRIG_SNAP else sin)


def step_angles(depth: int, schedule: AngleSchedule) -> Tuple[Tuple[float, ...], float]:
    """Rotation angles of the recursion steps and of the terminal row."""
    if schedule == AngleSchedule.CORRECTED:
        return tuple(math.pi / 2 ** (i + 1) for i in range(1, depth)), math.pi / 2 ** (depth + 1)
    return tuple(math.pi / 2**i for i in range(1, depth)), math.pi / 2**depth


def block_radius_bound(depth: int, schedule: AngleSchedule = AngleSchedule.CORRECTED) -> float:
    """Largest ‖(v₁, v₂)‖/v₀ over a block of the given depth.

    :returns: 1/cos(π/2^{s+1}) for the corrected schedule, 1/cos(π/2^s) for
        the printed one (unbounded at s = 1)
    """
    if schedule == AngleSchedule.CORRECTED:
        return 1 / math.cos(math.pi / 2 ** (depth + 1))
    if depth == 1:
        return math.inf
    return 1 / math.cos(math.pi / 2**depth)


@dataclass(frozen=True)
class WBlockSpec:
    """Columns and rows replacing one cell v₀ ≥ ‖(v₁, v₂)‖.

    Columns are α₁..α_s followed by β₁..β_s.
    """

    depth: int
    schedule: AngleSchedule
    columns: Tuple[Column, ...]
    rows: Tuple[Row, ...]

    @property
    def n_rows(self) -> int:
        """Number of rows."""
        return len(self.rows)


def expected_block_rows(depth: int) -> int:
    """Row count 5 + 3(s − 1) of a block without promoted rows."""
    return 5 + 3 * (depth - 1)


def build_w_block(
    depth: int,
    cell: Tuple[int, int, int],
    first_column: int,
    prefix: str = "w",
    schedule: AngleSchedule = AngleSchedule.CORRECTED,
    acsm: bool = False,
) -> WBlockSpec:
    """Rows of the rotation recursion for one cell.

    Each absolute value |e| ≤ β becomes the row pair β − e ≥ 0 (``_pos``) and
    β + e ≥ 0 (``_neg``). With ``acsm`` the β₁ pair is replaced by the
    equality β₁ = −v₂cos(π) + v₁sin(π).

    :param depth: recursion depth s ≥ 1
    :param cell: column indices of (v₀, v₁, v₂)
    :param first_column: index the block's first column will get in the model
    :param prefix: row and column name prefix
    :param schedule: angle schedule
    :param acsm: replace the β₁ pair by an equality
    :returns: block columns and rows
    """
    if depth < 1:
        raise_input_error(f"block depth must be at least 1, got {depth}", __name__)
    v0, v1, v2 = cell
    alpha = [first_column + i for i in range(depth)]
    beta = [first_column + depth + i for i in range(depth)]
    printed = schedule == AngleSchedule.PRINTED

    columns = [
        Column(f"{prefix}_a{i + 1}", ColumnKind.CONTINUOUS,
               -math.inf if printed and i == 0 else 0.0, math.inf, 0.0)
        for i in range(depth)
    ]
    columns += [
        Column(f"{prefix}_b{i + 1}", ColumnKind.CONTINUOUS, 0.0, math.inf, 0.0)
        for i in range(depth)
    ]

    rows: List[Row] = []

    def ge_abs(name: str, target: int, expr: Dict[int, float]) -> None:
        rows.append(make_row(f"{name}_pos", _combine({target: 1.0}, expr, -1.0), RowSense.GE, 0.0))
        rows.append(make_row(f"{name}_neg", _combine({target: 1.0}, expr, 1.0), RowSense.GE, 0.0))

    cos_pi, sin_pi = _trig(math.pi)
    if printed:
        rows.append(
            make_row(f"{prefix}_a1", {alpha[0]: 1.0, v1: -cos_pi, v2: -sin_pi}, RowSense.EQ, 0.0)
        )
        first_beta = {v2: cos_pi, v1: -sin_pi}
    else:
        ge_abs(f"{prefix}_a1", alpha[0], {v1: 1.0})
        first_beta = {v2: 1.0}
    if acsm:
        rows.append(
            make_row(f"{prefix}_b1", {beta[0]: 1.0, v2: cos_pi, v1: -sin_pi}, RowSense.EQ, 0.0)
        )
    else:
        ge_abs(f"{prefix}_b1", beta[0], first_beta)

    angles, terminal = step_angles(depth, schedule)
    for i, angle in enumerate(angles):
        cos, sin = _trig(angle)
        rows.append(
            make_row(
                f"{prefix}_a{i + 2}",
                {alpha[i + 1]: 1.0, alpha[i]: -cos, beta[i]: -sin},
                RowSense.EQ,
                0.0,
            )
        )
        ge_abs(f"{prefix}_b{i + 2}", beta[i + 1], {beta[i]: cos, alpha[i]: -sin})

    cos, sin = _trig(terminal)
    rows.append(
        make_row(f"{prefix}_top", {v0: 1.0, alpha[-1]: -cos, beta[-1]: -sin}, RowSense.EQ, 0.0)
    )
    if printed:
        rows.append(make_row(f"{prefix}_v0", {v0: 1.0}, RowSense.GE, 0.0))
    return WBlockSpec(depth, schedule, tuple(columns), tuple(rows))


def _combine(base: Dict[int, float], expr: Dict[int, float], scale: float) -> Dict[int, float]:
    merged = dict(base)
    for j, value in expr.items():
        merged[j] = merged.get(j, 0.0) + scale * value
    return merged


def forward_witness(
    depth: int,
    v0: float,
    v1: float,
    v2: float,
    schedule: AngleSchedule = AngleSchedule.CORRECTED,
) -> Tuple[np.ndarray, np.ndarray]:
    """α, β satisfying a block's rows for a cone point v₀ ≥ ‖(v₁, v₂)‖.

    Runs the rotation recursion forward with every inequality tight, then
    raises β_s so that the terminal row reaches v₀.

    :returns: (α₁..α_s, β₁..β_s)
    """
    alpha = np.zeros(depth)
    beta = np.zeros(depth)
    if schedule == AngleSchedule.PRINTED:
        cos_pi, sin_pi = _trig(math.pi)
        alpha[0] = v1 * cos_pi + v2 * sin_pi
        beta[0] = abs(v2 * cos_pi - v1 * sin_pi)
    else:
        alpha[0], beta[0] = abs(v1), abs(v2)
    angles, terminal = step_angles(depth, schedule)
    for i, angle in enumerate(angles):
        cos, sin = _trig(angle)
        alpha[i + 1] = alpha[i] * cos + beta[i] * sin
        beta[i + 1] = abs(beta[i] * cos - alpha[i] * sin)
    cos, sin = _trig(terminal)
    shortfall = v0 - (alpha[-1] * cos + beta[-1] * sin)
    beta[-1] += max(0.0, shortfall) / sin
    return alpha, beta


def single_cell_model(
    depth: int,
    schedule: AngleSchedule = AngleSchedule.CORRECTED,
    objective: Tuple[float, float] = (0.0, 0.0),
    v0: float = 1.0,
    acsm: bool = False,
) -> MilpModel:
    """LP over one block with v₀ fixed, maximising c₁v₁ + c₂v₂.

    Columns are v₀, v₁, v₂ followed by the block columns.
    """
    builder = ModelBuilder(f"cell_{schedule.value}_{depth}")
    builder.add_column("v0", lower=v0, upper=v0)
    builder.add_column("v1", lower=-math.inf, objective=objective[0])
    builder.add_column("v2", lower=-math.inf, objective=objective[1])
    block = build_w_block(depth, (0, 1, 2), 3, "w", schedule, acsm)
    builder.extend(block.columns, block.rows)
    return builder.build(ObjectiveSense.MAX)


def layer_depths(layout: TowerLayout, epsilon: float, log_base: float = math.e) -> Tuple[int, ...]:
    """Depth s_j(ε) for every layer that has cells."""
    return tuple(approximation_depth(j, epsilon, log_base) for j in range(layout.depth))


def resolve_schedule(
    epsilon: float,
    depths: Iterable[int],
    requested: Optional[AngleSchedule] = None,
) -> AngleSchedule:
    """Angle schedule to build with.

    The printed schedule is used only when requested (argument or feature
    toggle) and when its blocks stay within 1+ε for every depth; otherwise
    the corrected schedule is used.
    """
    if requested is None:
        requested = (
            AngleSchedule.PRINTED
            if FEATURE_PRINTED_ANGLE_SCHEDULE.is_active()
            else AngleSchedule.CORRECTED
        )
    if requested == AngleSchedule.PRINTED:
        worst = max(block_radius_bound(s, requested) for s in depths)
        if worst > 1 + epsilon:
            LOG.warning(
                "Printed angle schedule widens a cell by %.6g > 1+ε, using corrected schedule",
                worst,
            )
            return AngleSchedule.CORRECTED
    return requested


def relaxation_factor(
    m: int,
    epsilon: float,
    schedule: AngleSchedule = AngleSchedule.CORRECTED,
    log_base: float = math.e,
) -> float:
    """Bound ρ with ‖Uy‖ ≤ ρ·v₀ for every point of the relaxation.

    Product over the layers of the per-cell bound at that layer's depth.
    """
    layout = tower_layout(m)
    return float(np.prod([block_radius_bound(s, schedule) for s in layer_depths(layout, epsilon, log_base)]))


# -----------------------------------------------------------------------------
# Model assembly
# -----------------------------------------------------------------------------


def build_lpp_model(
    inst: EdpInstance,
    epsilon: float,
    variant: LppVariant = LppVariant.PLAIN,
    schedule: Optional[AngleSchedule] = None,
    log_base: float = math.e,
    promote: FrozenSet[str] = frozenset(),
) -> MilpModel:
    """Mixed-binary LP relaxing the selection problem.

    Columns: y (m, binary), z (m, free), the tower variables of layers 1..J
    (the last one fixed at √(2θ)·N), then the α/β columns of every cell.
    Rows: Σy = N, z = Uy, passthrough equalities and one block per cell.

    :param inst: instance
    :param epsilon: accuracy ε > 0
    :param variant: ``acsm`` replaces every β₁ pair by an equality
    :param schedule: angle schedule, resolved with resolve_schedule if None
    :param log_base: base of the logarithm in the depth formula
    :param promote: names of inequality rows to turn into equalities
    :returns: model maximising gᵀy/N
    """
    layout = tower_layout(inst.m)
    depths = layer_depths(layout, epsilon, log_base)
    schedule = resolve_schedule(epsilon, depths, schedule)
    size, n_select = inst.m, inst.n_select

    builder = ModelBuilder(f"edp_lpp_{variant.value}")
    for i in range(size):
        builder.add_column(f"y{i + 1}", ColumnKind.BINARY, objective=inst.g[i] / n_select)
    for i in range(size):
        builder.add_column(f"z{i + 1}", lower=-math.inf)

    # Tower variables that only carry a raw z coordinate upwards keep its sign.
    signed = set(range(size))
    for passthrough in layout.passthroughs:
        if passthrough.source in signed:
            signed.add(passthrough.target)
    column_of = {k: size + k for k in range(size)}
    for j in range(1, layout.depth + 1):
        for pos in range(1, layout.sizes[j] + 1):
            k = layout.index(j, pos)
            if k == layout.root:
                lower = upper = inst.c0
            else:
                lower, upper = (-math.inf if k in signed else 0.0), math.inf
            column_of[k] = builder.add_column(f"d{j}_{pos}", lower=lower, upper=upper)

    builder.add_row("card", {i: 1.0 for i in range(size)}, RowSense.EQ, n_select)
    upper_factor = inst.factor.values
    for i in range(size):
        coeffs = {size + i: 1.0}
        for k in range(i, size):
            coeffs[k] = coeffs.get(k, 0.0) - upper_factor[i, k]
        builder.add_row(f"link{i + 1}", coeffs, RowSense.EQ, 0.0)
    for passthrough in layout.passthroughs:
        builder.add_row(
            f"pass{passthrough.layer}",
            {column_of[passthrough.target]: 1.0, column_of[passthrough.source]: -1.0},
            RowSense.EQ,
            0.0,
        )

    for cell in layout.cells:
        block = build_w_block(
            depths[cell.layer],
            (column_of[cell.out], column_of[cell.left], column_of[cell.right]),
            len(builder.columns),
            f"w{cell.layer}_{cell.position}",
            schedule,
            acsm=variant == LppVariant.ACSM,
        )
        builder.extend(block.columns, _promote(block.rows, promote))

    model = builder.build(ObjectiveSense.MAX)
    LOG.info(
        "LPP model (%s, %s schedule, ε = %g): %d columns, %d rows, depths %s",
        variant.value,
        schedule.value,
        epsilon,
        model.n_columns,
        model.n_rows,
        depths,
    )
    return model


def _promote(rows: Sequence[Row], names: FrozenSet[str]) -> Tuple[Row, ...]:
    if not names:
        return tuple(rows)
    return tuple(
        row._replace(sense=RowSense.EQ) if row.name in names and row.sense != RowSense.EQ else row
        for row in rows
    )


def active_constraint_scan(
    inst: EdpInstance,
    epsilons: Iterable[float],
    gap: float = 0.0,
    time_limit: Optional[float] = None,
    schedule: Optional[AngleSchedule] = None,
    log_base: float = math.e,
) -> FrozenSet[str]:
    """Rows active at the optimum of the relaxation for every ε.

    :param inst: instance
    :param epsilons: accuracies to scan
    :param gap: relative gap of each solve
    :param time_limit: seconds for the whole scan
    :param schedule: angle schedule
    :param log_base: base of the logarithm in the depth formula
    :returns: names of rows with |lhs − rhs| ≤ 1e-7 at every optimum
    :raises ScanError: if any model is not solved to optimality
    """
    deadline = Deadline(time_limit)
    always: Optional[set] = None
    for epsilon in sorted(set(epsilons), reverse=True):
        model = build_lpp_model(inst, epsilon, LppVariant.PLAIN, schedule, log_base)
        solution = solve(model, gap=gap, deadline=deadline)
        if solution.status != MilpStatus.OPTIMAL:
            raise_exception(
                ScanError,
                "ScanError",
                f"relaxation for ε = {epsilon} ended with status {solution.status.value}",
                __name__,
            )
        activity = row_activity(model, solution.values)
        active = {
            row.name
            for row, lhs in zip(model.rows, activity)
            if abs(lhs - row.rhs) <= ACTIVITY_TOLERANCE
        }
        LOG.info("ε = %g: %d of %d rows active", epsilon, len(active), model.n_rows)
        always = active if always is None else always & active
    if always is None:
        raise_input_error("active-constraint scan needs at least one ε", __name__)
    return frozenset(always)


def solve_edp_lpp(
    inst: EdpInstance,
    epsilon: float,
    variant: LppVariant = LppVariant.PLAIN,
    gap: float = 0.01,
    time_limit: Optional[float] = None,
    schedule: Optional[AngleSchedule] = None,
    log_base: float = math.e,
    promote: FrozenSet[str] = frozenset(),
) -> SolveReport:
    """Solve the selection problem through its lifted polyhedral relaxation.

    The returned selection maximises the relaxation; its coancestry may
    exceed 2θ by up to the relaxation factor squared, which the report flags.

    :returns: report
    :raises InfeasibleInstanceError: if the relaxation is infeasible
    """
    deadline = Deadline(time_limit)
    layout = tower_layout(inst.m)
    shipped = resolve_schedule(epsilon, layer_depths(layout, epsilon, log_base), schedule)
    model = build_lpp_model(inst, epsilon, variant, shipped, log_base, promote)
    solution = solve(model, gap=gap, deadline=deadline)
    method = Method.LPP_ACSM if variant == LppVariant.ACSM else Method.LPP

    if solution.values is None:
        if solution.status == MilpStatus.TIME_LIMIT:
            raise_exception(
                TimeLimitError,
                "TimeLimit",
                "time limit reached before a feasible selection was found",
                __name__,
            )
        raise_exception(
            InfeasibleInstanceError,
            "Infeasible",
            f"relaxation ended with status {solution.status.value}",
            __name__,
        )
    selected = np.flatnonzero(solution.values[: inst.m] > 0.5)
    status = SolveStatus.OPTIMAL if solution.status == MilpStatus.OPTIMAL else SolveStatus.TIME_LIMIT
    return make_report(
        inst,
        selected,
        method,
        status,
        iterations=1,
        constraints_first=model.n_rows,
        constraints_last=model.n_rows,
        gap_requested=gap,
        bound_final=solution.bound,
        wall_time=deadline.elapsed,
        master_objectives=(solution.objective,),
        angle_schedule=shipped,
        final_model=model,
    )
