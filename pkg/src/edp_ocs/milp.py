"""Mixed-binary linear programs and a branch-and-bound solver."""

import functools
import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import raise_model_error
from .feature_toggle import FEATURE_WARM_START
from .simplex import LpBasis, StandardForm, solve_lp
from .solver_logging import get_logger
from .status import ColumnKind, LpStatus, MilpStatus, ObjectiveSense, RowSense
from .util import Deadline

LOG = get_logger()

INTEGRALITY_TOLERANCE = 1e-6
VERIFY_TOLERANCE = 1e-8


class Column(NamedTuple):
    """Model column."""

    name: str
    kind: ColumnKind
    lower: float
    upper: float
    objective: float


class Row(NamedTuple):
    """Linear row ``Σ value·x[index] <sense> rhs``."""

    name: str
    coefficients: Tuple[Tuple[int, float], ...]
    sense: RowSense
    rhs: float


@dataclass(frozen=True)
class MilpModel:
    """Immutable mixed-binary linear program."""

    columns: Tuple[Column, ...]
    rows: Tuple[Row, ...]
    sense: ObjectiveSense = ObjectiveSense.MAX
    name: str = "model"

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(self.rows))
        _check_columns(self.columns)
        _check_rows(self.rows, len(self.columns))

    @property
    def n_columns(self) -> int:
        """Number of columns."""
        return len(self.columns)

    @property
    def n_rows(self) -> int:
        """Number of rows."""
        return len(self.rows)

    @functools.cached_property
    def column_index(self) -> Dict[str, int]:
        """Column position by name."""
        return {column.name: j for j, column in enumerate(self.columns)}

    @functools.cached_property
    def row_index(self) -> Dict[str, int]:
        """Row position by name."""
        return {row.name: i for i, row in enumerate(self.rows)}

    @functools.cached_property
    def matrix(self) -> np.ndarray:
        """Dense row coefficient matrix."""
        dense = np.zeros((self.n_rows, self.n_columns))
        for i, row in enumerate(self.rows):
            for j, value in row.coefficients:
                dense[i, j] = value
        dense.setflags(write=False)
        return dense

    @property
    def binaries(self) -> np.ndarray:
        """Indices of the binary columns."""
        return np.array(
            [j for j, c in enumerate(self.columns) if c.kind == ColumnKind.BINARY],
            dtype=int,
        )

    def objective_vector(self) -> np.ndarray:
        """Objective coefficients."""
        return np.array([column.objective for column in self.columns], dtype=float)


def _check_columns(columns: Sequence[Column]) -> None:
    names = set()
    for column in columns:
        if column.name in names:
            raise_model_error(f"duplicate column name {column.name!r}", __name__)
        names.add(column.name)
        if column.kind == ColumnKind.BINARY and (column.lower, column.upper) != (0, 1):
            raise_model_error(f"binary column {column.name!r} must have bounds [0, 1]", __name__)
        if math.isnan(column.lower) or math.isnan(column.upper) or column.lower > column.upper:
            raise_model_error(f"column {column.name!r} has invalid bounds", __name__)
        if not math.isfinite(column.objective):
            raise_model_error(f"column {column.name!r} has a non-finite objective", __name__)


def _check_rows(rows: Sequence[Row], n_columns: int) -> None:
    names = set()
    for row in rows:
        if row.name in names:
            raise_model_error(f"duplicate row name {row.name!r}", __name__)
        names.add(row.name)
        seen = set()
        for j, value in row.coefficients:
            if not 0 <= j < n_columns:
                raise_model_error(
                    f"row {row.name!r} references unknown column index {j}", __name__
                )
            if j in seen:
                raise_model_error(f"row {row.name!r} repeats column index {j}", __name__)
            seen.add(j)
            if not math.isfinite(value):
                raise_model_error(f"row {row.name!r} has a non-finite coefficient", __name__)
        if not math.isfinite(row.rhs):
            raise_model_error(f"row {row.name!r} has a non-finite rhs", __name__)


Coefficients = Union[Mapping[int, float], Iterable[Tuple[int, float]]]


def make_row(name: str, coefficients: Coefficients, sense: RowSense, rhs: float) -> Row:
    """Build a row, dropping zero coefficients.

    :param name: row name
    :param coefficients: mapping or pairs of column index to value
    :param sense: row sense
    :param rhs: right-hand side
    :returns: row
    """
    items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
    pairs = tuple((int(j), float(v)) for j, v in items if v != 0.0)
    return Row(name, pairs, RowSense(sense), float(rhs))


class ModelBuilder:
    """Mutable helper assembling a MilpModel column by column and row by row."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.columns: List[Column] = []
        self.rows: List[Row] = []

    def add_column(
        self,
        name: str,
        kind: ColumnKind = ColumnKind.CONTINUOUS,
        lower: float = 0.0,
        upper: float = math.inf,
        objective: float = 0.0,
    ) -> int:
        """Append a column.

        :returns: column index
        """
        if kind == ColumnKind.BINARY:
            lower, upper = 0, 1
        self.columns.append(Column(name, kind, lower, upper, float(objective)))
        return len(self.columns) - 1

    def add_row(self, name: str, coefficients: Coefficients, sense: RowSense, rhs: float) -> int:
        """Append a row.

        :returns: row index
        """
        self.rows.append(make_row(name, coefficients, sense, rhs))
        return len(self.rows) - 1

    def extend(self, columns: Iterable[Column], rows: Iterable[Row]) -> None:
        """Append prepared columns and rows."""
        self.columns.extend(columns)
        self.rows.extend(rows)

    def build(self, sense: ObjectiveSense = ObjectiveSense.MAX) -> MilpModel:
        """Freeze the model."""
        return MilpModel(tuple(self.columns), tuple(self.rows), sense, self.name)


def add_rows(model: MilpModel, rows: Iterable[Row]) -> MilpModel:
    """Return a new model with the rows appended after the existing ones.

    :param model: model
    :param rows: rows to append
    :returns: new model
    :raises ModelError: if a row references an unknown column
    """
    rows = tuple(rows)
    if not rows:
        return model
    return MilpModel(model.columns, model.rows + rows, model.sense, model.name)


def row_activity(model: MilpModel, values: np.ndarray) -> np.ndarray:
    """Left-hand sides of every row at a point."""
    return model.matrix @ np.asarray(values, dtype=float)


def row_violation(model: MilpModel, values: np.ndarray) -> np.ndarray:
    """Amount by which each row is violated at a point (0 if satisfied)."""
    activity = row_activity(model, values)
    rhs = np.array([row.rhs for row in model.rows])
    senses = [row.sense for row in model.rows]
    excess = activity - rhs
    violation = np.zeros(model.n_rows)
    for i, sense in enumerate(senses):
        if sense == RowSense.LE:
            violation[i] = max(0.0, excess[i])
        elif sense == RowSense.GE:
            violation[i] = max(0.0, -excess[i])
        else:
            violation[i] = abs(excess[i])
    return violation


# -----------------------------------------------------------------------------
# Branch and bound
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class MilpSolution:
    """Outcome of a mixed-binary solve.

    ``objective`` and ``bound`` are in the model's own sense. ``basis`` is the
    optimal basis of the root relaxation and can seed a later solve of the
    same model with rows appended.
    """

    # pylint: disable=too-many-instance-attributes

    status: MilpStatus
    values: Optional[np.ndarray]
    objective: float
    bound: float
    gap: float
    nodes: int
    basis: Optional[LpBasis] = None
    bound_history: Tuple[float, ...] = ()
    lp_pivots: int = 0

    def value(self, model: MilpModel, name: str) -> float:
        """Value of a named column."""
        return float(self.values[model.column_index[name]])


class _Node(NamedTuple):
    lower: np.ndarray
    upper: np.ndarray
    basis: Optional[LpBasis]
    depth: int


def relative_gap(incumbent: float, bound: float) -> float:
    """(bound − incumbent)/max(1, |incumbent|) for a minimisation bound."""
    return (incumbent - bound) / max(1.0, abs(incumbent))


class _BranchAndBound:
    """Best-bound search over the binary columns of one model."""

    # pylint: disable=too-many-instance-attributes

    def __init__(self, model: MilpModel, gap: float, deadline: Deadline):
        self.model = model
        self.gap = gap
        self.deadline = deadline
        self.sign = -1.0 if model.sense == ObjectiveSense.MAX else 1.0
        rhs = np.array([row.rhs for row in model.rows], dtype=float)
        senses = [row.sense for row in model.rows]
        self.form = StandardForm(model.matrix, rhs, senses, self.sign * model.objective_vector())
        self.lower = np.array([c.lower for c in model.columns], dtype=float)
        self.upper = np.array([c.upper for c in model.columns], dtype=float)
        self.binaries = model.binaries
        self.incumbent: Optional[np.ndarray] = None
        self.incumbent_value = math.inf
        self.nodes = 0
        self.pivots = 0
        self.history: List[float] = []
        self.heap: List[Tuple[float, int, _Node]] = []
        self.counter = itertools.count()
        self.root_basis: Optional[LpBasis] = None

    def to_model_sense(self, value: float) -> float:
        """Convert an internal minimisation value to the model's sense."""
        return self.sign * value

    def global_bound(self) -> float:
        """Smallest bound over the open nodes and the incumbent."""
        bound = self.heap[0][0] if self.heap else math.inf
        return min(bound, self.incumbent_value)

    def gap_closed(self) -> bool:
        """True when the incumbent is proven within the requested gap."""
        if self.incumbent is None:
            return False
        return relative_gap(self.incumbent_value, self.global_bound()) <= self.gap

    def _record_bound(self) -> None:
        bound = self.global_bound()
        if self.history:
            # Clip LP round-off so the reported bound never loosens.
            bound = max(bound, self.history[-1])
        self.history.append(bound)

    def push(self, bound: float, node: _Node) -> None:
        """Queue a node keyed by its parent's relaxation value."""
        heapq.heappush(self.heap, (bound, next(self.counter), node))

    def run(self, warm_start: Optional[LpBasis]) -> MilpStatus:
        """Search until the gap closes, the tree is exhausted or time runs out."""
        self.push(-math.inf, _Node(self.lower, self.upper, warm_start, 0))
        while self.heap:
            if self.gap_closed():
                break
            if self.deadline.expired():
                LOG.info("Time limit reached after %d nodes", self.nodes)
                return MilpStatus.TIME_LIMIT
            _, _, node = heapq.heappop(self.heap)
            status = self.process(node)
            self._record_bound()
            if status == LpStatus.UNBOUNDED:
                return MilpStatus.UNBOUNDED
            if status == LpStatus.TIME_LIMIT:
                return MilpStatus.TIME_LIMIT
        return MilpStatus.OPTIMAL if self.incumbent is not None else MilpStatus.INFEASIBLE

    def process(self, node: _Node) -> LpStatus:
        """Solve one node relaxation and branch or update the incumbent."""
        result = solve_lp(self.form, node.lower, node.upper, node.basis, self.deadline)
        self.nodes += 1
        self.pivots += result.pivots
        if self.nodes == 1:
            self.root_basis = result.basis
        if result.status != LpStatus.OPTIMAL:
            return result.status
        tolerance = max(self.gap, 1e-9) * max(1.0, abs(self.incumbent_value))
        if self.incumbent is not None and result.objective >= self.incumbent_value - tolerance:
            return result.status

        x = result.x
        frac = np.abs(x[self.binaries] - np.round(x[self.binaries]))
        if not frac.size or frac.max() <= INTEGRALITY_TOLERANCE:
            self._accept(x, node, result.basis)
            return result.status

        # Most fractional binary, lowest index on ties.
        distance = np.minimum(x[self.binaries] % 1.0, 1.0 - x[self.binaries] % 1.0)
        column = int(self.binaries[int(np.argmax(distance))])
        basis = result.basis if FEATURE_WARM_START.is_active() else None
        for value in (0.0, 1.0):
            lower, upper = node.lower.copy(), node.upper.copy()
            lower[column] = upper[column] = value
            self.push(result.objective, _Node(lower, upper, basis, node.depth + 1))
        LOG.debug(
            "Node %d depth %d: branch on column %s (value %.6g), bound %.10g",
            self.nodes,
            node.depth,
            self.model.columns[column].name,
            x[column],
            self.to_model_sense(result.objective),
        )
        return result.status

    def _accept(self, x: np.ndarray, node: _Node, basis: Optional[LpBasis]) -> None:
        """Round the binaries and keep the point if it is still feasible."""
        candidate = x.copy()
        candidate[self.binaries] = np.round(candidate[self.binaries])
        if not self._feasible(candidate):
            lower, upper = node.lower.copy(), node.upper.copy()
            lower[self.binaries] = upper[self.binaries] = candidate[self.binaries]
            fixed = solve_lp(self.form, lower, upper, basis, self.deadline)
            self.pivots += fixed.pivots
            if fixed.status != LpStatus.OPTIMAL:
                LOG.debug("Rounded point rejected at node %d", self.nodes)
                return
            candidate = fixed.x
            candidate[self.binaries] = np.round(candidate[self.binaries])
            if not self._feasible(candidate):
                LOG.debug("Rounded point rejected at node %d", self.nodes)
                return
        value = float(self.form.cost[: self.form.n_columns] @ candidate)
        if value < self.incumbent_value:
            self.incumbent = candidate
            self.incumbent_value = value
            LOG.debug(
                "New incumbent %.10g at node %d", self.to_model_sense(value), self.nodes
            )

    def _feasible(self, values: np.ndarray) -> bool:
        if np.any(values < self.lower - VERIFY_TOLERANCE) or np.any(
            values > self.upper + VERIFY_TOLERANCE
        ):
            return False
        return not self.model.n_rows or row_violation(self.model, values).max() <= VERIFY_TOLERANCE


def solve(
    model: MilpModel,
    gap: float = 0.0,
    time_limit: Optional[float] = None,
    warm_start: Optional[LpBasis] = None,
    deadline: Optional[Deadline] = None,
) -> MilpSolution:
    """Solve a mixed-binary model by LP-based branch and bound.

    Nodes are explored best bound first; the most fractional binary is
    branched on. The search stops once the incumbent is within ``gap`` of the
    best bound, relative to max(1, |incumbent|).

    :param model: model to solve
    :param gap: relative optimality gap
    :param time_limit: seconds
    :param warm_start: optional basis for the root relaxation
    :param deadline: shared wall-clock budget, overrides ``time_limit``
    :returns: solution; on TIME_LIMIT it carries the incumbent if one exists
    """
    if gap < 0:
        raise_model_error(f"gap must be nonnegative, got {gap}", __name__)
    deadline = deadline or Deadline(time_limit)
    if not FEATURE_WARM_START.is_active():
        warm_start = None
    search = _BranchAndBound(model, gap, deadline)
    status = search.run(warm_start)

    if search.incumbent is None:
        bound = search.to_model_sense(search.global_bound()) if search.heap else math.nan
        LOG.info("No feasible point found: %s after %d nodes", status.value, search.nodes)
        return MilpSolution(
            status, None, math.nan, bound, math.inf, search.nodes,
            search.root_basis, tuple(map(search.to_model_sense, search.history)), search.pivots,
        )

    bound_min = search.global_bound()
    objective = search.to_model_sense(search.incumbent_value)
    achieved = max(0.0, relative_gap(search.incumbent_value, bound_min))
    LOG.debug(
        "Branch and bound %s: objective %.10g bound %.10g gap %.3g nodes %d",
        status.value,
        objective,
        search.to_model_sense(bound_min),
        achieved,
        search.nodes,
    )
    return MilpSolution(
        status,
        search.incumbent,
        objective,
        search.to_model_sense(bound_min),
        achieved,
        search.nodes,
        search.root_basis,
        tuple(map(search.to_model_sense, search.history)),
        search.pivots,
    )
