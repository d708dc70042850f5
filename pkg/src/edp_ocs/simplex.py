"""Bounded-variable primal simplex for dense LP relaxations.

Problems are minimisations over

    A x + s = b,    l ≤ x ≤ u,

with one slack s per row. The slack bounds encode the row sense:
``≤`` rows get s ∈ [0, ∞), ``≥`` rows s ∈ (−∞, 0] and ``=`` rows s = 0.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .exceptions import NumericalFailureError, raise_exception
from .solver_logging import get_logger
from .status import BasisStatus, LpStatus, RowSense
from .util import Deadline

LOG = get_logger()

FEASIBILITY_TOLERANCE = 1e-9
OPTIMALITY_TOLERANCE = 1e-9
PIVOT_TOLERANCE = 1e-9
DEGENERATE_STEP = 1e-12
# Consecutive degenerate pivots before switching from Dantzig to Bland pricing.
BLAND_AFTER = 500
REFACTOR_EVERY = 50
SINGULAR_TOLERANCE = 1e-11


@dataclass(frozen=True)
class LpBasis:
    """Basis of a standard form: basic indices and the status of every variable.

    Structural variables come first, followed by one slack per row.
    """

    basic: Tuple[int, ...]
    status: Tuple[BasisStatus, ...]

    def extend(self, n_new_rows: int) -> "LpBasis":
        """Basis for the same problem with rows appended, new slacks basic.

        :param n_new_rows: number of appended rows
        :returns: extended basis
        """
        first = len(self.status)
        new = tuple(range(first, first + n_new_rows))
        return LpBasis(
            self.basic + new, self.status + (BasisStatus.BASIC,) * n_new_rows
        )


@dataclass(frozen=True)
class LpResult:
    """Outcome of an LP solve (minimisation)."""

    status: LpStatus
    x: Optional[np.ndarray]
    objective: float
    basis: Optional[LpBasis]
    pivots: int


class StandardForm:
    """Dense LP data with slack columns appended.

    :param matrix: row coefficients, one row per constraint
    :param rhs: right-hand sides
    :param senses: row senses
    :param cost: objective coefficients of the structural columns (minimised)
    """

    def __init__(
        self,
        matrix: np.ndarray,
        rhs: np.ndarray,
        senses: Sequence[RowSense],
        cost: np.ndarray,
    ):
        matrix = np.asarray(matrix, dtype=float)
        self.n_rows, self.n_columns = matrix.shape
        self.full = np.hstack([matrix, np.eye(self.n_rows)])
        self.rhs = np.asarray(rhs, dtype=float)
        self.cost = np.concatenate([np.asarray(cost, dtype=float), np.zeros(self.n_rows)])
        self.slack_lower = np.array(
            [-np.inf if sense == RowSense.GE else 0.0 for sense in senses]
        )
        self.slack_upper = np.array(
            [np.inf if sense == RowSense.LE else 0.0 for sense in senses]
        )

    @property
    def n_variables(self) -> int:
        """Structural plus slack variable count."""
        return self.n_columns + self.n_rows

    def bounds(self, lower: np.ndarray, upper: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Full bound vectors for the given structural bounds."""
        return (
            np.concatenate([np.asarray(lower, dtype=float), self.slack_lower]),
            np.concatenate([np.asarray(upper, dtype=float), self.slack_upper]),
        )

    def slack_basis(self, lower: np.ndarray, upper: np.ndarray) -> LpBasis:
        """All-slack starting basis, structurals at a finite bound."""
        status = [_nonbasic_status(lo, up) for lo, up in zip(lower, upper)]
        status += [BasisStatus.BASIC] * self.n_rows
        basic = tuple(range(self.n_columns, self.n_variables))
        return LpBasis(basic, tuple(status))


def _nonbasic_status(lower: float, upper: float, hint=BasisStatus.AT_LOWER) -> BasisStatus:
    if hint == BasisStatus.AT_UPPER and np.isfinite(upper):
        return BasisStatus.AT_UPPER
    if np.isfinite(lower):
        return BasisStatus.AT_LOWER
    if np.isfinite(upper):
        return BasisStatus.AT_UPPER
    return BasisStatus.FREE


class _Simplex:
    """Working state of one LP solve."""

    # pylint: disable=too-many-instance-attributes

    def __init__(self, form: StandardForm, lower, upper, deadline: Deadline):
        self.form = form
        self.lower, self.upper = form.bounds(lower, upper)
        self.deadline = deadline
        self.basic = np.zeros(form.n_rows, dtype=int)
        self.status = np.zeros(form.n_variables, dtype=int)
        self.x = np.zeros(form.n_variables)
        self.binv = np.eye(form.n_rows)
        self.pivots = 0
        self.iterations = 0
        self.since_refactor = 0
        self.degenerate_run = 0
        self.cap = 50 * (form.n_variables + form.n_rows) + 10000

    # -------------------------------------------------------------------------
    # Basis handling
    # -------------------------------------------------------------------------

    def load(self, basis: Optional[LpBasis]) -> None:
        """Install a basis, falling back to the slack basis if it is unusable."""
        form = self.form
        if basis is not None and self._valid(basis):
            if self._install(basis):
                return
            LOG.debug("Warm-start basis is singular, using slack basis")
        self._install(form.slack_basis(self.lower[: form.n_columns], self.upper[: form.n_columns]))

    def _valid(self, basis: LpBasis) -> bool:
        form = self.form
        if len(basis.basic) != form.n_rows or len(basis.status) != form.n_variables:
            LOG.debug("Warm-start basis has the wrong shape, ignoring it")
            return False
        return all(basis.status[j] == BasisStatus.BASIC for j in basis.basic)

    def _install(self, basis: LpBasis) -> bool:
        self.basic = np.array(basis.basic, dtype=int)
        status = np.array([int(s) for s in basis.status], dtype=int)
        for j in np.flatnonzero(status != BasisStatus.BASIC):
            status[j] = _nonbasic_status(self.lower[j], self.upper[j], BasisStatus(status[j]))
        self.status = status
        return self._factorize()

    def refactor(self) -> None:
        """Recompute the basis inverse from scratch and the basic values."""
        if not self._factorize():
            raise_exception(
                NumericalFailureError,
                "SingularBasis",
                "basis matrix became singular",
                __name__,
            )

    def _factorize(self) -> bool:
        form = self.form
        if form.n_rows:
            matrix = form.full[:, self.basic]
            lu_piv = scipy.linalg.lu_factor(matrix, check_finite=False)
            diag = np.abs(np.diag(lu_piv[0]))
            if diag.min() <= SINGULAR_TOLERANCE * max(1.0, float(np.abs(matrix).max())):
                return False
            self.binv = scipy.linalg.lu_solve(lu_piv, np.eye(form.n_rows), check_finite=False)
        self.since_refactor = 0
        self._set_nonbasic_values()
        self._recompute_basics()
        return True

    def _set_nonbasic_values(self) -> None:
        at_lower = self.status == BasisStatus.AT_LOWER
        at_upper = self.status == BasisStatus.AT_UPPER
        free = self.status == BasisStatus.FREE
        self.x[at_lower] = self.lower[at_lower]
        self.x[at_upper] = self.upper[at_upper]
        self.x[free] = 0.0

    def _recompute_basics(self) -> None:
        if not self.form.n_rows:
            return
        self.x[self.basic] = 0.0
        residual = self.form.rhs - self.form.full @ self.x
        self.x[self.basic] = self.binv @ residual

    def basis(self) -> LpBasis:
        """Current basis as an immutable object."""
        return LpBasis(
            tuple(int(j) for j in self.basic),
            tuple(BasisStatus(int(s)) for s in self.status),
        )

    # -------------------------------------------------------------------------
    # Iterations
    # -------------------------------------------------------------------------

    def infeasibility(self) -> np.ndarray:
        """Phase-one cost of the basic variables: -1 below, +1 above, 0 inside."""
        values = self.x[self.basic]
        below = values < self.lower[self.basic] - FEASIBILITY_TOLERANCE
        above = values > self.upper[self.basic] + FEASIBILITY_TOLERANCE
        return above.astype(float) - below.astype(float)

    def run(self, phase: int) -> LpStatus:
        """Pivot until the phase terminates.

        :param phase: 1 minimises the sum of infeasibilities, 2 the cost
        :returns: OPTIMAL when the phase objective cannot improve, INFEASIBLE
            when phase one ends with infeasibilities left, UNBOUNDED or
            TIME_LIMIT otherwise
        """
        form = self.form
        while True:
            if self.deadline.expired():
                return LpStatus.TIME_LIMIT
            if phase == 1:
                basic_cost = self.infeasibility()
                if not basic_cost.any():
                    return LpStatus.OPTIMAL
                cost = np.zeros(form.n_variables)
                cost[self.basic] = basic_cost
            else:
                cost = form.cost

            entering = self._price(cost)
            if entering is None:
                return LpStatus.INFEASIBLE if phase == 1 else LpStatus.OPTIMAL
            column, direction = entering
            alpha = self.binv @ form.full[:, column]
            step, row, leave_status = self._ratio(alpha, direction, phase)

            flip = self.upper[column] - self.lower[column]
            if np.isfinite(flip) and flip <= step:
                self._move(column, direction, flip, alpha)
                self.status[column] = (
                    BasisStatus.AT_UPPER if direction > 0 else BasisStatus.AT_LOWER
                )
                self._count(flip)
                continue
            if not np.isfinite(step):
                if phase == 1:
                    raise_exception(
                        NumericalFailureError,
                        "UnboundedPhaseOne",
                        "phase one ray without a blocking variable",
                        __name__,
                    )
                return LpStatus.UNBOUNDED
            self._move(column, direction, step, alpha)
            self._pivot(column, row, leave_status, alpha)
            self._count(step)

    def _price(self, cost: np.ndarray):
        """Pick the entering variable and its direction of motion."""
        form = self.form
        duals = cost[self.basic] @ self.binv if form.n_rows else np.zeros(0)
        reduced = cost - duals @ form.full if form.n_rows else cost.copy()

        increase = (self.status == BasisStatus.AT_LOWER) | (self.status == BasisStatus.FREE)
        decrease = (self.status == BasisStatus.AT_UPPER) | (self.status == BasisStatus.FREE)
        movable = self.upper > self.lower
        score = np.zeros(form.n_variables)
        up = increase & movable & (reduced < -OPTIMALITY_TOLERANCE)
        down = decrease & movable & (reduced > OPTIMALITY_TOLERANCE)
        score[up] = -reduced[up]
        score[down] = reduced[down]
        candidates = np.flatnonzero(score > 0)
        if not candidates.size:
            return None
        if self.degenerate_run >= BLAND_AFTER:
            column = int(candidates[0])
        else:
            column = int(np.argmax(score))
        return column, (1 if up[column] else -1)

    def _ratio(self, alpha: np.ndarray, direction: int, phase: int):
        """Longest step keeping the basic variables within their bounds.

        In phase one a basic variable outside its bounds may move towards
        them and blocks when it reaches the nearer one.
        """
        if not self.form.n_rows:
            return np.inf, None, None
        values = self.x[self.basic]
        lower = self.lower[self.basic]
        upper = self.upper[self.basic]
        delta = -direction * alpha
        limit = np.full(len(values), np.inf)
        leave = np.full(len(values), int(BasisStatus.AT_LOWER))

        below = values < lower - FEASIBILITY_TOLERANCE if phase == 1 else np.zeros(len(values), bool)
        above = values > upper + FEASIBILITY_TOLERANCE if phase == 1 else np.zeros(len(values), bool)
        inside = ~(below | above)
        falling = delta < -PIVOT_TOLERANCE
        rising = delta > PIVOT_TOLERANCE

        with np.errstate(divide="ignore", invalid="ignore"):
            sel = inside & falling & np.isfinite(lower)
            limit[sel] = (values[sel] - lower[sel]) / -delta[sel]
            sel = inside & rising & np.isfinite(upper)
            limit[sel] = (upper[sel] - values[sel]) / delta[sel]
            leave[sel] = int(BasisStatus.AT_UPPER)
            sel = below & rising
            limit[sel] = (lower[sel] - values[sel]) / delta[sel]
            sel = above & falling
            limit[sel] = (upper[sel] - values[sel]) / delta[sel]
            leave[sel] = int(BasisStatus.AT_UPPER)
        limit = np.maximum(limit, 0.0)

        step = float(limit.min())
        if not np.isfinite(step):
            return np.inf, None, None
        ties = np.flatnonzero(limit <= step + DEGENERATE_STEP)
        if self.degenerate_run >= BLAND_AFTER:
            row = int(ties[np.argmin(self.basic[ties])])
        else:
            row = int(ties[np.argmax(np.abs(delta[ties]))])
        return step, row, BasisStatus(int(leave[row]))

    def _move(self, column: int, direction: int, step: float, alpha: np.ndarray) -> None:
        if step == 0.0:
            return
        self.x[column] += direction * step
        if self.form.n_rows:
            self.x[self.basic] -= direction * step * alpha

    def _pivot(self, column: int, row: int, leave_status: BasisStatus, alpha: np.ndarray) -> None:
        leaving = self.basic[row]
        self.status[leaving] = leave_status
        self.x[leaving] = (
            self.lower[leaving] if leave_status == BasisStatus.AT_LOWER else self.upper[leaving]
        )
        self.status[column] = BasisStatus.BASIC
        self.basic[row] = column

        pivot_row = self.binv[row] / alpha[row]
        self.binv -= np.outer(alpha, pivot_row)
        self.binv[row] = pivot_row

        self.pivots += 1
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def _count(self, step: float) -> None:
        self.iterations += 1
        if step <= DEGENERATE_STEP:
            self.degenerate_run += 1
        else:
            self.degenerate_run = 0
        if self.iterations > self.cap:
            raise_exception(
                NumericalFailureError,
                "Cycling",
                f"simplex exceeded the anti-cycling cap after {self.iterations} iterations",
                __name__,
            )


def solve_lp(
    form: StandardForm,
    lower: np.ndarray,
    upper: np.ndarray,
    basis: Optional[LpBasis] = None,
    deadline: Optional[Deadline] = None,
) -> LpResult:
    """Minimise ``form.cost`` over the given structural bounds.

    :param form: problem data
    :param lower: structural lower bounds
    :param upper: structural upper bounds
    :param basis: optional starting basis
    :param deadline: wall-clock budget
    :returns: LP result; ``x`` and ``basis`` are set when status is OPTIMAL
    """
    deadline = deadline or Deadline()
    if np.any(np.asarray(lower) > np.asarray(upper)):
        return LpResult(LpStatus.INFEASIBLE, None, np.inf, None, 0)

    simplex = _Simplex(form, lower, upper, deadline)
    simplex.load(basis)

    status = LpStatus.INFEASIBLE
    for _ in range(3):
        status = simplex.run(1)
        if status != LpStatus.OPTIMAL:
            break
        status = simplex.run(2)
        if status != LpStatus.OPTIMAL:
            break
        # Remove drift from the eta updates before accepting the point.
        simplex.refactor()
        if not simplex.infeasibility().any():
            break
        LOG.debug("Basic values drifted out of bounds, re-entering phase one")

    if status != LpStatus.OPTIMAL:
        if status == LpStatus.INFEASIBLE:
            LOG.debug("LP infeasible after %d pivots", simplex.pivots)
        return LpResult(status, None, np.inf, None, simplex.pivots)

    x = simplex.x[: form.n_columns].copy()
    objective = float(form.cost[: form.n_columns] @ x)
    return LpResult(status, x, objective, simplex.basis(), simplex.pivots)
