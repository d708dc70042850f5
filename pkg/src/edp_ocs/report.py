"""Solve reports and their JSON serialization."""

import json
import sys
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

from .exceptions import NumericalFailureError, OutputError, raise_exception
from .instance import EdpInstance, group_coancestry
from .milp import MilpModel
from .solver_logging import get_logger
from .status import AngleSchedule, Method, SolveStatus

LOG = get_logger()

# Slack on the diversity cap when re-checking a reported selection.
COANCESTRY_SLACK = 1e-8


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one selection method on one instance.

    ``selected`` holds 0-based candidate indices in increasing order; the JSON
    report lists 1-based ids.
    """

    # pylint: disable=too-many-instance-attributes

    method: Method
    status: SolveStatus
    objective: float
    coancestry: float
    selected: Tuple[int, ...]
    n_select: int
    two_theta: float
    iterations: int = 1
    cuts_added: int = 0
    constraints_first: int = 0
    constraints_last: int = 0
    gap_requested: Optional[float] = None
    bound_final: Optional[float] = None
    wall_time: float = 0.0
    master_objectives: Tuple[float, ...] = ()
    angle_schedule: Optional[AngleSchedule] = None
    final_model: Optional[MilpModel] = field(default=None, repr=False, compare=False)

    @property
    def n_selected(self) -> int:
        """Number of selected candidates."""
        return len(self.selected)

    @property
    def coancestry_feasible(self) -> bool:
        """True if the selection meets the diversity cap."""
        return self.coancestry <= self.two_theta + COANCESTRY_SLACK

    def to_dict(self) -> dict:
        """JSON-ready dictionary."""
        return {
            "method": self.method.value,
            "objective": self.objective,
            "coancestry": self.coancestry,
            "selected": [i + 1 for i in self.selected],
            "n_selected": self.n_selected,
            "iterations": self.iterations,
            "constraints_first": self.constraints_first,
            "constraints_last": self.constraints_last,
            "cuts_added": self.cuts_added,
            "gap_requested": self.gap_requested,
            "bound_final": self.bound_final,
            "wall_time_sec": self.wall_time,
            "status": self.status.value,
            "two_theta": self.two_theta,
            "coancestry_feasible": self.coancestry_feasible,
            "angle_schedule": self.angle_schedule.value if self.angle_schedule else None,
        }


def make_report(
    inst: EdpInstance,
    selected: Iterable[int],
    method: Method,
    status: SolveStatus,
    **telemetry,
) -> SolveReport:
    """Build a report, computing objective and coancestry from the instance.

    :param inst: instance
    :param selected: 0-based indices of the chosen candidates
    :param method: method that produced the selection
    :param status: outcome
    :param telemetry: remaining SolveReport fields
    :returns: report
    :raises NumericalFailureError: if the selection does not have N members
    """
    chosen = tuple(sorted(int(i) for i in selected))
    if len(chosen) != inst.n_select or len(set(chosen)) != len(chosen):
        raise_exception(
            NumericalFailureError,
            "SelectionSize",
            f"{method.value} selected {len(chosen)} candidates, expected {inst.n_select}",
            __name__,
        )
    objective = float(sum(inst.g[i] for i in chosen)) / inst.n_select
    coancestry = group_coancestry(inst.A, chosen, inst.n_select)
    report = SolveReport(
        method=method,
        status=status,
        objective=objective,
        coancestry=coancestry,
        selected=chosen,
        n_select=inst.n_select,
        two_theta=inst.two_theta,
        **telemetry,
    )
    if not report.coancestry_feasible:
        LOG.warning(
            "Selection from %s has coancestry %.8g above 2θ = %.8g",
            method.value,
            coancestry,
            inst.two_theta,
        )
    return report


def write_report(report: SolveReport, path: str) -> None:
    """Write a report as a JSON object.

    :param report: report
    :param path: output file, or "-" for standard output
    :raises OutputError: if the file cannot be written
    """
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
    except OSError as error:
        raise_exception(OutputError, "OutputError", f"cannot write {path}: {error.strerror}", __name__)
    LOG.info("Report written to %s", path)
