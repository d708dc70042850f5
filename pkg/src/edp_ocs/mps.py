"""Fixed-form MPS export of mixed-binary models."""

import math
from typing import Dict, List, Sequence

from .milp import MilpModel
from .solver_logging import get_logger
from .status import ColumnKind, ObjectiveSense, RowSense

LOG = get_logger()

OBJECTIVE_ROW = "obj"
BOUND_SET = "BND"
RHS_SET = "RHS"
NAME_FIELD = 8
NUMBER_FIELD = 12

_ROW_CODES = {RowSense.LE: "L", RowSense.EQ: "E", RowSense.GE: "G"}


def _no_negative_zero(value: float) -> float:
    return 0.0 if value == 0 else value


def _number(value: float) -> str:
    value = _no_negative_zero(value)
    for precision in range(NUMBER_FIELD, 0, -1):
        text = "%.*g" % (precision, value)
        if len(text) <= NUMBER_FIELD:
            return text
    return text


def fits_fixed_form(names: Sequence[str]) -> bool:
    """Whether every name fits a fixed-form name field."""
    return all(0 < len(name) <= NAME_FIELD and not any(c.isspace() for c in name) for name in names)


class _Writer:
    """Line assembly on the fixed-form field columns 2, 5, 15, 25, 40 and 50."""

    def __init__(self):
        self.lines: List[str] = []

    def section(self, header: str) -> None:
        self.lines.append(header)

    def comment(self, text: str) -> None:
        self.lines.append("* " + text)

    def row(self, code: str, name: str) -> None:
        self.lines.append(f" {code:<2} {name}")

    def entry(self, code: str, first: str, second: str = "", value: float = None) -> None:
        text = f" {code:<2} {first:<{NAME_FIELD}}  {second:<{NAME_FIELD}}"
        if value is not None:
            text += f"  {_number(value):>{NUMBER_FIELD}}"
        self.lines.append(text.rstrip())

    def marker(self, index: int, kind: str) -> None:
        self.entry("", f"M{index:07d}", "'MARKER'")
        self.lines[-1] += f"                 '{kind}'"

    def text(self) -> bytes:
        return ("\n".join(self.lines) + "\n").encode("ascii", errors="replace")


def export_mps(model: MilpModel, short_names: bool = False) -> bytes:
    """Write a model in fixed-form MPS.

    MPS minimises, so a maximisation model is written with its objective
    negated and a comment line saying so. Binary columns are enclosed in
    INTORG/INTEND markers and get BV bounds. Names occupy eight-character
    fields; if any column or row name does not fit, or ``short_names`` is
    set, columns and rows are written as C<j>/R<i> and the original names
    are listed in comment lines.

    :param model: model to write
    :param short_names: always replace names by short positional names
    :returns: file contents
    """
    col_names = [column.name for column in model.columns]
    row_names = [row.name for row in model.rows]
    positional = short_names or not fits_fixed_form(col_names + row_names)
    if positional:
        if not short_names:
            LOG.info(
                "Model %s has names longer than %d characters, writing C<j>/R<i>",
                model.name,
                NAME_FIELD,
            )
        col_names = [f"C{j}" for j in range(model.n_columns)]
        row_names = [f"R{i}" for i in range(model.n_rows)]
    out = _Writer()

    out.section(f"NAME          {model.name}")
    sign = 1.0
    if model.sense == ObjectiveSense.MAX:
        sign = -1.0
        out.comment("objective sense MAX, coefficients negated")
    if positional:
        for short, column in zip(col_names, model.columns):
            out.comment(f"{short} {column.name}")
        for short, row in zip(row_names, model.rows):
            out.comment(f"{short} {row.name}")

    out.section("ROWS")
    out.row("N", OBJECTIVE_ROW)
    for name, row in zip(row_names, model.rows):
        out.row(_ROW_CODES[row.sense], name)

    entries: Dict[int, List] = {j: [] for j in range(model.n_columns)}
    for j, column in enumerate(model.columns):
        if column.objective != 0.0:
            entries[j].append((OBJECTIVE_ROW, sign * column.objective))
    for name, row in zip(row_names, model.rows):
        for j, value in row.coefficients:
            entries[j].append((name, value))

    out.section("COLUMNS")
    markers = 0
    in_marker = False
    for j, column in enumerate(model.columns):
        binary = column.kind == ColumnKind.BINARY
        if binary and not in_marker:
            out.marker(markers, "INTORG")
            in_marker = True
        elif not binary and in_marker:
            out.marker(markers, "INTEND")
            markers += 1
            in_marker = False
        for row_name, value in entries[j] or [(OBJECTIVE_ROW, 0.0)]:
            out.entry("", col_names[j], row_name, value)
    if in_marker:
        out.marker(markers, "INTEND")

    out.section("RHS")
    for name, row in zip(row_names, model.rows):
        if row.rhs != 0.0:
            out.entry("", RHS_SET, name, row.rhs)

    if model.n_columns:
        out.section("BOUNDS")
        for name, column in zip(col_names, model.columns):
            _write_bounds(out, name, column.kind, column.lower, column.upper)
    out.section("ENDATA")
    return out.text()


def _write_bounds(out: _Writer, name: str, kind: ColumnKind, lower: float, upper: float) -> None:
    if kind == ColumnKind.BINARY:
        out.entry("BV", BOUND_SET, name)
        return
    if lower == upper:
        out.entry("FX", BOUND_SET, name, lower)
        return
    if math.isinf(lower) and math.isinf(upper):
        out.entry("FR", BOUND_SET, name)
        return
    if math.isinf(lower):
        out.entry("MI", BOUND_SET, name)
    elif lower != 0.0:
        out.entry("LO", BOUND_SET, name, lower)
    if not math.isinf(upper):
        out.entry("UP", BOUND_SET, name, upper)
