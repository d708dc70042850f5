"""Enumerated values shared across the solvers."""

import enum


@enum.unique
class ColumnKind(enum.Enum):
    """Kind of a model column."""

    BINARY = "binary"
    CONTINUOUS = "continuous"


@enum.unique
class RowSense(enum.Enum):
    """Sense of a linear row."""

    LE = "<="
    EQ = "="
    GE = ">="


@enum.unique
class ObjectiveSense(enum.Enum):
    """Direction of optimisation."""

    MAX = "max"
    MIN = "min"


@enum.unique
class MilpStatus(enum.Enum):
    """Outcome of a mixed-binary solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIME_LIMIT = "time_limit"


@enum.unique
class LpStatus(enum.Enum):
    """Outcome of a single LP relaxation."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    TIME_LIMIT = "time_limit"


@enum.unique
class SolveStatus(enum.Enum):
    """Outcome of a selection method, as written to the report."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIME_LIMIT = "time_limit"
    STALLED = "stalled"


@enum.unique
class Method(enum.Enum):
    """Selection method."""

    CDM = "cdm"
    LPP = "lpp"
    LPP_ACSM = "lpp-acsm"
    ORACLE = "oracle"


@enum.unique
class LppVariant(enum.Enum):
    """Variant of the lifted polyhedral model."""

    PLAIN = "plain"
    ACSM = "acsm"


@enum.unique
class AngleSchedule(enum.Enum):
    """Rotation angle schedule of a polyhedral cell."""

    CORRECTED = "corrected"
    PRINTED = "printed"


@enum.unique
class BasisStatus(enum.IntEnum):
    """Status of a variable with respect to an LP basis."""

    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3


# Process exit codes of the command-line tool.
EXIT_CODES = {
    SolveStatus.OPTIMAL: 0,
    SolveStatus.INFEASIBLE: 2,
    SolveStatus.TIME_LIMIT: 3,
    SolveStatus.STALLED: 3,
}
EXIT_INPUT_ERROR = 1
