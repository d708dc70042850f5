"""Equal-deployment optimal contribution selection."""

from . import release
from .cdm import CdmParams, solve_edp_cdm
from .instance import EdpInstance, load_instance
from .lpp import active_constraint_scan, build_lpp_model, solve_edp_lpp
from .oracle import enumerate_optimum
from .report import SolveReport, write_report
from .status import AngleSchedule, LppVariant, Method, SolveStatus

__version__ = release.VERSION

__all__ = [
    "__version__",
    "AngleSchedule",
    "CdmParams",
    "EdpInstance",
    "LppVariant",
    "Method",
    "SolveReport",
    "SolveStatus",
    "active_constraint_scan",
    "build_lpp_model",
    "enumerate_optimum",
    "load_instance",
    "solve_edp_cdm",
    "solve_edp_lpp",
    "write_report",
]
