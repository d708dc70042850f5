"""Command-line entry point: load an instance, solve it and write a report."""

import argparse
import dataclasses
import math
import pathlib
import signal
import sys
from typing import Dict, List, Optional

from . import release
from .cdm import CdmParams, solve_edp_cdm
from .commands import command_transaction
from .exceptions import (
    GuardExceededError,
    InfeasibleInstanceError,
    InputError,
    OcsError,
    OutputError,
    TimeLimitError,
    raise_exception,
    raise_input_error,
)
from .instance import EdpInstance, load_instance
from .lpp import solve_edp_lpp
from .mps import export_mps
from .oracle import enumerate_optimum
from .report import SolveReport, write_report
from .solver_logging import get_logger, init_logger
from .status import EXIT_CODES, EXIT_INPUT_ERROR, AngleSchedule, LppVariant, Method, SolveStatus
from .util import terminate
from .validation import validate_run_config

LOG = get_logger()

DEFAULT_GAP = 0.01
DEFAULT_DELTA = 1e-8
DEFAULT_TIME_LIMIT = 10800.0
# Documented in the help text; never applied implicitly.
RECOMMENDED_EPSILON = 0.005

_LPP_METHODS = (Method.LPP, Method.LPP_ACSM)
_REQUIRED = {"method": "--method", "n_select": "--N", "two_theta": "--two-theta"}
_PATH_KEYS = ("pedigree", "matrix", "ebv", "export_mps", "output")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs.

    Input is either a pedigree CSV (optionally with an EBV file overriding its
    breeding values) or a relationship matrix with an EBV file.
    """

    # pylint: disable=too-many-instance-attributes

    method: Method
    n_select: int
    two_theta: float
    pedigree: Optional[str] = None
    matrix: Optional[str] = None
    ebv: Optional[str] = None
    gap: float = DEFAULT_GAP
    delta: float = DEFAULT_DELTA
    epsilon: Optional[float] = None
    time_limit: float = DEFAULT_TIME_LIMIT
    seed: Optional[int] = None
    export_mps: Optional[str] = None
    output: str = "-"
    log_base: float = math.e
    angle_schedule: Optional[AngleSchedule] = None
    verbose: bool = False

    def __post_init__(self):
        if (self.pedigree is None) == (self.matrix is None):
            raise_input_error("give exactly one of --pedigree or --matrix", __name__)
        if self.matrix is not None and self.ebv is None:
            raise_input_error("--matrix needs --ebv", __name__)
        if self.method in _LPP_METHODS and self.epsilon is None:
            raise_input_error(
                f"--epsilon is required for method {self.method.value} "
                f"(typical value {RECOMMENDED_EPSILON})",
                __name__,
            )
        if self.epsilon is not None and not self.epsilon > 0:
            raise_input_error(f"epsilon must be positive, got {self.epsilon}", __name__)
        if not self.gap >= 0:
            raise_input_error(f"gap must be nonnegative, got {self.gap}", __name__)
        if not self.delta >= 0:
            raise_input_error(f"delta must be nonnegative, got {self.delta}", __name__)
        if not self.time_limit > 0:
            raise_input_error(f"time limit must be positive, got {self.time_limit}", __name__)
        if not self.log_base > 1:
            raise_input_error(f"logarithm base must exceed 1, got {self.log_base}", __name__)

    def as_params(self) -> Dict:
        """JSON-ready parameters, logged with the transaction."""
        params = dataclasses.asdict(self)
        params["method"] = self.method.value
        params["angle_schedule"] = self.angle_schedule.value if self.angle_schedule else None
        return params


# -----------------------------------------------------------------------------
# Argument parsing
# -----------------------------------------------------------------------------


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser raising InputError instead of exiting on usage errors."""

    def error(self, message):
        raise_input_error(f"usage error: {message}", __name__)


def make_parser() -> ArgumentParser:
    """Command-line parser."""
    parser = ArgumentParser(
        prog="edp-ocs",
        description="Equal-deployment optimal contribution selection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {release.VERSION}")
    inputs = parser.add_argument_group("instance")
    inputs.add_argument("--pedigree", help="pedigree CSV with header id,sire,dam,ebv")
    inputs.add_argument("--matrix", help="relationship matrix file")
    inputs.add_argument("--ebv", help="breeding value file, one value per line")
    inputs.add_argument("--N", dest="n_select", type=int, help="number of candidates to select")
    inputs.add_argument("--two-theta", dest="two_theta", type=float, help="diversity cap 2θ")

    solver = parser.add_argument_group("solver")
    solver.add_argument("--method", choices=[m.value for m in Method], help="selection method")
    solver.add_argument("--gap", type=float, help=f"relative MILP gap (default {DEFAULT_GAP})")
    solver.add_argument(
        "--delta", type=float, help=f"CDM stall threshold (default {DEFAULT_DELTA})"
    )
    solver.add_argument(
        "--epsilon",
        type=float,
        help=f"LPP accuracy, required for lpp and lpp-acsm (e.g. {RECOMMENDED_EPSILON})",
    )
    solver.add_argument(
        "--time-limit",
        dest="time_limit",
        type=float,
        help=f"seconds (default {DEFAULT_TIME_LIMIT:g})",
    )
    solver.add_argument("--seed", type=int, help="seed recorded with the run")
    solver.add_argument(
        "--log-base", dest="log_base", type=float, help="logarithm base of the LPP depth formula"
    )
    solver.add_argument(
        "--angle-schedule",
        dest="angle_schedule",
        choices=[s.value for s in AngleSchedule],
        help="rotation angle schedule of the LPP cells",
    )

    output = parser.add_argument_group("output")
    output.add_argument("--output", "-o", help='JSON report path, "-" for stdout (default)')
    output.add_argument("--export-mps", dest="export_mps", help="write the final model as MPS")
    output.add_argument("--config", help="JSON run configuration; flags override it")
    output.add_argument("--verbose", "-v", action="store_true", default=None, help="debug logs")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Build a run configuration from flags and an optional JSON file.

    :param argv: arguments without the program name
    :returns: validated configuration
    :raises InputError: on usage or validation errors
    """
    args = vars(make_parser().parse_args(argv))
    values: Dict = {}
    config_path = args.pop("config")
    if config_path is not None:
        try:
            text = pathlib.Path(config_path).read_text(encoding="utf-8")
        except OSError as error:
            raise_input_error(f"cannot read {config_path}: {error.strerror}", __name__)
        values.update(_relative_to(validate_run_config(text), pathlib.Path(config_path).parent))
        if "N" in values:
            values["n_select"] = values.pop("N")
    values.update({key: value for key, value in args.items() if value is not None})

    missing = [flag for key, flag in _REQUIRED.items() if key not in values]
    if missing:
        raise_input_error(f"missing required option(s): {', '.join(missing)}", __name__)
    values["method"] = Method(values["method"])
    if values.get("angle_schedule") is not None:
        values["angle_schedule"] = AngleSchedule(values["angle_schedule"])
    for key in ("two_theta", "gap", "delta", "epsilon", "time_limit", "log_base"):
        if values.get(key) is not None:
            values[key] = float(values[key])
    return RunConfig(**values)


def _relative_to(values: Dict, base: pathlib.Path) -> Dict:
    """Resolve relative paths of a configuration file against its directory."""
    for key in _PATH_KEYS:
        path = values.get(key)
        if path is not None and path != "-" and not pathlib.Path(path).is_absolute():
            values[key] = str(base / path)
    return values


# -----------------------------------------------------------------------------
# Solve commands
# -----------------------------------------------------------------------------


@command_transaction("solve-cdm")
def _solve_cdm(config: RunConfig, inst: EdpInstance) -> SolveReport:
    params = CdmParams(delta=config.delta, gap=config.gap, time_limit=config.time_limit)
    return solve_edp_cdm(inst, params)


@command_transaction("solve-lpp")
def _solve_lpp(config: RunConfig, inst: EdpInstance) -> SolveReport:
    variant = LppVariant.ACSM if config.method == Method.LPP_ACSM else LppVariant.PLAIN
    return solve_edp_lpp(
        inst,
        config.epsilon,
        variant,
        gap=config.gap,
        time_limit=config.time_limit,
        schedule=config.angle_schedule,
        log_base=config.log_base,
    )


@command_transaction("solve-oracle")
def _solve_oracle(config: RunConfig, inst: EdpInstance) -> SolveReport:
    # pylint: disable=unused-argument
    return enumerate_optimum(inst)


_COMMANDS = {
    Method.CDM: _solve_cdm,
    Method.LPP: _solve_lpp,
    Method.LPP_ACSM: _solve_lpp,
    Method.ORACLE: _solve_oracle,
}


def _export(report: SolveReport, path: str) -> None:
    if report.final_model is None:
        LOG.warning("Method %s builds no model, nothing exported to %s", report.method.value, path)
        return
    try:
        pathlib.Path(path).write_bytes(export_mps(report.final_model))
    except OSError as error:
        raise_exception(OutputError, "OutputError", f"cannot write {path}: {error.strerror}", __name__)
    LOG.info("Model %s written to %s", report.final_model.name, path)


def run(config: RunConfig) -> int:
    """Solve one instance and write its report.

    :param config: run configuration
    :returns: exit code: 0 optimal, 1 input error, 2 infeasible, 3 time limit
        or stall
    """
    init_logger(config.method.value, config.verbose)
    if config.seed is not None:
        LOG.info("Seed %d", config.seed)
    try:
        inst = load_instance(
            config.n_select,
            config.two_theta,
            pedigree=config.pedigree,
            matrix=config.matrix,
            ebv=config.ebv,
        )
        report = _COMMANDS[config.method](config, inst)
        if config.export_mps:
            _export(report, config.export_mps)
        write_report(report, config.output)
    except (InputError, GuardExceededError, OutputError) as error:
        LOG.error("%s", error.desc)
        return EXIT_INPUT_ERROR
    except InfeasibleInstanceError as error:
        LOG.error("%s", error.desc)
        return EXIT_CODES[SolveStatus.INFEASIBLE]
    except TimeLimitError as error:
        LOG.error("%s", error.desc)
        return EXIT_CODES[SolveStatus.TIME_LIMIT]
    except OcsError as error:
        LOG.error("Solve failed: %s", error.desc)
        return EXIT_INPUT_ERROR

    LOG.info(
        "%s: status %s, objective %.10g, coancestry %.10g",
        config.method.value,
        report.status.value,
        report.objective,
        report.coancestry,
    )
    return EXIT_CODES[report.status]


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command-line tool."""
    # Register SIGTERM handler
    signal.signal(signal.SIGTERM, terminate)
    try:
        config = parse_config(argv)
    except InputError:
        return EXIT_INPUT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
