"""Command-line tests."""

import json
import pathlib

import pytest
from pytest_bdd import given, parsers, scenarios, then, when

from edp_ocs import cli
from edp_ocs.exceptions import InputError
from edp_ocs.status import AngleSchedule, Method

DATA = pathlib.Path(__file__).parent / "data"

# -------------------------------
# Get scenarios from feature file
# -------------------------------

scenarios("features/cli.feature")


@pytest.fixture(name="run_paths")
def fixture_run_paths(tmp_path):
    """Report and model paths of one run."""
    return {"report": tmp_path / "report.json", "model": tmp_path / "model.mps"}


# -----------
# Given steps
# -----------


@given(parsers.parse('the run options "{options}"'), target_fixture="argv")
def run_options(options, run_paths):
    """
    Command-line arguments, with data file names resolved.

    :param options: space-separated options
    :param run_paths: output paths

    """
    argv = [str(DATA / token) if (DATA / token).is_file() else token for token in options.split()]
    return argv + ["--output", str(run_paths["report"])]


@given("the final model is exported")
def export_model(argv, run_paths):
    """Ask for the final model in MPS format."""
    argv.extend(["--export-mps", str(run_paths["model"])])


# ----------
# When steps
# ----------


@when("I run the solver", target_fixture="exit_code")
def run_solver(argv):
    """Run the command-line tool."""
    return cli.main(argv)


# ----------
# Then steps
# ----------


def read_report(run_paths):
    return json.loads(run_paths["report"].read_text(encoding="utf-8"))


@then(parsers.parse("the exit code is {code:d}"))
def check_exit_code(exit_code, code):
    assert exit_code == code


@then(parsers.parse("the report objective is {value:g}"))
def check_objective(run_paths, value):
    assert read_report(run_paths)["objective"] == pytest.approx(value)


@then(parsers.parse("the report selects {ids}"))
def check_selected(run_paths, ids):
    assert read_report(run_paths)["selected"] == [int(i) for i in ids.split(",")]


@then(parsers.parse("the report status is {status}"))
def check_status(run_paths, status):
    assert read_report(run_paths)["status"] == status


@then(parsers.parse("the report method is {method}"))
def check_method(run_paths, method):
    assert read_report(run_paths)["method"] == method


@then(parsers.parse("the report angle schedule is {schedule}"))
def check_schedule(run_paths, schedule):
    assert read_report(run_paths)["angle_schedule"] == schedule


@then("the report is within the cap")
def check_cap(run_paths):
    report = read_report(run_paths)
    assert report["coancestry_feasible"]
    assert report["coancestry"] <= report["two_theta"] + 1e-8


@then("no report is written")
def check_no_report(run_paths):
    assert not run_paths["report"].exists()


@then(parsers.parse("the exported model is named {name}"))
def check_exported(run_paths, name):
    text = run_paths["model"].read_text(encoding="ascii")
    assert text.split()[:2] == ["NAME", name]
    assert text.rstrip().endswith("ENDATA")


# -----------------
# Option parsing
# -----------------


def test_parse_config_defaults():
    config = cli.parse_config(
        ["--matrix", "a.txt", "--ebv", "g.txt", "--N", "3", "--two-theta", "0.5", "--method", "cdm"]
    )
    assert config.method == Method.CDM
    assert config.n_select == 3
    assert config.gap == cli.DEFAULT_GAP
    assert config.delta == cli.DEFAULT_DELTA
    assert config.time_limit == cli.DEFAULT_TIME_LIMIT
    assert config.epsilon is None
    assert config.output == "-"


def test_parse_config_file_paths_are_relative_to_file():
    config = cli.parse_config(["--config", str(DATA / "run_oracle.json"), "--gap", "0"])
    assert config.matrix == str(DATA / "toy_matrix.txt")
    assert config.n_select == 2
    assert config.two_theta == 0.6
    assert config.gap == 0.0


@pytest.mark.parametrize(
    "argv",
    [
        ["--N", "2", "--two-theta", "0.5", "--method", "oracle"],
        ["--matrix", "a", "--pedigree", "p", "--N", "2", "--two-theta", "0.5", "--method", "cdm"],
        ["--matrix", "a", "--N", "2", "--two-theta", "0.5", "--method", "cdm"],
        ["--pedigree", "p", "--N", "2", "--two-theta", "0.5", "--method", "lpp-acsm"],
        ["--pedigree", "p", "--N", "2", "--method", "cdm"],
        ["--pedigree", "p", "--N", "2", "--two-theta", "0.5", "--method", "simplex"],
        ["--pedigree", "p", "--N", "2", "--two-theta", "0.5", "--method", "cdm", "--gap", "-1"],
    ],
)
def test_parse_config_rejects(argv):
    with pytest.raises(InputError):
        cli.parse_config(argv)


def test_angle_schedule_option():
    config = cli.parse_config(
        [
            "--pedigree", "p", "--N", "2", "--two-theta", "0.5", "--method", "lpp",
            "--epsilon", "0.01", "--angle-schedule", "printed",
        ]
    )
    assert config.angle_schedule == AngleSchedule.PRINTED
    assert config.as_params()["angle_schedule"] == "printed"
    assert config.as_params()["method"] == "lpp"


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert "0.1.0" in capsys.readouterr().out
