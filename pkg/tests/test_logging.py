import logging
from typing import Iterable

import pytest

from edp_ocs import solver_logging as sl
from edp_ocs.commands import command_transaction
from edp_ocs.exceptions import InputError, raise_input_error

MSG = "Running solver test"


class ListHandler(logging.Handler):
    """A class for list handler."""

    def __init__(self):
        super().__init__()
        self.list = []

    def clear(self) -> None:
        self.list.clear()

    def emit(self, record: logging.LogRecord) -> None:
        msg = self.format(record)
        self.list.append(msg)

    def get_line(self, pos: int):
        return self.list[pos] if self.list else "|||||||"

    def get_tag_from(self, pos: int) -> str:
        return self.get_tag_from_line(self.get_line(pos))

    @staticmethod
    def get_tag_from_line(line: str) -> str:
        return line.split("|")[6]

    def get_last(self) -> str:
        return self.get_line(-1)

    def get_last_tag(self) -> str:
        return self.get_tag_from(-1)

    def text_in_tag(self, text: str, last: int = 1) -> bool:
        sub_list = self.list[-last:]
        is_text_in = False
        for item in sub_list:
            if text in self.get_tag_from_line(item):
                is_text_in = True
                break
        return is_text_in

    def __iter__(self) -> Iterable[str]:
        return self.list.__iter__()


class FakeConfig:
    """Stand-in for a run configuration."""

    def as_params(self) -> dict:
        return {"method": "oracle"}


@pytest.fixture(name="log_list")
def fixture_log_list():
    handler = ListHandler()
    sl.configure("oracle", level=logging.DEBUG, handlers=[handler])
    yield handler
    sl.configure("", level=logging.INFO)


def test_stuff():
    sl.init_logger("cdm")
    sl.init_logger("cdm", verbose=True)
    sl.set_level(logging.DEBUG)
    assert logging.getLogger().level == logging.DEBUG
    sl.set_level("info")
    assert logging.getLogger().level == logging.INFO

    assert sl.to_python_level("DEBUG") == logging.DEBUG
    assert sl.to_python_level("no-such-level") == logging.INFO
    assert sl.to_python_level(logging.WARNING) == logging.WARNING

    log = sl.get_logger()
    assert log is sl.get_logger()
    assert log.name == sl.LOGGER_NAME
    log.info(MSG)


def test_method_tag(log_list):
    sl.get_logger().info(MSG)
    assert MSG in log_list.get_last()
    assert log_list.get_last_tag() == "edp-ocs:oracle"


def test_transaction_id_tag(log_list):
    with sl.log_transaction_id("txn-local-20261018-0001"):
        sl.get_logger().info(MSG)
    assert log_list.text_in_tag("txn-local-20261018-0001")

    sl.get_logger().info(MSG)
    assert not log_list.text_in_tag("txn-local-20261018-0001")


def test_command_transaction(log_list):
    @command_transaction("solve-test")
    def solve_test(config, value):
        sl.get_logger().info(MSG)
        return value * 2

    assert solve_test(FakeConfig(), 21) == 42
    tagged = [line for line in log_list if MSG in line]
    assert tagged
    # Every line inside the transaction carries an ID next to the method tag
    assert "," in log_list.get_tag_from_line(tagged[0])


def test_raise_exception_logs(log_list):
    with pytest.raises(InputError) as info:
        raise_input_error("bad value", "tests")
    assert info.value.reason == "InputError"
    assert info.value.origin == "tests"
    assert any("Description: bad value" in line for line in log_list)
