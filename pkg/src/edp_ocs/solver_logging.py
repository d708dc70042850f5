"""Standard logging for the selection solvers."""

import contextvars
import logging
import sys
from contextlib import contextmanager
from typing import Iterable, Union

from ska_ser_logging import configure_logging, get_default_formatter

LOGGER_NAME = "edp_ocs"


class TagFilter(logging.Filter):
    """Add the method and transaction tags to every record."""

    # pylint: disable=too-few-public-methods

    method_name = ""
    # Use a context variable to store the transaction ID
    transaction_id = contextvars.ContextVar("transaction_id", default="")

    def filter(self, record: logging.LogRecord) -> bool:
        """
        Attach the tags to the record.

        :param record: log record
        :return: true if record should be logged (always)
        """
        tags = "edp-ocs:" + TagFilter.method_name
        transaction_id = TagFilter.transaction_id.get()
        if transaction_id:
            tags += "," + transaction_id
        record.tags = tags
        return True


def to_python_level(level: Union[int, str]) -> int:
    """Convert a level name or number to a Python log level.

    :param level: level name (case-insensitive) or number
    :returns: Python log level, INFO if the name is unknown
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    return value if isinstance(value, int) else logging.INFO


def set_level(level: Union[int, str]) -> None:
    """
    Set log level after initialisation.

    :param level: level to log
    """
    logging.getLogger().setLevel(to_python_level(level))


def set_method(method_name: str) -> None:
    """
    Set the method tag.

    :param method_name: name of the selection method being run
    """
    TagFilter.method_name = method_name


def set_transaction_id(txn_id: str) -> None:
    """
    Inject transaction id into logging.

    :param txn_id: transaction id
    """
    TagFilter.transaction_id.set(txn_id)


@contextmanager
def log_transaction_id(txn_id):
    """
    Context manager for logging with transaction ID.

    :param txn_id: transaction ID

    """
    set_transaction_id(txn_id)
    try:
        yield
    finally:
        set_transaction_id("")


def get_logger() -> logging.Logger:
    """
    Get a logger instance.

    This always returns the same logger.

    :return: logger
    """
    return logging.getLogger(LOGGER_NAME)


def configure(
    method_name: str = "",
    level: Union[int, str] = logging.INFO,
    handlers: Iterable[logging.Handler] = None,
) -> None:
    """Configure logging for a solver run.

    :param method_name: method tag to stamp on every record
    :param level: level to log. default: INFO
    :param handlers: iterable of extra log handlers to install
    """
    set_method(method_name)
    configure_logging(level=to_python_level(level), tags_filter=TagFilter)
    log = get_logger()
    for handler in list(log.handlers):
        log.removeHandler(handler)

    tag_filter = TagFilter()
    for handler in handlers or []:
        log.debug("add handler %s", handler.__class__.__name__)
        handler.addFilter(tag_filter)
        handler.setFormatter(get_default_formatter(tags=True))
        log.addHandler(handler)

    log.debug("Configured logging for method %s", method_name)


def init_logger(method_name: str = "", verbose: bool = False) -> None:
    """
    Configure logging at program start.

    :param method_name: method tag
    :param verbose: log at DEBUG instead of INFO
    """
    # The tests configure the logger themselves, don't overwrite it!
    if "pytest" in sys.modules:
        set_method(method_name)
        return
    configure(method_name, level=logging.DEBUG if verbose else logging.INFO)
