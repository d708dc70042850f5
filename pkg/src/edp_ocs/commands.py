"""Transaction handling for solve commands."""

import functools
from typing import Callable, Optional

from ska_ser_log_transactions import transaction

from .solver_logging import get_logger, log_transaction_id

LOG = get_logger()


def command_transaction(name: Optional[str] = None):
    """
    Create a decorator for solve commands to add transaction processing.

    The decorated function is called as ``func(config, *args)``; ``config``
    must provide ``as_params()`` returning the JSON-ready parameters that are
    logged with the transaction. Every log line emitted during the call
    carries the transaction ID.

    :param name: transaction name, defaults to the function name

    """

    def _decorator(command_function: Callable):
        @functools.wraps(command_function)
        def wrapper(config, *args, **kwargs):
            txn_name = name or command_function.__name__
            params = config.as_params()

            with transaction(txn_name, params, logger=LOG) as txn_id:
                with log_transaction_id(txn_id):
                    LOG.debug("Execute command %s", txn_name)
                    ret = command_function(config, *args, **kwargs)
            return ret

        return wrapper

    return _decorator
