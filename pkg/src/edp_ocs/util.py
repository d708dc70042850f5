"""Utilities."""
import math
import sys
import time

from .solver_logging import get_logger

LOG = get_logger()


def terminate(signame, frame):
    """Signal handler to exit gracefully."""
    # pylint: disable=unused-argument
    LOG.warning("Received signal %s, exiting", signame)
    sys.exit(1)


class Deadline:
    """Wall-clock budget shared by nested solves.

    :param seconds: budget in seconds; ``None`` or infinity means no limit
    """

    def __init__(self, seconds: float = None):
        self._start = time.monotonic()
        self._seconds = math.inf if seconds is None else float(seconds)

    @property
    def elapsed(self) -> float:
        """Seconds since the deadline was created."""
        return time.monotonic() - self._start

    def remaining(self) -> float:
        """Seconds left before the deadline, never negative."""
        return max(0.0, self._seconds - self.elapsed)

    def expired(self) -> bool:
        """True once the budget is used up."""
        return self.elapsed >= self._seconds
