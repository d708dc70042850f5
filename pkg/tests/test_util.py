import math
import signal

import pytest

from edp_ocs import util


def test_deadline():
    deadline = util.Deadline(3600)
    assert not deadline.expired()
    assert 0 < deadline.remaining() <= 3600
    assert deadline.elapsed >= 0


def test_deadline_without_limit():
    deadline = util.Deadline()
    assert deadline.remaining() == math.inf
    assert not deadline.expired()


def test_deadline_expired():
    deadline = util.Deadline(0)
    assert deadline.expired()
    assert deadline.remaining() == 0.0


def test_terminate():
    with pytest.raises(SystemExit) as info:
        util.terminate(signal.SIGTERM, None)
    assert info.value.code == 1
