"""Pytest fixtures."""

import numpy as np
import pytest

from edp_ocs import feature_toggle
from edp_ocs.instance import EdpInstance, SymMatrix

# Ship the corrected angle schedule and warm starts. These will be overridden
# if the FEATURE_PRINTED_ANGLE_SCHEDULE or FEATURE_WARM_START environment
# variables are set.
feature_toggle.FEATURE_PRINTED_ANGLE_SCHEDULE.set_default(False)
feature_toggle.FEATURE_WARM_START.set_default(True)


@pytest.fixture
def toy_instance():
    """A = I₃, g = (3, 2, 1), N = 2, 2θ = 0.5."""
    return EdpInstance(SymMatrix(np.eye(3)), np.array([3.0, 2.0, 1.0]), 2, 0.5)


@pytest.fixture
def sib_matrix():
    """Relationship matrix of two founders and two full sibs."""
    return SymMatrix(
        np.array(
            [
                [1.0, 0.0, 0.5, 0.5],
                [0.0, 1.0, 0.5, 0.5],
                [0.5, 0.5, 1.0, 0.5],
                [0.5, 0.5, 0.5, 1.0],
            ]
        )
    )


@pytest.fixture
def sib_instance(sib_matrix):
    """Sib family with the cap binding at one founder pair."""
    return EdpInstance(sib_matrix, np.array([1.0, 0.5, 2.0, 1.5]), 2, 0.6)
