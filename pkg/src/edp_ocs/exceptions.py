"""Solver exceptions."""

from .solver_logging import get_logger

LOG = get_logger()


class OcsError(Exception):
    """Base class of all errors raised by the package.

    :param reason: short machine-readable reason
    :param desc: human-readable description
    :param origin: where the error was raised
    """

    def __init__(self, reason: str, desc: str, origin: str = ""):
        super().__init__(desc)
        self.reason = reason
        self.desc = desc
        self.origin = origin


class InputError(OcsError):
    """Malformed input file, configuration or argument."""


class DimensionMismatchError(InputError):
    """Array lengths do not agree."""


class NotPositiveDefiniteError(InputError):
    """A matrix expected to be positive definite is not."""


class ModelError(OcsError):
    """Malformed linear model."""


class InfeasibleInstanceError(OcsError):
    """No selection satisfies the diversity cap."""


class NumericalFailureError(OcsError):
    """The simplex method could not make progress."""


class GuardExceededError(OcsError):
    """A brute-force computation would be too large."""


class CutError(OcsError):
    """A cut cannot be generated from the given points."""


class ScanError(OcsError):
    """An active-constraint scan could not solve one of its models."""


class TimeLimitError(OcsError):
    """The time limit ran out before any selection was found."""


class OutputError(OcsError):
    """A result file could not be written."""


def raise_exception(exc_class, reason, desc, origin):
    """Log an error and raise it.

    :param exc_class: subclass of OcsError to raise
    :param reason: Reason for the error.
    :param desc: Error description.
    :param origin: Error origin.

    """
    LOG.error("Raising %s exception...", exc_class.__name__)
    LOG.error("Reason: %s", reason)
    LOG.error("Description: %s", desc)
    LOG.error("Origin: %s", origin)
    raise exc_class(reason, desc, origin)


def raise_input_error(desc, origin):
    """Raise an input error.

    :param desc: Error description.
    :param origin: Error origin.

    """
    raise_exception(InputError, "InputError", desc, origin)


def raise_dimension_mismatch(desc, origin):
    """Raise a dimension-mismatch error.

    :param desc: Error description.
    :param origin: Error origin.

    """
    raise_exception(DimensionMismatchError, "DimensionMismatch", desc, origin)


def raise_model_error(desc, origin):
    """Raise a model error.

    :param desc: Error description.
    :param origin: Error origin.

    """
    raise_exception(ModelError, "ModelError", desc, origin)
