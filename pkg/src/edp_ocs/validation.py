"""Run configuration validation and parsing."""

import json
from typing import Dict, Optional, Tuple

from schema import And, Optional as Opt, Or, Schema, SchemaError

from .exceptions import raise_input_error
from .solver_logging import get_logger
from .status import AngleSchedule, Method

LOG = get_logger()

MSG_VALIDATION_FAILED = "Configuration validation failed"

RUN_PREFIX = "edp-ocs-run/"
SCHEMA_VERSION_0_1 = "0.1"
SCHEMA_VERSION_DEFAULT = SCHEMA_VERSION_0_1
SCHEMA_VERSION_ALLOWED = (SCHEMA_VERSION_0_1,)


def _not_bool(value) -> bool:
    return not isinstance(value, bool)


# bool is an int subclass; only "verbose" takes booleans
INTEGER = And(int, _not_bool, error="{} is not an integer")
NUMBER = And(Or(int, float), _not_bool, error="{} is not a number")

RUN_SCHEMA = Schema(
    {
        Opt("interface"): str,
        Opt("pedigree"): str,
        Opt("matrix"): str,
        Opt("ebv"): str,
        Opt("N"): INTEGER,
        Opt("two_theta"): NUMBER,
        Opt("method"): Or(*(m.value for m in Method)),
        Opt("gap"): NUMBER,
        Opt("delta"): NUMBER,
        Opt("epsilon"): NUMBER,
        Opt("time_limit"): NUMBER,
        Opt("seed"): INTEGER,
        Opt("export_mps"): str,
        Opt("output"): str,
        Opt("log_base"): NUMBER,
        Opt("angle_schedule"): Or(*(s.value for s in AngleSchedule)),
        Opt("verbose"): bool,
    },
    name="run configuration",
)


def validate_run_config(config_str: str) -> Dict:
    """
    Validate a JSON run configuration.

    :param config_str: configuration string in JSON format
    :returns: configuration dictionary without the interface key
    :raises InputError: if validation fails
    """
    _, config = validate_json_config(
        config_str, RUN_PREFIX, SCHEMA_VERSION_DEFAULT, SCHEMA_VERSION_ALLOWED
    )
    if config is None:
        # Validation has failed, so raise an error
        raise_input_error(MSG_VALIDATION_FAILED, __name__)
    config.pop("interface", None)
    return config


def validate_json_config(
    config_str: str,
    prefix: str,
    default: str,
    allowed: Tuple[str, ...],
    schema: Schema = RUN_SCHEMA,
) -> Tuple[Optional[str], Optional[Dict]]:
    """
    Validate a JSON configuration string against a schema.

    :param config_str: JSON configuration string
    :param prefix: interface prefix
    :param default: default version of the interface
    :param allowed: allowed versions of the interface
    :param schema: schema the configuration must match
    :returns: version and validated configuration, or both are set to None if
        validation fails

    """
    try:
        config = json.loads(config_str)
        config = schema.validate(config)
        version = _interface_version(config.get("interface", prefix + default), prefix)
    except json.JSONDecodeError as error:
        LOG.error("Unable to decode configuration string as JSON: %s", error.msg)
        version, config = None, None
    except (SchemaError, ValueError) as error:
        LOG.error("Unable to validate JSON configuration: %s", str(error))
        version, config = None, None

    if config is not None and version not in allowed:
        LOG.error("Interface version is not allowed: %s", version)
        version, config = None, None

    if config is not None:
        LOG.debug("Successfully validated JSON configuration")

    return version, config


def _interface_version(interface: str, prefix: str) -> str:
    if not interface.startswith(prefix):
        raise ValueError(f"interface {interface!r} does not start with {prefix!r}")
    return interface[len(prefix) :]
