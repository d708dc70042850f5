"""Feature toggle."""

import os


class FeatureToggle:
    """Feature toggle class.

    A toggle named ``warm_start`` is controlled by the environment variable
    ``FEATURE_WARM_START``; the value ``1`` switches it on, anything else
    switches it off. Without the variable the default applies.
    """

    def __init__(self, name: str, default: bool):
        """Initialise feature toggle.

        :param name: Name of feature.
        :param default: Default value for toggle.

        """
        self._name = name
        self._default = default

    @property
    def env_var(self) -> str:
        """Name of the environment variable controlling the toggle."""
        return str("feature_" + self._name).upper()

    def set_default(self, default: bool) -> None:
        """Set feature default toggle value.

        :param default: Default value for toggle.

        """
        self._default = default

    def is_active(self) -> bool:
        """Check if feature is active.

        :returns: Toggle value.

        """
        if self.env_var in os.environ:
            value = os.environ.get(self.env_var) == "1"
        else:
            value = self._default
        return value


# Use the angle schedule exactly as printed in the rotation recursion,
# instead of the corrected one. Falls back automatically if it cannot
# guarantee the outer-approximation bound.
FEATURE_PRINTED_ANGLE_SCHEDULE = FeatureToggle("printed_angle_schedule", False)

# Seed each LP solve with the basis of the previous one (parent node in the
# search tree, previous master in the cutting-plane loop).
FEATURE_WARM_START = FeatureToggle("warm_start", True)
