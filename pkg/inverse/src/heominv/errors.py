class DegenerateScalingError(ValueError):
    """A label has zero variance on the training split; cannot standardize."""


class ConfigurationError(ValueError):
    """Model or training configuration is internally inconsistent."""
