"""Exception types shared across the package.

Invalid user input raises plain :class:`ValueError`; the classes below mark
failures that callers may want to handle separately.
"""


class DivergenceError(RuntimeError):
    """Time propagation produced a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"propagation diverged at step {step}")


class DatasetCorruptionError(RuntimeError):
    """Stored dataset bytes do not match their manifest."""


class UnsupportedFormatError(RuntimeError):
    """Dataset directory is missing a manifest or uses an unknown version."""
