"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class NumericalError(RuntimeError):
    """A numerical routine failed or produced an unusable result."""


class DegenerateInputError(ValueError):
    """Input that admits no meaningful answer (e.g. rescaling a constant sequence)."""
