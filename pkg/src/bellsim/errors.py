"""Exception types shared across the package."""


class NumericError(RuntimeError):
    """A numerical routine failed beyond tolerance (non-PSD input, no convergence...)."""


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""
