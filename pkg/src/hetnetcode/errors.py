class ConfigError(ValueError):
    """Invalid scenario, sweep, or topology parameters."""


class NoPathError(RuntimeError):
    """Destination unreachable on every enabled interface."""
