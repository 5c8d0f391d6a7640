"""Exception types that map onto CLI exit codes."""


class ConfigError(Exception):
    """Malformed or inconsistent experiment configuration. Exit code 1."""


class DivergenceError(Exception):
    """A learned value or loss became non-finite during training. Exit code 2."""
