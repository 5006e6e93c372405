"""Exceptions shared across the pipeline."""


class ConfigError(ValueError):
    """Bad configuration: unknown formats, out-of-range parameters, unusable profiles."""


class InputError(RuntimeError):
    """Unusable input: unreadable files, empty corpora, missing or corrupt artifacts."""
