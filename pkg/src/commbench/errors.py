"""Exception types shared across the package."""


class CommbenchError(Exception):
    """Base class for all toolkit errors."""


class DataError(CommbenchError):
    """Malformed or inconsistent input data (files, labels, universes)."""


class ConfigError(CommbenchError):
    """Invalid benchmark configuration."""


class AllCellsFailedError(CommbenchError):
    """Every benchmark cell failed; nothing was measured."""
