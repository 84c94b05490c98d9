"""Exception types shared across the package."""


class HofdetError(Exception):
    """Base class for all package errors."""


class ConfigError(HofdetError):
    """Invalid configuration: unknown key, bad value, or inconsistent options."""


class DataError(HofdetError):
    """A dataset violates a precondition (empty, single-class, inconsistent)."""


class SchemaError(DataError):
    """An input file is missing a required column."""


class LabelError(DataError):
    """A row carries an unknown or inconsistent label."""


class BackboneError(HofdetError):
    """A backbone identifier could not be resolved to a model."""


class CheckpointError(HofdetError):
    """A checkpoint is missing or could not be read back."""
