"""Exception hierarchy shared by all textssl modules."""


class TextSslError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"


class ConfigError(TextSslError):
    """Config file could not be parsed."""

    category = "config"


class ValidationError(TextSslError):
    """A value violates a documented invariant or precondition."""

    category = "validation"


class LayoutError(TextSslError):
    """Rendered content does not fit the target image geometry."""

    category = "layout"


class IntegrityError(TextSslError):
    """Stored artifact is corrupt, truncated, or references missing files."""

    category = "integrity"


class CompatibilityError(TextSslError):
    """Checkpoint and current configuration disagree."""

    category = "compatibility"


class PlacementError(TextSslError):
    """Mask blocks could not be placed without overlap."""

    category = "placement"


class TrainingError(TextSslError):
    """Training aborted (e.g. a loss term became non-finite)."""

    category = "training"
