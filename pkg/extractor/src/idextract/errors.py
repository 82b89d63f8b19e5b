class ExtractError(Exception):
    """Base class for extraction errors."""


class PoolExhaustedError(ExtractError):
    """The demonstration pool cannot satisfy the requested sampling."""


class LabelCollisionError(ExtractError):
    """Two answer labels share the same first token under the tokenizer."""


class ModelLoadError(ExtractError):
    """The model identifier could not be loaded."""
