"""Exception hierarchy shared by all netrans modules.

The CLI maps these onto exit codes: ConfigError -> 1, DataError and its
subclasses -> 2, DivergenceError -> 3.
"""


class NetransError(Exception):
    """Base class for all netrans errors."""


class ConfigError(NetransError):
    """Invalid configuration value, flag combination, or config-file key."""


class DataError(NetransError):
    """Base class for data-level failures (bad files, violated contracts)."""


class ParseError(DataError):
    """A file could not be parsed.

    Carries enough context to name the file and line in the message.
    """

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class CorpusError(DataError):
    """Parallel-corpus level problem (line-count mismatch, empty line)."""


class AnnotationError(DataError):
    """A stand-off annotation does not fit the sentence it points at."""


class ContractError(DataError):
    """An inter-module precondition was violated (overlapping spans etc.)."""


class DegenerateInputError(DataError):
    """An operation received an input it is undefined for (empty string)."""


class LengthLimitError(DataError):
    """A string exceeded the maximum length a kernel accepts."""


class VocabError(DataError):
    """Character id outside the vocabulary, or an unusable vocabulary."""


class ShapeError(DataError):
    """Tensor dimensions disagree with the model configuration."""


class ModelIOError(DataError):
    """Base class for model (de)serialization failures."""


class VersionError(ModelIOError):
    """Model file carries an unsupported format version."""


class ChecksumError(ModelIOError):
    """Model file content does not match its checksum."""


class TruncatedModelError(ModelIOError):
    """Model file ends before the declared content does."""


class DivergenceError(NetransError):
    """Training produced a non-finite loss."""
