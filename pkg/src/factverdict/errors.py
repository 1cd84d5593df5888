"""Exception hierarchy shared across the toolkit.

Two broad families matter to callers: ConfigError (bad knobs, schemas,
dimensions; CLI exit code 2) and DataError (bad or empty input documents;
CLI exit code 3). Everything else derives from FactVerdictError.
"""


class FactVerdictError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(FactVerdictError):
    """Invalid configuration, schema, or parameter value."""


class DimensionMismatchError(ConfigError):
    """Array shapes do not line up with the declared dimensions."""


class DataError(FactVerdictError):
    """Input data violates a documented precondition."""


class EmptyDocumentError(DataError):
    """No sentence survived parsing."""


class MalformedLineError(DataError):
    """A corpus JSONL line failed to parse or validate."""

    def __init__(self, line_no: int, line: str, reason: str):
        self.line_no = line_no
        self.line = line
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}: {line!r}")


class DuplicateIdError(DataError):
    """Two corpus records share a document id."""


class SpanOutOfRangeError(DataError):
    """An entity span or sentence index does not fit its document."""


class EmptyInputError(DataError):
    """The resolved prediction input contains no tokens."""


class EmptyChunkError(DataError):
    """A chunk with no tokens was handed to the encoder."""


class TooFewSentencesError(DataError):
    """Occlusion explanations need at least two usable sentences."""


class EmptyTrainingSetError(DataError):
    """No labeled documents were supplied for training."""


class EmptySplitError(DataError):
    """A required corpus split (train/dev/test) has no documents."""
