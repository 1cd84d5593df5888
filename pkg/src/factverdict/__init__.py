"""Fact-based legal judgment prediction toolkit.

Pipeline: rhetorical role structuring, role-weighted extractive
summarization, chunked document encoding, attention-pooled verdict
classification, and occlusion-based explanations.
"""

__version__ = "0.1.0"

from .corpus import (
    Document,
    DocumentView,
    EntitySpan,
    RhetoricalRole,
    Sentence,
    load_corpus,
    mask_entities,
    parse_document,
    save_corpus,
    strip_outcome,
)
from .errors import ConfigError, DataError, FactVerdictError

__all__ = [
    "ConfigError",
    "DataError",
    "Document",
    "DocumentView",
    "EntitySpan",
    "FactVerdictError",
    "RhetoricalRole",
    "Sentence",
    "load_corpus",
    "mask_entities",
    "parse_document",
    "save_corpus",
    "strip_outcome",
    "__version__",
]
