"""Token-stream chunking: sliding window, last-k, first-k.

Chunks are half-open [start, end) offsets into the source token stream.
The sliding technique starts at 0 with stride window - overlap and stops
after the first chunk whose end reaches the stream length, so no emitted
chunk is contained in another and tail tokens are never covered twice by
a dedicated remainder chunk.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ConfigError, EmptyInputError

DEFAULT_WINDOW = 410
DEFAULT_OVERLAP = 100
DEFAULT_K = 510


class Technique(enum.Enum):
    SLIDING = "sliding"
    LAST = "last"
    FIRST = "first"

    @classmethod
    def from_string(cls, value: str) -> "Technique":
        for member in cls:
            if member.value == value:
                return member
        raise ConfigError(f"unknown chunking technique {value!r}")


@dataclass(frozen=True)
class ChunkingConfig:
    technique: Technique = Technique.SLIDING
    window: int = DEFAULT_WINDOW
    overlap: int = DEFAULT_OVERLAP
    k: int = DEFAULT_K

    def __post_init__(self):
        if not isinstance(self.technique, Technique):
            raise ConfigError(f"technique must be a Technique, got {self.technique!r}")
        if not (isinstance(self.window, int) and self.window >= 1):
            raise ConfigError(f"window must be a positive int, got {self.window!r}")
        if not (isinstance(self.overlap, int) and 0 <= self.overlap < self.window):
            raise ConfigError(
                f"overlap must satisfy 0 <= overlap < window, got {self.overlap!r}"
            )
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ConfigError(f"k must be a positive int, got {self.k!r}")

    def to_json_dict(self) -> dict:
        return {
            "technique": self.technique.value,
            "window": self.window,
            "overlap": self.overlap,
            "k": self.k,
        }


def config_from_json(obj: Mapping) -> ChunkingConfig:
    """Parse `{"technique": "sliding"|"last"|"first", "window", "overlap", "k"}`;
    omitted numeric keys take the built-in defaults."""
    if not isinstance(obj, Mapping):
        raise ConfigError("chunking config must be a JSON object")
    technique = obj.get("technique", "sliding")
    if not isinstance(technique, str):
        raise ConfigError("'technique' must be a string")
    for key in ("window", "overlap", "k"):
        if key in obj and (isinstance(obj[key], bool) or not isinstance(obj[key], int)):
            raise ConfigError(f"'{key}' must be an int")
    return ChunkingConfig(
        technique=Technique.from_string(technique),
        window=obj.get("window", DEFAULT_WINDOW),
        overlap=obj.get("overlap", DEFAULT_OVERLAP),
        k=obj.get("k", DEFAULT_K),
    )


def config_from_json_text(payload: str) -> ChunkingConfig:
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid chunking config JSON: {exc.msg}") from exc
    return config_from_json(obj)


@dataclass(frozen=True)
class Chunk:
    start: int
    end: int
    ordinal: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError("chunk must satisfy 0 <= start < end")

    @property
    def length(self) -> int:
        return self.end - self.start


def chunk_spans(total: int, cfg: ChunkingConfig) -> list[Chunk]:
    """Chunk offsets for a stream of `total` tokens."""
    if total < 1:
        raise EmptyInputError("cannot chunk an empty token stream")
    if cfg.technique is Technique.LAST:
        return [Chunk(max(0, total - cfg.k), total, 0)]
    if cfg.technique is Technique.FIRST:
        return [Chunk(0, min(cfg.k, total), 0)]
    stride = cfg.window - cfg.overlap
    chunks: list[Chunk] = []
    start = 0
    while True:
        end = min(start + cfg.window, total)
        chunks.append(Chunk(start, end, len(chunks)))
        if end == total:
            return chunks
        start += stride


def sliding_chunk_count(total: int, window: int, overlap: int) -> int:
    """1 + ceil(max(0, T - window) / (window - overlap))."""
    return 1 + math.ceil(max(0, total - window) / (window - overlap))


def chunk(tokens: Sequence[str], cfg: ChunkingConfig) -> list[Chunk]:
    return chunk_spans(len(tokens), cfg)


def chunk_token_slices(tokens: Sequence[str], cfg: ChunkingConfig) -> list[tuple[str, ...]]:
    return [tuple(tokens[c.start : c.end]) for c in chunk(tokens, cfg)]
