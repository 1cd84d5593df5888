"""Case documents: parsing, tokenization, entity masking, corpus I/O.

A Document is an immutable ordered list of Sentences. Parsing is fully
rule-based so that equal input text always yields the same structure:

* Sentences split on a terminal mark (``.`` ``?`` ``;``) followed by
  whitespace and a capital letter or digit, except when the word ending
  with the mark is a protected abbreviation (``Sec.``, ``vs.``, ...).
* Tokens are whitespace pieces with leading/trailing punctuation detached
  as separate tokens, so ``"allowed."`` becomes ``["allowed", "."]``.
  "Token" everywhere in this package means these units.
* Input text is NFC-normalized and each sentence's text is stored with
  runs of whitespace collapsed to single spaces.

Corpus files are JSONL, one object per line:

    {"id": str, "text": str, "label": 0|1 (optional),
     "split": "train"|"dev"|"test" (optional, default "train")}

Entity sidecar files are JSONL as well:

    {"id": str, "spans": [{"sentence": int, "start": int, "end": int,
                           "category": str}]}
"""

from __future__ import annotations

import enum
import json
import re
import string
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateIdError,
    EmptyDocumentError,
    MalformedLineError,
    SpanOutOfRangeError,
)


class RhetoricalRole(enum.Enum):
    """Functional category of a sentence in a judgment.

    The enumeration order is load-bearing: decoding ties break toward the
    lower index. Serialized form is the exact member value string.
    """

    FACT = "Fact"
    ISSUE = "Issue"
    ARGUMENT = "Argument"
    STATUTE = "Statute"
    PRECEDENT = "Precedent"
    RATIO = "RatioOfDecision"
    RULING_LOWER = "RulingByLowerCourt"
    RULING_PRESENT = "RulingByPresentCourt"
    NONE = "None"

    @classmethod
    def from_string(cls, value: str) -> "RhetoricalRole":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown rhetorical role: {value!r}")


ROLE_ORDER: tuple[RhetoricalRole, ...] = tuple(RhetoricalRole)

ENTITY_CATEGORIES = ("PERSON", "JUDGE", "ORG", "LOC", "DATE", "CASEREF", "OTHER")

VALID_SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[str, ...]
    role: RhetoricalRole | None = None
    role_score: float | None = None


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]
    label: int | None = None
    split: str = "train"
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if self.split not in VALID_SPLITS:
            raise ValueError(f"split must be one of {VALID_SPLITS}, got {self.split!r}")

    @property
    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)

    def roles(self) -> tuple[RhetoricalRole | None, ...]:
        return tuple(s.role for s in self.sentences)


@dataclass(frozen=True)
class DocumentView:
    """A subset of a document's sentences, in original order.

    ``indices`` are positions in the underlying document; views keep the
    original coordinates so downstream results map back to the source.
    """

    document: Document
    indices: tuple[int, ...]

    def __post_init__(self):
        n = len(self.document.sentences)
        if any(not 0 <= i < n for i in self.indices):
            raise ValueError("view index out of range")
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError("view indices must be strictly increasing")

    @property
    def sentences(self) -> tuple[Sentence, ...]:
        return tuple(self.document.sentences[i] for i in self.indices)

    @property
    def is_empty(self) -> bool:
        return not self.indices

    def tokens(self) -> list[str]:
        out: list[str] = []
        for i in self.indices:
            out.extend(self.document.sentences[i].tokens)
        return out

    def to_document(self, doc_id: str | None = None) -> Document:
        """Materialize the view as a reindexed Document."""
        sents = tuple(
            replace(s, index=new_idx)
            for new_idx, s in zip(range(len(self.indices)), self.sentences)
        )
        return Document(
            id=doc_id or self.document.id,
            sentences=sents,
            label=self.document.label,
            split=self.document.split,
            meta=self.document.meta,
        )


def full_view(doc: Document) -> DocumentView:
    return DocumentView(doc, tuple(range(len(doc.sentences))))


@dataclass(frozen=True)
class EntitySpan:
    sentence_index: int
    token_start: int
    token_end: int
    category: str

    def __post_init__(self):
        if self.category not in ENTITY_CATEGORIES:
            raise ValueError(f"unknown entity category: {self.category!r}")
        if self.token_start < 0 or self.token_end <= self.token_start:
            raise ValueError("entity span must satisfy 0 <= start < end")


# --- parsing ---------------------------------------------------------------

PROTECTED_ABBREVIATIONS = frozenset(
    {"No.", "Nos.", "vs.", "v.", "Sec.", "Art.", "Hon.", "Mr.", "Mrs.", "Dr.", "Ors.", "Anr."}
)

_BREAK_RE = re.compile(r"[.?;](?=\s+[A-Z0-9])")
_PUNCT = frozenset(string.punctuation)


def _detach_punctuation(piece: str) -> list[str]:
    lead: list[str] = []
    trail: list[str] = []
    while len(piece) > 1 and piece[0] in _PUNCT:
        lead.append(piece[0])
        piece = piece[1:]
    while len(piece) > 1 and piece[-1] in _PUNCT:
        trail.append(piece[-1])
        piece = piece[:-1]
    return lead + [piece] + trail[::-1]


def tokenize(text: str) -> tuple[str, ...]:
    tokens: list[str] = []
    for piece in text.split():
        tokens.extend(_detach_punctuation(piece))
    return tuple(tokens)


def _is_protected(text: str, punct_pos: int) -> bool:
    # Word ending at (and including) the terminal mark, leading punctuation
    # ignored so "(Sec." still counts as protected.
    head = text[: punct_pos + 1]
    word = head.rsplit(None, 1)[-1] if head.strip() else head
    word = word.lstrip("".join(_PUNCT - {"."}))
    return word in PROTECTED_ABBREVIATIONS


def _split_sentences(text: str) -> list[str]:
    pieces: list[str] = []
    start = 0
    for match in _BREAK_RE.finditer(text):
        if _is_protected(text, match.start()):
            continue
        pieces.append(text[start : match.start() + 1])
        start = match.end()
    pieces.append(text[start:])
    return pieces


def parse_document(
    raw: str,
    doc_id: str,
    label: int | None = None,
    split: str = "train",
    meta: Mapping[str, str] | None = None,
) -> Document:
    """Parse raw case text into a Document.

    Raises EmptyDocumentError when no sentence survives segmentation.
    """
    text = unicodedata.normalize("NFC", raw)
    sentences: list[Sentence] = []
    for piece in _split_sentences(text):
        normalized = " ".join(piece.split())
        if not normalized:
            continue
        tokens = tokenize(normalized)
        if not tokens:
            continue
        sentences.append(Sentence(index=len(sentences), text=normalized, tokens=tokens))
    if not sentences:
        raise EmptyDocumentError(f"document {doc_id!r} has no sentences")
    return Document(
        id=doc_id, sentences=tuple(sentences), label=label, split=split, meta=dict(meta or {})
    )


# --- entity masking --------------------------------------------------------

def _validate_spans(doc: Document, spans: Sequence[EntitySpan]) -> None:
    by_sentence: dict[int, list[EntitySpan]] = {}
    for span in spans:
        if not 0 <= span.sentence_index < len(doc.sentences):
            raise SpanOutOfRangeError(
                f"sentence {span.sentence_index} outside document {doc.id!r}"
            )
        n_tokens = len(doc.sentences[span.sentence_index].tokens)
        if span.token_end > n_tokens:
            raise SpanOutOfRangeError(
                f"span [{span.token_start},{span.token_end}) exceeds "
                f"{n_tokens} tokens in sentence {span.sentence_index} of {doc.id!r}"
            )
        by_sentence.setdefault(span.sentence_index, []).append(span)
    for idx, group in by_sentence.items():
        group.sort(key=lambda s: s.token_start)
        for prev, cur in zip(group, group[1:]):
            if cur.token_start < prev.token_end:
                raise SpanOutOfRangeError(
                    f"overlapping spans in sentence {idx} of {doc.id!r}"
                )


def mask_entities(doc: Document, spans: Sequence[EntitySpan]) -> Document:
    """Replace each span's tokens with a single ``<CATEGORY_k>`` placeholder.

    Placeholder numbers are assigned per (category, lowercased surface) in
    first-occurrence order within the document, starting at 1, so repeated
    mentions of the same entity share a number.
    """
    _validate_spans(doc, spans)
    ordered = sorted(spans, key=lambda s: (s.sentence_index, s.token_start))
    numbering: dict[tuple[str, str], int] = {}
    per_category: dict[str, int] = {}
    placeholder_for: dict[tuple[int, int, int], str] = {}
    for span in ordered:
        tokens = doc.sentences[span.sentence_index].tokens
        surface = " ".join(tokens[span.token_start : span.token_end]).lower()
        key = (span.category, surface)
        if key not in numbering:
            per_category[span.category] = per_category.get(span.category, 0) + 1
            numbering[key] = per_category[span.category]
        placeholder_for[(span.sentence_index, span.token_start, span.token_end)] = (
            f"<{span.category}_{numbering[key]}>"
        )

    new_sentences: list[Sentence] = []
    for sent in doc.sentences:
        sent_spans = [s for s in ordered if s.sentence_index == sent.index]
        if not sent_spans:
            new_sentences.append(sent)
            continue
        tokens = list(sent.tokens)
        for span in sorted(sent_spans, key=lambda s: s.token_start, reverse=True):
            placeholder = placeholder_for[(span.sentence_index, span.token_start, span.token_end)]
            tokens[span.token_start : span.token_end] = [placeholder]
        new_sentences.append(replace(sent, tokens=tuple(tokens), text=" ".join(tokens)))
    return replace(doc, sentences=tuple(new_sentences))


def is_placeholder(token: str) -> bool:
    return bool(re.fullmatch(r"<[A-Z]+_\d+>", token))


_DATE_TOKEN_RE = re.compile(r"\d{1,2}[./-]\d{1,2}[./-]\d{2,4}")
_MONTHS = frozenset(
    m.lower()
    for m in (
        "January", "February", "March", "April", "May", "June", "July",
        "August", "September", "October", "November", "December",
    )
)
_YEAR_RE = re.compile(r"(18|19|20)\d{2}")
_DAY_RE = re.compile(r"\d{1,2}(st|nd|rd|th)?")
_REPORTER_RE = re.compile(r"SCC|SCR|SCALE|AIR")


def find_entity_spans(doc: Document) -> list[EntitySpan]:
    """Built-in regex provider covering DATE and CASEREF patterns only.

    Full NER is out of scope; spans for other categories are supplied
    externally. Placeholder tokens from a previous masking pass never
    re-match.
    """
    spans: list[EntitySpan] = []
    for sent in doc.sentences:
        toks = sent.tokens
        claimed: set[int] = set()

        def claim(start: int, end: int, category: str) -> None:
            if any(i in claimed for i in range(start, end)):
                return
            if any(is_placeholder(toks[i]) for i in range(start, end)):
                return
            claimed.update(range(start, end))
            spans.append(EntitySpan(sent.index, start, end, category))

        for i in range(len(toks)):
            # "AIR 1973 SC 1461" style citation
            if (
                toks[i] == "AIR"
                and i + 3 < len(toks)
                and _YEAR_RE.fullmatch(toks[i + 1])
                and toks[i + 2].isupper()
                and toks[i + 3].isdigit()
            ):
                claim(i, i + 4, "CASEREF")
            # "2 SCC 513" style citation
            elif (
                _REPORTER_RE.fullmatch(toks[i])
                and 0 < i
                and toks[i - 1].isdigit()
                and i + 1 < len(toks)
                and toks[i + 1].isdigit()
            ):
                claim(i - 1, i + 2, "CASEREF")
        for i in range(len(toks)):
            if _DATE_TOKEN_RE.fullmatch(toks[i]):
                claim(i, i + 1, "DATE")
            elif (
                i + 2 < len(toks)
                and _DAY_RE.fullmatch(toks[i])
                and toks[i][0].isdigit()
                and toks[i + 1].lower() in _MONTHS
                and _YEAR_RE.fullmatch(toks[i + 2])
            ):
                claim(i, i + 3, "DATE")
    spans.sort(key=lambda s: (s.sentence_index, s.token_start))
    return spans


# --- outcome stripping -----------------------------------------------------

def strip_outcome(doc: Document, roles: Sequence[RhetoricalRole]) -> DocumentView:
    """Drop every sentence tagged RulingByPresentCourt.

    May return an empty view; emptiness is the caller's flag.
    """
    if len(roles) != len(doc.sentences):
        raise ValueError(
            f"roles cover {len(roles)} sentences, document has {len(doc.sentences)}"
        )
    kept = tuple(
        i for i, role in enumerate(roles) if role is not RhetoricalRole.RULING_PRESENT
    )
    return DocumentView(doc, kept)


# --- corpus JSONL ----------------------------------------------------------

def _parse_corpus_line(line_no: int, line: str) -> Document:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLineError(line_no, line, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise MalformedLineError(line_no, line, "expected a JSON object")
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise MalformedLineError(line_no, line, "missing or invalid 'id'")
    text = obj.get("text")
    if not isinstance(text, str):
        raise MalformedLineError(line_no, line, "missing or invalid 'text'")
    label = obj.get("label")
    if label is not None and label not in (0, 1):
        raise MalformedLineError(line_no, line, "'label' must be 0 or 1")
    split = obj.get("split", "train")
    if split not in VALID_SPLITS:
        raise MalformedLineError(line_no, line, f"'split' must be one of {VALID_SPLITS}")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
    ):
        raise MalformedLineError(line_no, line, "'meta' must map strings to strings")
    try:
        return parse_document(text, doc_id, label=label, split=split, meta=meta)
    except EmptyDocumentError as exc:
        raise MalformedLineError(line_no, line, "text has no sentences") from exc


def load_corpus(path: str | Path) -> list[Document]:
    """Load a JSONL corpus, preserving file order.

    Raises MalformedLineError with the offending 1-based line number and
    DuplicateIdError on repeated ids.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            doc = _parse_corpus_line(line_no, line.rstrip("\n"))
            if doc.id in seen:
                raise DuplicateIdError(f"duplicate document id {doc.id!r} at line {line_no}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def document_text(doc: Document) -> str:
    return " ".join(s.text for s in doc.sentences)


def corpus_to_jsonl(docs: Iterable[Document]) -> str:
    lines = []
    for doc in docs:
        obj: dict = {"id": doc.id, "text": document_text(doc)}
        if doc.label is not None:
            obj["label"] = doc.label
        obj["split"] = doc.split
        if doc.meta:
            obj["meta"] = dict(doc.meta)
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def save_corpus(docs: Iterable[Document], path: str | Path) -> None:
    Path(path).write_text(corpus_to_jsonl(docs), encoding="utf-8")


# --- sidecars ---------------------------------------------------------------

def load_entity_sidecar(path: str | Path) -> dict[str, list[EntitySpan]]:
    """Entity sidecar JSONL: {"id": str, "spans": [{sentence,start,end,category}]}."""
    table: dict[str, list[EntitySpan]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                doc_id = obj["id"]
                spans = [
                    EntitySpan(
                        sentence_index=s["sentence"],
                        token_start=s["start"],
                        token_end=s["end"],
                        category=s["category"],
                    )
                    for s in obj["spans"]
                ]
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise MalformedLineError(line_no, line.rstrip("\n"), str(exc)) from exc
            table[doc_id] = spans
    return table


def load_role_sidecar(path: str | Path) -> dict[str, list[RhetoricalRole]]:
    """Role sidecar JSONL: {"id": str, "roles": [str]}."""
    table: dict[str, list[RhetoricalRole]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                table[obj["id"]] = [RhetoricalRole.from_string(r) for r in obj["roles"]]
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise MalformedLineError(line_no, line.rstrip("\n"), str(exc)) from exc
    return table


def attach_roles(doc: Document, roles: Sequence[RhetoricalRole]) -> Document:
    if len(roles) != len(doc.sentences):
        raise ValueError(
            f"{len(roles)} roles for {len(doc.sentences)} sentences in {doc.id!r}"
        )
    sentences = tuple(
        replace(s, role=role) for s, role in zip(doc.sentences, roles)
    )
    return replace(doc, sentences=sentences)
