"""Input-selection pipeline: roles -> outcome stripping -> selection -> tokens.

A pipeline run turns a document plus per-sentence roles into the token
stream the classifier consumes:

1. optionally drop RulingByPresentCourt sentences (the verdict must not
   leak into the input),
2. apply the configured input selection: the full remaining document, a
   role-weighted summary (variation 1 or 2), only Fact sentences, or
   Fact + RulingByLowerCourt sentences,
3. concatenate the surviving sentences' tokens in document order.

Empty selections (a document with no Fact sentences under factsOnly)
fall back, when enabled, to the summarized full document; if even that
selects nothing the full document itself is used. With fallback disabled
an empty selection raises EmptyInput.

The resolved budget is reported so callers (the explainer in particular)
can freeze it and re-run occlusions under identical constraints.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .chunker import ChunkingConfig, Technique, config_from_json
from .corpus import Document, DocumentView, RhetoricalRole, full_view
from .corpus import strip_outcome as _strip_outcome
from .errors import ConfigError, EmptyInputError, SpanOutOfRangeError
from .summarizer import (
    DEFAULT_BUDGET_FRACTION,
    DEFAULT_LAMBDA,
    DEFAULT_QUOTAS,
    RoleWeightScheme,
    Summary,
    SummarySpec,
    VARIATION_1,
    VARIATION_2,
    default_budget,
    scheme_from_value,
    summarize,
)

logger = logging.getLogger(__name__)


class InputSelection(enum.Enum):
    FULL = "full"
    VAR1 = "var1"
    VAR2 = "var2"
    FACTS_ONLY = "factsOnly"
    FACTS_RLC = "factsRLC"

    @classmethod
    def from_string(cls, value: str) -> "InputSelection":
        for member in cls:
            if member.value == value:
                return member
        raise ConfigError(f"unknown input selection {value!r}")


def technique_from_number(number: int) -> ChunkingConfig:
    """Paper table numbering: 1 = sliding 410/100, 2 = last 510, 3 = first 510."""
    if number == 1:
        return ChunkingConfig(Technique.SLIDING)
    if number == 2:
        return ChunkingConfig(Technique.LAST)
    if number == 3:
        return ChunkingConfig(Technique.FIRST)
    raise ConfigError(f"technique number must be 1, 2 or 3, got {number!r}")


def technique_number(cfg: ChunkingConfig) -> int:
    return {Technique.SLIDING: 1, Technique.LAST: 2, Technique.FIRST: 3}[cfg.technique]


@dataclass(frozen=True)
class PipelineConfig:
    selection: InputSelection = InputSelection.FULL
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)
    scheme: RoleWeightScheme | None = None
    budget_words: int | None = None
    budget_fraction: float = DEFAULT_BUDGET_FRACTION
    quotas: Mapping[RhetoricalRole, int] | None = None
    lam: float = DEFAULT_LAMBDA
    strip_outcome: bool = True
    fallback_to_full: bool = True
    summarize_facts: bool = False

    def __post_init__(self):
        if self.budget_words is not None and (
            not isinstance(self.budget_words, int) or self.budget_words < 1
        ):
            raise ConfigError(f"budget_words must be a positive int, got {self.budget_words!r}")
        if not 0 < self.budget_fraction <= 1:
            raise ConfigError("budget_fraction must be in (0, 1]")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")

    def summary_scheme(self) -> RoleWeightScheme:
        if self.scheme is not None:
            return self.scheme
        if self.selection is InputSelection.VAR2:
            return VARIATION_2
        return VARIATION_1

    def to_json_dict(self) -> dict:
        out: dict = {
            "selection": self.selection.value,
            "chunking": self.chunking.to_json_dict(),
            "budget_fraction": self.budget_fraction,
            "lambda": self.lam,
            "strip_outcome": self.strip_outcome,
            "fallback_to_full": self.fallback_to_full,
            "summarize_facts": self.summarize_facts,
        }
        if self.scheme is not None:
            out["scheme"] = {r.value: w for r, w in self.scheme.weights.items()}
        if self.budget_words is not None:
            out["budget_words"] = self.budget_words
        if self.quotas is not None:
            out["quotas"] = {r.value: q for r, q in self.quotas.items()}
        return out


def pipeline_config_from_json(obj: Mapping) -> PipelineConfig:
    if not isinstance(obj, Mapping):
        raise ConfigError("pipeline config must be a JSON object")
    selection = obj.get("selection", "full")
    if not isinstance(selection, str):
        raise ConfigError("'selection' must be a string")
    chunking = config_from_json(obj.get("chunking", {}))
    scheme = None
    if "scheme" in obj and obj["scheme"] is not None:
        scheme = scheme_from_value(obj["scheme"])
    quotas = None
    if "quotas" in obj and obj["quotas"] is not None:
        raw = obj["quotas"]
        if not isinstance(raw, Mapping):
            raise ConfigError("'quotas' must be an object")
        try:
            quotas = {RhetoricalRole.from_string(k): v for k, v in raw.items()}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    for key in ("strip_outcome", "fallback_to_full", "summarize_facts"):
        if key in obj and not isinstance(obj[key], bool):
            raise ConfigError(f"'{key}' must be a boolean")
    lam = obj.get("lambda", DEFAULT_LAMBDA)
    if isinstance(lam, bool) or not isinstance(lam, (int, float)):
        raise ConfigError("'lambda' must be a number")
    budget_words = obj.get("budget_words")
    if budget_words is not None and (isinstance(budget_words, bool) or not isinstance(budget_words, int)):
        raise ConfigError("'budget_words' must be an int")
    fraction = obj.get("budget_fraction", DEFAULT_BUDGET_FRACTION)
    if isinstance(fraction, bool) or not isinstance(fraction, (int, float)):
        raise ConfigError("'budget_fraction' must be a number")
    return PipelineConfig(
        selection=InputSelection.from_string(selection),
        chunking=chunking,
        scheme=scheme,
        budget_words=budget_words,
        budget_fraction=float(fraction),
        quotas=quotas,
        lam=float(lam),
        strip_outcome=obj.get("strip_outcome", True),
        fallback_to_full=obj.get("fallback_to_full", True),
        summarize_facts=obj.get("summarize_facts", False),
    )


@dataclass(frozen=True)
class ResolvedInput:
    """Outcome of input selection: which sentences feed the classifier."""

    selection: InputSelection
    view: DocumentView
    summary: Summary | None
    budget_used: int | None
    fallback_used: bool

    @property
    def used_sentences(self) -> tuple[int, ...]:
        return self.view.indices

    def tokens(self) -> list[str]:
        return self.view.tokens()


def roles_for(doc: Document, tagger=None) -> tuple[RhetoricalRole, ...]:
    """Role source order: attached roles, then the tagger, then all None."""
    attached = doc.roles()
    if all(r is not None for r in attached):
        return attached
    if tagger is not None:
        from .roles import tag

        return tag(doc, tagger).roles
    return tuple(RhetoricalRole.NONE for _ in doc.sentences)


def _summarize_view(
    doc: Document,
    view: DocumentView,
    view_roles: Sequence[RhetoricalRole],
    scheme: RoleWeightScheme,
    cfg: PipelineConfig,
) -> tuple[DocumentView, Summary, int]:
    sub = view.to_document()
    budget = cfg.budget_words or default_budget(sub.token_count, cfg.budget_fraction)
    quotas = dict(DEFAULT_QUOTAS) if cfg.quotas is None else dict(cfg.quotas)
    summary = summarize(sub, view_roles, SummarySpec(scheme, budget, quotas, cfg.lam))
    indices = tuple(view.indices[j] for j in summary.selected)
    return DocumentView(doc, indices), summary, budget


def resolve_input(
    doc: Document, roles: Sequence[RhetoricalRole], cfg: PipelineConfig
) -> ResolvedInput:
    """Apply outcome stripping and the configured input selection."""
    if len(roles) != len(doc.sentences):
        raise ValueError(
            f"roles cover {len(roles)} sentences, document has {len(doc.sentences)}"
        )
    fallback_used = False
    if cfg.strip_outcome:
        base = _strip_outcome(doc, roles)
        if base.is_empty:
            if not cfg.fallback_to_full:
                raise EmptyInputError(
                    f"document {doc.id!r} has only RulingByPresentCourt sentences"
                )
            logger.warning("document %s: outcome stripping removed everything; "
                           "using the unstripped document", doc.id)
            base = full_view(doc)
            fallback_used = True
    else:
        base = full_view(doc)
    base_roles = [roles[i] for i in base.indices]

    def fallback(reason: str) -> ResolvedInput:
        if not cfg.fallback_to_full:
            raise EmptyInputError(f"document {doc.id!r}: {reason}")
        logger.warning("document %s: %s; falling back to the summarized document",
                       doc.id, reason)
        view, summary, budget = _summarize_view(doc, base, base_roles, cfg.summary_scheme(), cfg)
        if view.is_empty:
            return ResolvedInput(cfg.selection, base, None, None, fallback_used=True)
        return ResolvedInput(cfg.selection, view, summary, budget, fallback_used=True)

    if cfg.selection is InputSelection.FULL:
        return ResolvedInput(cfg.selection, base, None, None, fallback_used)

    if cfg.selection in (InputSelection.VAR1, InputSelection.VAR2):
        view, summary, budget = _summarize_view(doc, base, base_roles, cfg.summary_scheme(), cfg)
        if view.is_empty:
            return fallback("summary selected no sentences")
        return ResolvedInput(cfg.selection, view, summary, budget, fallback_used)

    wanted = (
        (RhetoricalRole.FACT,)
        if cfg.selection is InputSelection.FACTS_ONLY
        else (RhetoricalRole.FACT, RhetoricalRole.RULING_LOWER)
    )
    kept = tuple(i for i in base.indices if roles[i] in wanted)
    if not kept:
        return fallback(f"no sentences match selection {cfg.selection.value!r}")
    view = DocumentView(doc, kept)
    if not cfg.summarize_facts:
        return ResolvedInput(cfg.selection, view, None, None, fallback_used)
    view_roles = [roles[i] for i in kept]
    final, summary, budget = _summarize_view(doc, view, view_roles, cfg.summary_scheme(), cfg)
    if final.is_empty:
        return fallback("facts summary selected no sentences")
    return ResolvedInput(cfg.selection, final, summary, budget, fallback_used)


def freeze_budget(cfg: PipelineConfig, resolved: ResolvedInput) -> PipelineConfig:
    """Pin the budget actually used by a run, for occlusion re-runs."""
    if resolved.budget_used is None or cfg.budget_words is not None:
        return cfg
    return replace(cfg, budget_words=resolved.budget_used)


def exclude_sentences(doc: Document, excluded: Sequence[int]) -> DocumentView:
    """View of the document with the listed sentence indices removed."""
    n = len(doc.sentences)
    bad = [i for i in excluded if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < n]
    if bad:
        raise SpanOutOfRangeError(
            f"excluded sentence indices out of range for {doc.id!r}: {bad}"
        )
    keep = tuple(i for i in range(n) if i not in set(excluded))
    if not keep:
        raise EmptyInputError(f"every sentence of {doc.id!r} was excluded")
    return DocumentView(doc, keep)
