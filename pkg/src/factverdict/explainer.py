"""Sentence-level occlusion explanations for verdict predictions.

For each sentence in the resolved input selection, remove it from the
document, re-run the pipeline (re-chunking included) and record

    delta_i = base.p - p(document without sentence i)

The budget the base run resolved is frozen for the occlusion runs, so
removing a sentence the selection did not use provably leaves the
selection, and therefore the probability, unchanged. Deltas are stored
raw; reports sign them toward the predicted class (positive = supports
the prediction) via signed_deltas.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document
from .errors import ConfigError, TooFewSentencesError
from .pipeline import (
    PipelineConfig,
    exclude_sentences,
    freeze_budget,
    resolve_input,
    roles_for,
)
from .predictor import PredictionResult, PredictorModel, forward


@dataclass(frozen=True)
class Explanation:
    """Occlusion deltas for the k most influential selected sentences.

    ranked pairs (sentence_index, delta) sorted by |delta| non-increasing,
    ties toward the lower index. delta > 0 means removing the sentence
    lowers the predicted probability of label 1.
    """

    ranked: tuple[tuple[int, float], ...]
    k: int
    base: PredictionResult

    def __post_init__(self):
        magnitudes = [abs(d) for _, d in self.ranked]
        if magnitudes != sorted(magnitudes, reverse=True):
            raise ValueError("ranked deltas must be sorted by |delta| non-increasing")
        indices = [i for i, _ in self.ranked]
        if len(set(indices)) != len(indices):
            raise ValueError("ranked indices must be unique")

    def signed_deltas(self) -> tuple[tuple[int, float], ...]:
        """Deltas signed toward the predicted class (positive = supports)."""
        sign = 1.0 if self.base.label == 1 else -1.0
        return tuple((i, sign * d) for i, d in self.ranked)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "base_probability": self.base.p,
            "base_label": self.base.label,
            "ranked": [
                {"sentence": i, "delta": d} for i, d in self.signed_deltas()
            ],
        }


def explain(
    doc: Document,
    model: PredictorModel,
    cfg: PipelineConfig,
    k: int,
    roles=None,
) -> Explanation:
    """Top-k occlusion explanation over the resolved input selection.

    k is clamped to the selection size. Raises TooFewSentences when the
    selection holds fewer than two sentences.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if roles is None:
        roles = roles_for(doc)
    resolved = resolve_input(doc, roles, cfg)
    selection = resolved.used_sentences
    if len(selection) < 2:
        raise TooFewSentencesError(
            f"occlusion needs at least 2 selected sentences, have {len(selection)}"
        )
    base = forward(doc, model, cfg, roles=roles, resolved=resolved)
    frozen = freeze_budget(cfg, resolved)

    deltas: list[tuple[int, float]] = []
    for i in selection:
        view = exclude_sentences(doc, [i])
        sub = view.to_document()
        sub_roles = [roles[j] for j in view.indices]
        occluded = forward(sub, model, frozen, roles=sub_roles)
        deltas.append((i, base.p - occluded.p))

    deltas.sort(key=lambda item: (-abs(item[1]), item[0]))
    top = tuple(deltas[: min(k, len(deltas))])
    return Explanation(ranked=top, k=k, base=base)
