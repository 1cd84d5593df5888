"""Binary classification metrics: per-class confusion counts and macro P/R/F1.

Zero denominators resolve to 0 (a class with no predicted positives has
precision 0, one with no gold positives has recall 0, and F1 is 0 when
both P and R are 0). The macro average is the unweighted mean over
classes {0, 1}; per-class values are always carried so other averaging
conventions can be recomputed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DataError, DimensionMismatchError


@dataclass(frozen=True)
class ClassCounts:
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    per_class: Mapping[int, ClassMetrics]

    def to_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": {
                str(label): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in sorted(self.per_class.items())
            },
        }


def confusion(preds: Sequence[int], golds: Sequence[int]) -> dict[int, ClassCounts]:
    """Per-class confusion counts for binary labels."""
    if len(preds) != len(golds):
        raise DimensionMismatchError(
            f"{len(preds)} predictions for {len(golds)} gold labels"
        )
    if not preds:
        raise DataError("cannot compute a confusion matrix from zero predictions")
    for value in (*preds, *golds):
        if value not in (0, 1):
            raise DataError(f"labels must be 0 or 1, got {value!r}")
    out = {}
    for cls in (0, 1):
        tp = fp = fn = tn = 0
        for p, g in zip(preds, golds):
            if p == cls and g == cls:
                tp += 1
            elif p == cls and g != cls:
                fp += 1
            elif p != cls and g == cls:
                fn += 1
            else:
                tn += 1
        out[cls] = ClassCounts(tp, fp, fn, tn)
    return out


def _prf(counts: ClassCounts) -> ClassMetrics:
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassMetrics(precision, recall, f1, support=counts.tp + counts.fn)


def macro_prf(counts: Mapping[int, ClassCounts]) -> Metrics:
    """Unweighted macro average of per-class precision/recall/F1."""
    per_class = {cls: _prf(counts[cls]) for cls in (0, 1)}
    return Metrics(
        precision=(per_class[0].precision + per_class[1].precision) / 2,
        recall=(per_class[0].recall + per_class[1].recall) / 2,
        f1=(per_class[0].f1 + per_class[1].f1) / 2,
        per_class=per_class,
    )


def evaluate(preds: Sequence[int], golds: Sequence[int]) -> Metrics:
    return macro_prf(confusion(preds, golds))
