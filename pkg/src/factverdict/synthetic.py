"""Synthetic planted-cue corpus: a desk-scale stand-in for a real corpus.

Each generated document is a role-ordered mini judgment (facts, issue,
arguments, statutes, precedents, reasoning, lower-court history, final
ruling). The label signal is planted explicitly:

* label-1 documents carry the token ``granted-marker`` in exactly one
  Fact sentence; label-0 documents carry ``dismissed-marker`` instead;
* every non-Fact sentence independently receives the *opposite* marker
  with probability 0.2, so full-document input is noisy while
  facts-only input sees the true cue and nothing else.

Labels alternate document by document (balance within +/-1, overall and
inside each contiguous split). Splits are assigned 70/15/15 in order.
All randomness flows through one ``random.Random(seed)``, so a fixed
seed reproduces the corpus byte for byte.

Sentence templates use each role's cue vocabulary exclusively, which
keeps the generated data usable for tagger training as well.
"""

from __future__ import annotations

import random

from .corpus import Document, RhetoricalRole, attach_roles, parse_document
from .errors import ConfigError

MIN_DOCS = 20

MARKER_POSITIVE = "granted-marker"
MARKER_NEGATIVE = "dismissed-marker"
DISTRACTOR_RATE = 0.2

_TRAIN_FRACTION = 0.70
_DEV_FRACTION = 0.15

_VOCAB = {
    "place": ("Rampur", "Nagpur", "Salem", "Kanpur", "Indore"),
    "spot": ("canal", "bridge", "field", "market", "godown"),
    "time": ("morning", "evening", "night"),
    "object": ("land", "decree", "notice", "deed", "tenancy", "vehicle"),
    "party": ("appellant", "respondent", "petitioner", "accused"),
    "month": ("January", "March", "June", "August", "November"),
}

# One template list per role; each template uses cue words from its own
# role's lexicon only, so cue features stay separable.
_TEMPLATES: dict[RhetoricalRole, tuple[str, ...]] = {
    RhetoricalRole.FACT: (
        "The complainant filed a report at the {place} police station on {day} {month} {year}.",
        "The incident occurred near the {spot} in the {time}.",
        "A fir was lodged against the accused at the {place} station.",
        "The deceased was taken from the {spot} after the incident.",
        "An agreement for the {object} was executed between the parties.",
        "The parties married in {year} and kept the property jointly.",
    ),
    RhetoricalRole.ISSUE: (
        "Whether the {object} stands proved is the question.",
        "The issue arises from the order under challenge.",
        "The point requires consideration on the present record.",
    ),
    RhetoricalRole.ARGUMENT: (
        "Learned counsel contended that the {object} was invalid.",
        "Counsel for the {party} argued that the charge must fail.",
        "It was submitted that the {party} had no proper notice.",
        "Counsel urged that the delay was fatal to the claim.",
    ),
    RhetoricalRole.STATUTE: (
        "Section {num} of the penal code governs the charge.",
        "Article {num} of the constitution controls the field.",
        "The rule framed under the act binds the parties.",
        "The provision requires prior sanction from the state.",
    ),
    RhetoricalRole.PRECEDENT: (
        "The bench relied on the ruling in AIR {year} SC {num}.",
        "The decision reported in {vol} SCC {num} was followed.",
        "An earlier decision was cited and distinguished on the facts.",
    ),
    RhetoricalRole.RATIO: (
        "The bench held that the evidence satisfied the legal test.",
        "In this view the charge therefore stands proved.",
        "The bench considered the record and found the plea good.",
        "In the opinion of the bench the delay stood explained.",
    ),
    RhetoricalRole.RULING_LOWER: (
        "The sessions judge convicted the accused on every count.",
        "The magistrate acquitted the {party} of the main charge.",
        "The tribunal sentenced the accused to two years.",
    ),
    RhetoricalRole.NONE: (
        "The record runs to several hundred pages.",
        "The paper book was prepared in good time.",
        "The registry listed the matter for the {month} board.",
    ),
}

_RULING_PRESENT_BY_LABEL = {
    1: (
        "The appeal is allowed and the conviction is quashed.",
        "The petition is allowed and the impugned order is set aside.",
    ),
    0: (
        "The appeal is dismissed with no order as to costs.",
        "The petition is dismissed and the impugned order stands.",
    ),
}


def _fill(rng: random.Random, template: str) -> str:
    values = {name: rng.choice(options) for name, options in _VOCAB.items()}
    # Numbers come from small fixed pools: documents must share their
    # filler vocabulary, otherwise idiosyncratic tokens become stronger
    # (memorizable) signals than the planted markers.
    values["day"] = rng.choice((4, 9, 14, 21, 26))
    values["year"] = rng.choice((1957, 1964, 1971, 1983, 1992))
    values["num"] = rng.choice((12, 34, 57, 149, 302))
    values["vol"] = rng.choice((2, 4, 7))
    return template.format(**values)


def _sample_roles(rng: random.Random) -> list[RhetoricalRole]:
    counts = [
        (RhetoricalRole.FACT, rng.randint(4, 10)),
        (RhetoricalRole.ISSUE, rng.randint(1, 2)),
        (RhetoricalRole.ARGUMENT, rng.randint(2, 6)),
        (RhetoricalRole.STATUTE, rng.randint(1, 4)),
        (RhetoricalRole.PRECEDENT, rng.randint(1, 4)),
        (RhetoricalRole.RATIO, rng.randint(2, 6)),
        (RhetoricalRole.RULING_LOWER, rng.randint(1, 2)),
    ]
    roles: list[RhetoricalRole] = []
    for role, n in counts:
        roles.extend([role] * n)
    # Keep totals inside 15..40 including the final ruling sentence.
    while len(roles) < 14:
        roles.insert(0, RhetoricalRole.FACT)
    for _ in range(rng.randint(0, 3)):
        roles.insert(rng.randrange(len(roles) + 1), RhetoricalRole.NONE)
    roles.append(RhetoricalRole.RULING_PRESENT)
    return roles


def _insert_token(rng: random.Random, text: str, token: str) -> str:
    words = text[:-1].split()
    pos = rng.randint(1, len(words) - 1)
    words.insert(pos, token)
    return " ".join(words) + "."


def generate_planted_corpus(
    n_docs: int, seed: int
) -> tuple[list[Document], dict[str, list[RhetoricalRole]]]:
    """Generate labeled documents plus a gold role sidecar.

    Returns documents with roles already attached; the sidecar carries
    the same roles keyed by document id for serialization.
    """
    if n_docs < MIN_DOCS:
        raise ConfigError(f"n_docs must be >= {MIN_DOCS}, got {n_docs}")
    rng = random.Random(seed)
    n_train = int(n_docs * _TRAIN_FRACTION)
    n_dev = int(n_docs * _DEV_FRACTION)
    docs: list[Document] = []
    sidecar: dict[str, list[RhetoricalRole]] = {}
    for i in range(n_docs):
        label = 1 if i % 2 == 0 else 0
        marker = MARKER_POSITIVE if label == 1 else MARKER_NEGATIVE
        distractor = MARKER_NEGATIVE if label == 1 else MARKER_POSITIVE
        roles = _sample_roles(rng)
        texts = []
        for role in roles:
            if role is RhetoricalRole.RULING_PRESENT:
                texts.append(rng.choice(_RULING_PRESENT_BY_LABEL[label]))
            else:
                texts.append(_fill(rng, rng.choice(_TEMPLATES[role])))
        fact_positions = [j for j, r in enumerate(roles) if r is RhetoricalRole.FACT]
        cue_pos = rng.choice(fact_positions)
        texts[cue_pos] = _insert_token(rng, texts[cue_pos], marker)
        for j, role in enumerate(roles):
            if role is not RhetoricalRole.FACT and rng.random() < DISTRACTOR_RATE:
                texts[j] = _insert_token(rng, texts[j], distractor)
        if i < n_train:
            split = "train"
        elif i < n_train + n_dev:
            split = "dev"
        else:
            split = "test"
        doc_id = f"synthetic-{i:04d}"
        doc = parse_document(
            " ".join(texts),
            doc_id,
            label=label,
            split=split,
            meta={"cue_sentence": str(cue_pos)},
        )
        doc = attach_roles(doc, roles)
        docs.append(doc)
        sidecar[doc_id] = list(roles)
    return docs, sidecar
