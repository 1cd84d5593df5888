"""Rhetorical role tagging with an averaged structured perceptron.

Every sentence in a judgment plays a functional role: Fact, Issue,
Argument, Statute, Precedent, RatioOfDecision, RulingByLowerCourt,
RulingByPresentCourt, or None. The tagger is a linear-chain model
decoded with Viterbi, trained with an averaged structured perceptron on
gold role sequences.

Run: python3 demos/02_role_tagging.py
"""

from factverdict.corpus import strip_outcome
from factverdict.roles import tag, train_tagger, zero_model
from factverdict.synthetic import generate_planted_corpus

# --- 1. a labeled corpus ---------------------------------------------------

# The bundled generator plants gold roles on every sentence, which makes
# it a convenient supervision source for this walkthrough.
docs, sidecar = generate_planted_corpus(60, seed=11)
train_docs = [d for d in docs if d.split == "train"]
test_docs = [d for d in docs if d.split == "test"]
labeled = [(d, sidecar[d.id]) for d in train_docs]
print(f"{len(train_docs)} training documents, {len(test_docs)} held out")

# --- 2. before training: the zero model -----------------------------------

# With all-zero weights every sentence decodes to the first role (ties
# break toward the lower enum index), a useful floor to compare against.
example = test_docs[0]
blank = tag(example, zero_model())
print(f"\nzero model on {example.id}: {sorted(set(r.value for r in blank.roles))}")

# --- 3. train and inspect --------------------------------------------------

model = train_tagger(labeled, epochs=3, seed=0)
sequence = tag(example, model)
gold = sidecar[example.id]
print(f"\ntrained tagger on {example.id}:")
for sent, predicted, expected in zip(example.sentences, sequence.roles, gold):
    mark = " " if predicted is expected else "!"
    print(f" {mark} {predicted.value:22s} (gold {expected.value:22s}) {sent.text[:52]}")

# --- 4. token accuracy on the held-out split -------------------------------

total = correct = 0
for doc in test_docs:
    predicted = tag(doc, model).roles
    for got, expected in zip(predicted, sidecar[doc.id]):
        total += 1
        correct += got is expected
print(f"\nheld-out sentence accuracy: {correct}/{total} = {correct / total:.3f}")

# --- 5. stripping the outcome ----------------------------------------------

# Verdict prediction must not see the court's own ruling sentences.
# strip_outcome removes RulingByPresentCourt before the predictor runs.
view = strip_outcome(example, list(sequence.roles))
print(f"\nstrip_outcome kept {len(view.indices)} of {len(example.sentences)} sentences")
dropped = set(range(len(example.sentences))) - set(view.indices)
for i in sorted(dropped):
    print(f"  dropped [{i}] {example.sentences[i].text[:60]}")
