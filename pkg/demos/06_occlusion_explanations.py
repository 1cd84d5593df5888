"""Explaining a verdict by occlusion, and asking what-if questions.

An occlusion explanation removes one selected sentence at a time, reruns
the predictor, and reports how much the probability moved. Sentences
whose removal drags the prediction toward the opposite verdict are the
ones carrying the signal. The same machinery answers interactive
what-if questions: what would the model say without sentences 2 and 5?

Run: python3 demos/06_occlusion_explanations.py
"""

from factverdict.explainer import explain
from factverdict.pipeline import InputSelection, PipelineConfig, exclude_sentences
from factverdict.predictor import EncoderConfig, TrainConfig, forward, train
from factverdict.synthetic import generate_planted_corpus

# --- 1. train a predictor on facts only --------------------------------------

docs, sidecar = generate_planted_corpus(150, seed=5)
pipeline = PipelineConfig(selection=InputSelection.FACTS_ONLY)
model = train(
    docs,
    pipeline,
    TrainConfig(lr=10.0, momentum=0.9, epochs=40, batch_size=16, seed=0,
                early_stop_patience=6, attention_dim=32),
    EncoderConfig(dim=1024),
)
example = next(d for d in docs if d.split == "test")

# --- 2. rank sentences by influence -------------------------------------------

explanation = explain(example, model, pipeline, k=3)
base = explanation.base
print(f"{example.id}: label {base.label}, p = {base.p:.4f}")
print("\nmost influential sentences (positive delta supports the verdict):")
for index, delta in explanation.signed_deltas():
    print(f"  [{index}] delta {delta:+.4f} | {example.sentences[index].text[:64]}")

# --- 3. what-if: remove the top sentence ---------------------------------------

top = explanation.ranked[0][0]
view = exclude_sentences(example, [top])
sub_roles = [sidecar[example.id][j] for j in view.indices]
without = forward(view.to_document(), model,
                  PipelineConfig(selection=InputSelection.FACTS_ONLY, fallback_to_full=False),
                  roles=sub_roles)
print(f"\nwithout sentence {top}: p {base.p:.4f} -> {without.p:.4f}"
      f"{'  (label flips)' if without.label != base.label else ''}")

# --- 4. the cue sentence is the explanation ------------------------------------

# The generator plants the verdict cue inside one Fact sentence; the
# occlusion ranking should put that sentence first.
cue = next(i for i, s in enumerate(example.sentences) if "-marker" in " ".join(s.tokens))
print(f"\nplanted cue lives in sentence {cue}; occlusion ranked sentence {top} first")
