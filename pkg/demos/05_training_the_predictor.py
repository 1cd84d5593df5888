"""Training the hierarchical attention predictor from scratch.

The verdict classifier encodes each chunk as a hashed bag of n-grams,
pools chunks with learned tanh attention, and reads out a probability
for label 1 (verdict favors the appellant). Training is plain
minibatch SGD with momentum on analytic gradients; no framework, no
autograd, every update derived by hand and checked against finite
differences in the test suite.

Run: python3 demos/05_training_the_predictor.py
"""

from factverdict.pipeline import InputSelection, PipelineConfig
from factverdict.predictor import EncoderConfig, TrainConfig, forward, train
from factverdict.synthetic import generate_planted_corpus

# --- 1. corpus with a plantable signal --------------------------------------

# The generator buries a verdict cue inside one Fact sentence per
# document and sprinkles misleading copies of the opposite cue in
# non-Fact sentences, so facts-only inputs are cleaner than the full text.
docs, _ = generate_planted_corpus(150, seed=5)
for split in ("train", "dev", "test"):
    n = sum(1 for d in docs if d.split == split)
    print(f"{split:5s}: {n} documents")

# --- 2. train ----------------------------------------------------------------

pipeline = PipelineConfig(selection=InputSelection.FACTS_ONLY)
train_cfg = TrainConfig(
    lr=10.0, momentum=0.9, epochs=40, batch_size=16, seed=0,
    early_stop_patience=6, attention_dim=32,
)
model = train(docs, pipeline, train_cfg, EncoderConfig(dim=1024))

meta = model.train_meta
print(f"\nran {meta['epochs_run']} epochs, kept the weights from epoch {meta['best_epoch']}")
print("dev macro-F1 by epoch:")
for epoch, f1 in enumerate(meta["dev_f1_history"]):
    bar = "#" * round(40 * f1)
    best = "  <- kept" if epoch == meta["best_epoch"] else ""
    print(f"  {epoch:2d} {f1:.3f} {bar}{best}")

# --- 3. predict ----------------------------------------------------------------

test_docs = [d for d in docs if d.split == "test"]
correct = 0
for doc in test_docs:
    result = forward(doc, model, pipeline)
    correct += result.label == doc.label
print(f"\nheld-out accuracy: {correct}/{len(test_docs)}")

example = test_docs[0]
result = forward(example, model, pipeline)
print(f"\n{example.id}: label {result.label} (gold {example.label}), p = {result.p:.4f}")
print(f"selection {result.input_selection!r} kept sentences {result.used_sentences}")
print(f"attention over {len(result.alpha)} chunk(s): "
      f"{[round(a, 3) for a in result.alpha]}")
