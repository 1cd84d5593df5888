"""Serving the pipeline over HTTP: tag, predict, summarize, explain.

The service wraps one trained predictor and one trained tagger behind a
small JSON API. This demo trains both on synthetic data, saves them the
way the CLI would, boots the real server on a local port, and walks the
endpoints with plain urllib, including a what-if request that excludes
the cue sentence.

Run: python3 demos/08_service_api.py
"""

import json
import tempfile
import threading
import time
import urllib.request
from pathlib import Path

import uvicorn

from factverdict.pipeline import InputSelection, PipelineConfig
from factverdict.predictor import EncoderConfig, TrainConfig, train
from factverdict.roles import train_tagger
from factverdict.service import ServiceConfig, build_app
from factverdict.synthetic import generate_planted_corpus

BASE = "http://127.0.0.1:8741"


def call(path: str, payload: dict | None = None) -> dict:
    if payload is None:
        request = urllib.request.Request(BASE + path)
    else:
        request = urllib.request.Request(
            BASE + path,
            data=json.dumps(payload).encode(),
            headers={"Content-Type": "application/json"},
        )
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read())


# --- 1. train and save both models -------------------------------------------

docs, sidecar = generate_planted_corpus(150, seed=5)
predictor = train(
    docs,
    PipelineConfig(selection=InputSelection.FACTS_ONLY),
    TrainConfig(lr=10.0, momentum=0.9, epochs=40, batch_size=16, seed=0,
                early_stop_patience=6, attention_dim=32),
    EncoderConfig(dim=1024),
)
tagger = train_tagger(
    [(d, sidecar[d.id]) for d in docs if d.split == "train"], epochs=3, seed=0,
)

workdir = Path(tempfile.mkdtemp(prefix="factverdict-demo-"))
predictor.save(workdir / "model.npz")
tagger.save(workdir / "tagger.json")

# --- 2. boot the real server ---------------------------------------------------

config = ServiceConfig(
    model_path=str(workdir / "model.npz"),
    tagger_path=str(workdir / "tagger.json"),
    bind_address="127.0.0.1:8741",
)
server = uvicorn.Server(uvicorn.Config(
    build_app(config), host="127.0.0.1", port=8741, log_level="error",
))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

health = call("/api/health")
print(f"server up: {health}")

# --- 3. walk the endpoints ------------------------------------------------------

example = next(d for d in docs if d.split == "test")
text = " ".join(s.text for s in example.sentences)

tagged = call("/api/tag", {"text": text})
print(f"\n/api/tag on {example.id}: {len(tagged['sentences'])} sentences")
for row in tagged["sentences"][:4]:
    print(f"  [{row['index']}] {row['role']:16s} {row['text'][:56]}")

base = call("/api/predict", {"text": text, "input_selection": "factsOnly"})
print(f"\n/api/predict: label {base['label']}, p = {base['p']:.4f}, "
      f"used {len(base['used_sentences'])} sentences")

cue = next(i for i, s in enumerate(example.sentences) if "-marker" in " ".join(s.tokens))
whatif = call("/api/predict", {
    "text": text, "input_selection": "factsOnly", "what_if_excluded": [cue],
})
print(f"what-if without the cue sentence {cue}: p {base['p']:.4f} -> {whatif['p']:.4f}")

summary = call("/api/summarize", {
    "text": text, "spec": {"scheme": "variation1", "budget_words": 40, "quotas": {}},
})
print(f"\n/api/summarize picked sentences {summary['selected']} "
      f"(objective {summary['objective']:.1f})")

explanation = call("/api/explain", {"text": text, "k": 2})
print(f"\n/api/explain top sentences: "
      f"{[(r['sentence'], round(r['delta'], 4)) for r in explanation['ranked']]}")

schemes = call("/api/schemes")
print(f"\n/api/schemes serves {sorted(schemes['schemes'])}")

server.should_exit = True
thread.join(timeout=5)
print("\nserver stopped")
