"""Hierarchical verdict classifier over chunked documents.

Architecture: each chunk of the resolved input is encoded to a fixed
D-vector (built-in encoder: seeded 64-bit FNV-1a hashed n-gram counts,
L2-normalized); additive attention pools the m chunk vectors into one
document vector; a sigmoid readout produces p = P(label = 1), with
label 1 meaning the verdict favors the appellant/petitioner:

    t_i = tanh(W u_i + b)          W: A x D, b: A
    s_i = v . t_i                  v: A
    alpha = softmax(s - max s)
    d = sum_i alpha_i u_i
    p = sigmoid(w . d + c)         w: D, c: scalar
    label = [p >= 0.5]

Training minimizes mean binary cross-entropy with analytic gradients
(encoder vectors are constants) by SGD with momentum, early-stopped on
dev macro-F1. Everything is deterministic given the seed.

Model files are .npz archives with a JSON meta entry and explicit
parameter arrays.
"""

from __future__ import annotations

import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .chunker import chunk_token_slices
from .corpus import Document
from .errors import (
    ConfigError,
    DataError,
    DimensionMismatchError,
    EmptyChunkError,
    EmptySplitError,
)
from .metrics import evaluate
from .pipeline import (
    PipelineConfig,
    ResolvedInput,
    resolve_input,
    roles_for,
    technique_number,
)

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
_U64 = (1 << 64) - 1

DEFAULT_DIM = 4096
DEFAULT_NGRAM_MAX = 2
DEFAULT_ATTENTION_DIM = 64

PROB_CLIP = 1e-12


@dataclass(frozen=True)
class EncoderConfig:
    kind: str = "hashed_ngram"
    dim: int = DEFAULT_DIM
    ngram_max: int = DEFAULT_NGRAM_MAX
    hash_seed: int = 0

    def __post_init__(self):
        if self.kind not in ENCODERS:
            raise ConfigError(
                f"unknown encoder kind {self.kind!r}; registered: {sorted(ENCODERS)}"
            )
        if not (isinstance(self.dim, int) and self.dim >= 1 and self.dim & (self.dim - 1) == 0):
            raise ConfigError(f"encoder dim must be a power of two, got {self.dim!r}")
        if self.ngram_max not in (1, 2, 3):
            raise ConfigError(f"ngram_max must be 1, 2 or 3, got {self.ngram_max!r}")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "ngram_max": self.ngram_max,
            "hash_seed": self.hash_seed,
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "EncoderConfig":
        try:
            return cls(
                kind=obj.get("kind", "hashed_ngram"),
                dim=obj["dim"],
                ngram_max=obj["ngram_max"],
                hash_seed=obj.get("hash_seed", 0),
            )
        except KeyError as exc:
            raise ConfigError(f"encoder config missing key {exc}") from exc


def _fnv1a(data: bytes, seed: int) -> int:
    h = FNV_OFFSET
    for byte in seed.to_bytes(8, "little", signed=False):
        h ^= byte
        h = (h * FNV_PRIME) & _U64
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _U64
    return h


def encode_chunk(tokens: Sequence[str], cfg: EncoderConfig) -> np.ndarray:
    """Seeded hashed n-gram count vector, L2-normalized.

    Never all-zero for a non-empty chunk: every token contributes at
    least its unigram bucket.
    """
    if not tokens:
        raise EmptyChunkError("cannot encode an empty chunk")
    lowered = [t.lower() for t in tokens]
    vec = np.zeros(cfg.dim)
    mask = cfg.dim - 1
    seed = cfg.hash_seed & _U64
    for n in range(1, cfg.ngram_max + 1):
        for i in range(len(lowered) - n + 1):
            gram = "\x1f".join(lowered[i : i + n])
            vec[_fnv1a(gram.encode("utf-8"), seed) & mask] += 1.0
    return vec / np.linalg.norm(vec)


Encoder = Callable[[Sequence[str], EncoderConfig], np.ndarray]

ENCODERS: dict[str, Encoder] = {}


def register_encoder(kind: str, fn: Encoder) -> None:
    """Plug in an alternative chunk encoder under a new kind name."""
    ENCODERS[kind] = fn


ENCODERS["hashed_ngram"] = encode_chunk


def encode_chunks(chunks: Sequence[Sequence[str]], cfg: EncoderConfig) -> np.ndarray:
    """Stack chunk vectors into an m x D matrix."""
    encoder = ENCODERS[cfg.kind]
    return np.stack([encoder(c, cfg) for c in chunks])


@dataclass(frozen=True)
class PredictorModel:
    encoder: EncoderConfig
    W: np.ndarray  # A x D attention projection
    v: np.ndarray  # A attention vector
    b: np.ndarray  # A attention bias
    w: np.ndarray  # D readout weights
    c: float  # readout bias
    train_meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        a_dim, d_dim = self.W.shape
        if self.v.shape != (a_dim,) or self.b.shape != (a_dim,):
            raise DimensionMismatchError("attention vector/bias must match W rows")
        if self.w.shape != (d_dim,):
            raise DimensionMismatchError("readout weights must match W columns")
        if d_dim != self.encoder.dim:
            raise DimensionMismatchError(
                f"W columns ({d_dim}) must equal encoder dim ({self.encoder.dim})"
            )
        for arr in (self.W, self.v, self.b, self.w):
            if not np.all(np.isfinite(arr)):
                raise ConfigError("model parameters must be finite")
        if not np.isfinite(self.c):
            raise ConfigError("model parameters must be finite")

    @property
    def attention_dim(self) -> int:
        return self.W.shape[0]

    def save(self, path: str | Path) -> None:
        meta = json.dumps(
            {
                "format": "factverdict-predictor",
                "version": 1,
                "encoder": self.encoder.to_json_dict(),
                "train_meta": dict(self.train_meta),
            }
        )
        with open(path, "wb") as handle:
            np.savez(
                handle,
                meta=np.frombuffer(meta.encode("utf-8"), dtype=np.uint8),
                W=self.W, v=self.v, b=self.b, w=self.w, c=np.array(self.c),
            )

    @classmethod
    def load(cls, path: str | Path) -> "PredictorModel":
        try:
            archive = np.load(path)
        except (OSError, ValueError, zipfile.BadZipFile) as exc:
            raise ConfigError(f"cannot read model file {path}: {exc}") from exc
        with archive:
            try:
                meta = json.loads(bytes(archive["meta"]).decode("utf-8"))
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"not a predictor model file: {path}") from exc
            if meta.get("format") != "factverdict-predictor":
                raise ConfigError("not a predictor model file")
            if meta.get("version") != 1:
                raise ConfigError(f"unsupported model version {meta.get('version')!r}")
            return cls(
                encoder=EncoderConfig.from_json_dict(meta["encoder"]),
                W=archive["W"], v=archive["v"], b=archive["b"], w=archive["w"],
                c=float(archive["c"]),
                train_meta=meta.get("train_meta", {}),
            )


def init_model(
    encoder: EncoderConfig,
    attention_dim: int = DEFAULT_ATTENTION_DIM,
    seed: int = 0,
) -> PredictorModel:
    """Uniform(-0.05, 0.05) initialization, parameter order W, v, b, w, c."""
    rng = np.random.default_rng(seed)
    scale = 0.05
    return PredictorModel(
        encoder=encoder,
        W=rng.uniform(-scale, scale, size=(attention_dim, encoder.dim)),
        v=rng.uniform(-scale, scale, size=attention_dim),
        b=rng.uniform(-scale, scale, size=attention_dim),
        w=rng.uniform(-scale, scale, size=encoder.dim),
        c=float(rng.uniform(-scale, scale)),
        train_meta={"seed": seed},
    )


def attention_pool(
    U: np.ndarray, W: np.ndarray, b: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Additive attention over chunk vectors: returns (d, alpha)."""
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] < 1:
        raise DimensionMismatchError("U must be a non-empty m x D matrix")
    if W.shape[1] != U.shape[1]:
        raise DimensionMismatchError(
            f"W columns ({W.shape[1]}) must equal chunk dim ({U.shape[1]})"
        )
    t = np.tanh(U @ W.T + b)
    s = t @ v
    e = np.exp(s - np.max(s))
    alpha = e / e.sum()
    d = alpha @ U
    return d, alpha


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


@dataclass(frozen=True)
class PredictionResult:
    label: int
    p: float
    alpha: tuple[float, ...]
    input_selection: str
    technique: int
    used_sentences: tuple[int, ...]
    fallback_used: bool = False

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "alpha": list(self.alpha),
            "input_selection": self.input_selection,
            "technique": self.technique,
            "used_sentences": list(self.used_sentences),
            "fallback_used": self.fallback_used,
        }


def forward_chunks(U: np.ndarray, model: PredictorModel) -> tuple[float, np.ndarray]:
    """Probability and attention weights for pre-encoded chunk vectors."""
    d, alpha = attention_pool(U, model.W, model.b, model.v)
    p = _sigmoid(float(model.w @ d) + model.c)
    return min(max(p, PROB_CLIP), 1.0 - PROB_CLIP), alpha


def forward(
    doc: Document,
    model: PredictorModel,
    cfg: PipelineConfig,
    roles=None,
    resolved: ResolvedInput | None = None,
) -> PredictionResult:
    """Run the full pipeline on one document.

    roles default to the document's attached roles (all None when absent);
    a pre-computed ResolvedInput skips selection.
    """
    if resolved is None:
        if roles is None:
            roles = roles_for(doc)
        resolved = resolve_input(doc, roles, cfg)
    tokens = resolved.tokens()
    chunks = chunk_token_slices(tokens, cfg.chunking)
    U = encode_chunks(chunks, model.encoder)
    p, alpha = forward_chunks(U, model)
    return PredictionResult(
        label=int(p >= 0.5),
        p=p,
        alpha=tuple(float(a) for a in alpha),
        input_selection=resolved.selection.value,
        technique=technique_number(cfg.chunking),
        used_sentences=resolved.used_sentences,
        fallback_used=resolved.fallback_used,
    )


@dataclass
class Gradients:
    W: np.ndarray
    v: np.ndarray
    b: np.ndarray
    w: np.ndarray
    c: float


def bce_loss(p: float, y: int) -> float:
    return -(y * np.log(p) + (1 - y) * np.log(1.0 - p))


def grad_from_chunks(
    batch: Sequence[tuple[np.ndarray, int]], model: PredictorModel
) -> tuple[Gradients, float]:
    """Mean BCE loss and analytic gradients for pre-encoded examples.

    Encoder vectors are constants; gradients flow through the sigmoid
    readout, attention pooling, softmax, and tanh projection only.
    """
    if not batch:
        raise DataError("gradient batch must be non-empty")
    gW = np.zeros_like(model.W)
    gv = np.zeros_like(model.v)
    gb = np.zeros_like(model.b)
    gw = np.zeros_like(model.w)
    gc = 0.0
    loss = 0.0
    for U, y in batch:
        if y not in (0, 1):
            raise DataError(f"labels must be 0 or 1, got {y!r}")
        t = np.tanh(U @ model.W.T + model.b)  # m x A
        s = t @ model.v  # m
        e = np.exp(s - np.max(s))
        alpha = e / e.sum()
        d = alpha @ U  # D
        p = _sigmoid(float(model.w @ d) + model.c)
        p = min(max(p, PROB_CLIP), 1.0 - PROB_CLIP)
        loss += bce_loss(p, y)

        g = p - y  # dL/dz through the sigmoid
        gc += g
        gw += g * d
        dLdd = g * model.w  # D
        dLdalpha = U @ dLdd  # m
        inner = float(alpha @ dLdalpha)
        dLds = alpha * (dLdalpha - inner)  # softmax jacobian
        gv += t.T @ dLds
        dLdt = np.outer(dLds, model.v)  # m x A
        dLda = dLdt * (1.0 - t * t)  # through tanh
        gW += dLda.T @ U
        gb += dLda.sum(axis=0)
    m = len(batch)
    return Gradients(W=gW / m, v=gv / m, b=gb / m, w=gw / m, c=gc / m), loss / m


def grad(
    batch: Sequence[tuple[Document, int]], model: PredictorModel, cfg: PipelineConfig
) -> tuple[Gradients, float]:
    """Gradient of mean BCE over (document, label) pairs."""
    encoded = []
    for doc, y in batch:
        resolved = resolve_input(doc, roles_for(doc), cfg)
        chunks = chunk_token_slices(resolved.tokens(), cfg.chunking)
        encoded.append((encode_chunks(chunks, model.encoder), y))
    return grad_from_chunks(encoded, model)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.1
    momentum: float = 0.9
    epochs: int = 30
    batch_size: int = 16
    seed: int = 0
    early_stop_patience: int | None = 5
    attention_dim: int = DEFAULT_ATTENTION_DIM

    def __post_init__(self):
        if self.lr < 0 or not 0 <= self.momentum < 1:
            raise ConfigError("need lr >= 0 and 0 <= momentum < 1")
        if self.epochs < 1 or self.batch_size < 1 or self.attention_dim < 1:
            raise ConfigError("epochs, batch_size and attention_dim must be >= 1")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ConfigError("early_stop_patience must be >= 1 or None")


def _prepared(docs: Sequence[Document], cfg: PipelineConfig, encoder: EncoderConfig):
    out = []
    for doc in docs:
        if doc.label is None:
            raise DataError(f"document {doc.id!r} has no label")
        resolved = resolve_input(doc, roles_for(doc), cfg)
        chunks = chunk_token_slices(resolved.tokens(), cfg.chunking)
        out.append((encode_chunks(chunks, encoder), doc.label))
    return out


def train(
    docs: Sequence[Document],
    pipeline_cfg: PipelineConfig,
    train_cfg: TrainConfig = TrainConfig(),
    encoder: EncoderConfig = EncoderConfig(),
) -> PredictorModel:
    """SGD with momentum over the train split, early-stopped on dev macro-F1.

    Keeps the best-dev parameters. With early_stop_patience=None and no
    dev split, returns the final-epoch parameters instead.
    """
    train_docs = [d for d in docs if d.split == "train"]
    dev_docs = [d for d in docs if d.split == "dev"]
    if not train_docs:
        raise EmptySplitError("train split is empty")
    if not dev_docs and train_cfg.early_stop_patience is not None:
        raise EmptySplitError("dev split is empty but early stopping is enabled")

    train_data = _prepared(train_docs, pipeline_cfg, encoder)
    dev_data = _prepared(dev_docs, pipeline_cfg, encoder)
    dev_golds = [y for _, y in dev_data]

    rng = np.random.default_rng(train_cfg.seed)
    scale = 0.05
    a_dim, d_dim = train_cfg.attention_dim, encoder.dim
    params = {
        "W": rng.uniform(-scale, scale, size=(a_dim, d_dim)),
        "v": rng.uniform(-scale, scale, size=a_dim),
        "b": rng.uniform(-scale, scale, size=a_dim),
        "w": rng.uniform(-scale, scale, size=d_dim),
        "c": np.array(rng.uniform(-scale, scale)),
    }
    velocity = {k: np.zeros_like(p) for k, p in params.items()}

    def snapshot_model(meta: Mapping) -> PredictorModel:
        return PredictorModel(
            encoder=encoder,
            W=params["W"].copy(), v=params["v"].copy(), b=params["b"].copy(),
            w=params["w"].copy(), c=float(params["c"]),
            train_meta=dict(meta),
        )

    def dev_f1() -> float:
        if not dev_data:
            return 0.0
        preds = []
        model = snapshot_model({})
        for U, _ in dev_data:
            p, _ = forward_chunks(U, model)
            preds.append(int(p >= 0.5))
        return evaluate(preds, dev_golds).f1

    history: list[float] = []
    best_f1 = -1.0
    best_epoch = -1
    best_params = None
    epochs_run = 0
    for epoch in range(train_cfg.epochs):
        order = rng.permutation(len(train_data))
        for start in range(0, len(order), train_cfg.batch_size):
            batch = [train_data[i] for i in order[start : start + train_cfg.batch_size]]
            grads, _ = grad_from_chunks(batch, snapshot_model({}))
            for key, g in (("W", grads.W), ("v", grads.v), ("b", grads.b),
                           ("w", grads.w), ("c", np.array(grads.c))):
                velocity[key] = train_cfg.momentum * velocity[key] - train_cfg.lr * g
                params[key] = params[key] + velocity[key]
        epochs_run = epoch + 1
        if dev_data:
            f1 = dev_f1()
            history.append(f1)
            if f1 > best_f1:
                best_f1 = f1
                best_epoch = epoch
                best_params = {k: p.copy() for k, p in params.items()}
            elif (
                train_cfg.early_stop_patience is not None
                and epoch - best_epoch >= train_cfg.early_stop_patience
            ):
                break

    if best_params is not None:
        params = best_params
    meta = {
        "seed": train_cfg.seed,
        "lr": train_cfg.lr,
        "momentum": train_cfg.momentum,
        "batch_size": train_cfg.batch_size,
        "epochs_run": epochs_run,
        "best_epoch": best_epoch,
        "dev_f1": best_f1 if best_f1 >= 0 else None,
        "dev_f1_history": history,
        "pipeline": pipeline_cfg.to_json_dict(),
    }
    return snapshot_model(meta)
