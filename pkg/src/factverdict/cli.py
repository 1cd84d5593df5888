"""Command-line interface.

One subcommand per pipeline stage: ingest, mask, tag, summarize, chunk,
train, predict, explain, eval, grid, gen-synthetic, serve. Results go to
--out when given, stdout otherwise; diagnostics go to stderr. Exit codes:
0 ok, 2 configuration error, 3 data error.

The --config file is a single JSON object with optional sections:
"pipeline", "encoder", "train", "tagger", "summary", "chunking", "grid"
and "service", each following the schema of the module it configures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

from .chunker import chunk_spans, config_from_json
from .corpus import (
    Document,
    RhetoricalRole,
    attach_roles,
    corpus_to_jsonl,
    find_entity_spans,
    load_corpus,
    load_entity_sidecar,
    load_role_sidecar,
    mask_entities,
    save_corpus,
)
from .errors import ConfigError, DataError
from .explainer import explain
from .grid import FULL_GRID, emit_report, grid_spec_from_json, run_grid
from .metrics import evaluate
from .pipeline import PipelineConfig, pipeline_config_from_json, roles_for
from .predictor import (
    DEFAULT_ATTENTION_DIM,
    DEFAULT_DIM,
    DEFAULT_NGRAM_MAX,
    EncoderConfig,
    PredictorModel,
    TrainConfig,
    forward,
    train,
)
from .roles import TaggerModel, tag, train_tagger, zero_model
from .summarizer import (
    DEFAULT_LAMBDA,
    DEFAULT_QUOTAS,
    SummarySpec,
    default_budget,
    scheme_from_value,
    summarize,
)
from .synthetic import generate_planted_corpus

_CONFIG_SECTIONS = (
    "pipeline",
    "encoder",
    "train",
    "tagger",
    "summary",
    "chunking",
    "grid",
    "service",
)


# --- config plumbing ----------------------------------------------------------

def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        payload = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        obj = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(obj) - set(_CONFIG_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown config sections: {unknown}")
    for key, section in obj.items():
        if not isinstance(section, dict):
            raise ConfigError(f"config section {key!r} must be a JSON object")
    return obj


def _section(config: Mapping, name: str) -> Mapping:
    return config.get(name, {})


def _get_num(obj: Mapping, key: str, default, *, integer: bool = False):
    value = obj.get(key, default)
    if value is None:
        return None
    wanted = int if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, wanted):
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"'{key}' must be {kind}, got {value!r}")
    return value


def encoder_from_config(obj: Mapping) -> EncoderConfig:
    kind = obj.get("kind", "hashed_ngram")
    if not isinstance(kind, str):
        raise ConfigError("encoder 'kind' must be a string")
    return EncoderConfig(
        kind=kind,
        dim=_get_num(obj, "dim", DEFAULT_DIM, integer=True),
        ngram_max=_get_num(obj, "ngram_max", DEFAULT_NGRAM_MAX, integer=True),
        hash_seed=_get_num(obj, "hash_seed", 0, integer=True),
    )


def train_config_from_config(obj: Mapping, seed_override: int | None) -> TrainConfig:
    defaults = TrainConfig()
    patience = defaults.early_stop_patience
    if "early_stop_patience" in obj:
        patience = _get_num(obj, "early_stop_patience", None, integer=True)
    seed = _get_num(obj, "seed", defaults.seed, integer=True)
    if seed_override is not None:
        seed = seed_override
    return TrainConfig(
        lr=float(_get_num(obj, "lr", defaults.lr)),
        momentum=float(_get_num(obj, "momentum", defaults.momentum)),
        epochs=_get_num(obj, "epochs", defaults.epochs, integer=True),
        batch_size=_get_num(obj, "batch_size", defaults.batch_size, integer=True),
        seed=seed,
        early_stop_patience=patience,
        attention_dim=_get_num(obj, "attention_dim", DEFAULT_ATTENTION_DIM, integer=True),
    )


# --- shared I/O helpers -------------------------------------------------------

def _read_corpus(path: str) -> list[Document]:
    try:
        return load_corpus(path)
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}") from exc


def _read_role_sidecar(path: str) -> dict[str, list[RhetoricalRole]]:
    try:
        return load_role_sidecar(path)
    except OSError as exc:
        raise ConfigError(f"cannot read role sidecar {path}: {exc}") from exc


def _read_tagger(path: str) -> TaggerModel:
    try:
        return TaggerModel.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read tagger model {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"tagger model {path} is not valid JSON: {exc.msg}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"tagger model {path} is malformed: {exc}") from exc


def _read_predictor(path: str) -> PredictorModel:
    try:
        return PredictorModel.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read model {path}: {exc}") from exc


def _with_roles(docs: Sequence[Document], args) -> list[Document]:
    """Attach roles from a sidecar or a tagger model; pass through otherwise."""
    roles_path = getattr(args, "roles", None)
    tagger_path = getattr(args, "tagger", None)
    if roles_path is not None:
        sidecar = _read_role_sidecar(roles_path)
        out = []
        for doc in docs:
            if doc.id not in sidecar:
                raise DataError(f"role sidecar has no entry for document {doc.id!r}")
            try:
                out.append(attach_roles(doc, sidecar[doc.id]))
            except ValueError as exc:
                raise DataError(str(exc)) from exc
        return out
    if tagger_path is not None:
        model = _read_tagger(tagger_path)
        return [attach_roles(doc, tag(doc, model).roles) for doc in docs]
    return list(docs)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc}") from exc


def _jsonl(records) -> str:
    lines = [json.dumps(r, ensure_ascii=False) for r in records]
    return "\n".join(lines) + ("\n" if lines else "")


def _info(message: str) -> None:
    print(message, file=sys.stderr)


# --- subcommands --------------------------------------------------------------

def cmd_ingest(args) -> int:
    docs = _read_corpus(args.corpus)
    _emit(corpus_to_jsonl(docs), args.out)
    _info(f"ingested {len(docs)} documents")
    return 0


def cmd_mask(args) -> int:
    docs = _read_corpus(args.corpus)
    if args.entities is not None:
        try:
            sidecar = load_entity_sidecar(args.entities)
        except OSError as exc:
            raise ConfigError(f"cannot read entity sidecar {args.entities}: {exc}") from exc
    else:
        sidecar = None
    masked = []
    total = 0
    for doc in docs:
        spans = find_entity_spans(doc) if sidecar is None else sidecar.get(doc.id, [])
        total += len(spans)
        masked.append(mask_entities(doc, spans))
    _emit(corpus_to_jsonl(masked), args.out)
    _info(f"masked {total} spans across {len(docs)} documents")
    return 0


def cmd_tag(args) -> int:
    docs = _read_corpus(args.corpus)
    model = _read_tagger(args.model) if args.model else zero_model()
    records = []
    for doc in docs:
        seq = tag(doc, model)
        records.append(
            {
                "id": doc.id,
                "roles": [r.value for r in seq.roles],
                "scores": list(seq.scores),
            }
        )
    _emit(_jsonl(records), args.out)
    return 0


def _summary_spec_for(doc: Document, section: Mapping) -> SummarySpec:
    scheme = scheme_from_value(section.get("scheme", "variation1"))
    budget = _get_num(section, "budget_words", None, integer=True)
    if budget is None:
        budget = default_budget(sum(len(s.tokens) for s in doc.sentences))
    if "quotas" in section:
        raw = section["quotas"]
        if not isinstance(raw, Mapping):
            raise ConfigError("'quotas' must be an object")
        try:
            quotas = {RhetoricalRole.from_string(k): v for k, v in raw.items()}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        quotas = dict(DEFAULT_QUOTAS)
    lam = float(_get_num(section, "lambda", DEFAULT_LAMBDA))
    return SummarySpec(scheme=scheme, budget_words=budget, quotas=quotas, lam=lam)


def cmd_summarize(args) -> int:
    config = load_config(args.config)
    section = _section(config, "summary")
    docs = _with_roles(_read_corpus(args.corpus), args)
    records = []
    for doc in docs:
        spec = _summary_spec_for(doc, section)
        summary = summarize(doc, roles_for(doc), spec)
        records.append(
            {
                "id": doc.id,
                "selected": list(summary.selected),
                "objective": summary.objective,
                "solver": summary.solver,
                "violated": summary.violated,
            }
        )
    _emit(_jsonl(records), args.out)
    return 0


def cmd_chunk(args) -> int:
    config = load_config(args.config)
    chunking = config_from_json(_section(config, "chunking"))
    docs = _read_corpus(args.corpus)
    records = []
    for doc in docs:
        total = sum(len(s.tokens) for s in doc.sentences)
        spans = chunk_spans(total, chunking)
        records.append(
            {
                "id": doc.id,
                "total_tokens": total,
                "chunks": [[c.start, c.end] for c in spans],
            }
        )
    _emit(_jsonl(records), args.out)
    return 0


def _save_model(model, path: str) -> None:
    try:
        model.save(path)
    except OSError as exc:
        raise ConfigError(f"cannot write model file {path}: {exc}") from exc


def cmd_train(args) -> int:
    config = load_config(args.config)
    docs = _with_roles(_read_corpus(args.corpus), args)
    if args.target == "tagger":
        if args.roles is None:
            raise ConfigError("train --target tagger needs --roles with gold labels")
        section = _section(config, "tagger")
        epochs = _get_num(section, "epochs", 10, integer=True)
        seed = _get_num(section, "seed", 0, integer=True)
        if args.seed is not None:
            seed = args.seed
        labeled = [(doc, [s.role for s in doc.sentences]) for doc in docs]
        model = train_tagger(labeled, epochs=epochs, seed=seed)
        _save_model(model, args.out)
        _info(f"wrote tagger model to {args.out}")
        return 0
    pipeline = pipeline_config_from_json(_section(config, "pipeline"))
    encoder = encoder_from_config(_section(config, "encoder"))
    train_cfg = train_config_from_config(_section(config, "train"), args.seed)
    model = train(docs, pipeline, train_cfg, encoder)
    _save_model(model, args.out)
    dev_f1 = model.train_meta.get("dev_f1")
    shown = f"{dev_f1:.4f}" if isinstance(dev_f1, float) else "n/a"
    _info(f"wrote predictor model to {args.out} (dev f1 {shown})")
    return 0


def _pipeline_for_model(config: Mapping, model: PredictorModel) -> PipelineConfig:
    """The config's pipeline section, else the one the model was trained with."""
    if "pipeline" in config:
        return pipeline_config_from_json(config["pipeline"])
    stored = model.train_meta.get("pipeline")
    if stored is not None:
        return pipeline_config_from_json(stored)
    return PipelineConfig()


def cmd_predict(args) -> int:
    config = load_config(args.config)
    model = _read_predictor(args.model)
    pipeline = _pipeline_for_model(config, model)
    docs = _with_roles(_read_corpus(args.corpus), args)
    records = []
    for doc in docs:
        result = forward(doc, model, pipeline)
        records.append({"id": doc.id, **result.to_json_dict()})
    _emit(_jsonl(records), args.out)
    return 0


def cmd_explain(args) -> int:
    config = load_config(args.config)
    model = _read_predictor(args.model)
    pipeline = _pipeline_for_model(config, model)
    docs = _with_roles(_read_corpus(args.corpus), args)
    if args.doc is not None:
        docs = [d for d in docs if d.id == args.doc]
        if not docs:
            raise DataError(f"no document with id {args.doc!r}")
    records = []
    for doc in docs:
        explanation = explain(doc, model, pipeline, k=args.k)
        records.append({"id": doc.id, **explanation.to_json_dict()})
    _emit(_jsonl(records), args.out)
    return 0


def cmd_eval(args) -> int:
    try:
        payload = Path(args.predictions).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read predictions {args.predictions}: {exc}") from exc
    predicted: dict[str, int] = {}
    for line_no, line in enumerate(payload.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            predicted[obj["id"]] = obj["label"]
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise DataError(f"predictions line {line_no} is malformed: {exc}") from exc
    docs = _read_corpus(args.corpus)
    if args.split is not None:
        docs = [d for d in docs if d.split == args.split]
    preds, golds = [], []
    for doc in docs:
        if doc.label is None:
            raise DataError(f"document {doc.id!r} has no gold label")
        if doc.id not in predicted:
            raise DataError(f"no prediction for document {doc.id!r}")
        preds.append(predicted[doc.id])
        golds.append(doc.label)
    metrics = evaluate(preds, golds)
    _emit(json.dumps(metrics.to_json_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_grid(args) -> int:
    config = load_config(args.config)
    grid_section = config.get("grid")
    grid = FULL_GRID if grid_section is None else grid_spec_from_json(grid_section)
    pipeline = pipeline_config_from_json(_section(config, "pipeline"))
    encoder = encoder_from_config(_section(config, "encoder"))
    train_cfg = train_config_from_config(_section(config, "train"), args.seed)
    docs = _with_roles(_read_corpus(args.corpus), args)
    rows = run_grid(docs, grid, train_cfg, encoder, pipeline)
    _emit(emit_report(rows, format=args.format), args.out)
    return 0


def cmd_gen_synthetic(args) -> int:
    seed = 0 if args.seed is None else args.seed
    docs, sidecar = generate_planted_corpus(args.n_docs, seed=seed)
    try:
        save_corpus(docs, args.out)
    except OSError as exc:
        raise ConfigError(f"cannot write {args.out}: {exc}") from exc
    roles_out = args.roles_out
    if roles_out is None:
        base = args.out[:-6] if args.out.endswith(".jsonl") else args.out
        roles_out = base + ".roles.jsonl"
    records = [
        {"id": doc.id, "roles": [r.value for r in sidecar[doc.id]]} for doc in docs
    ]
    _emit(_jsonl(records), roles_out)
    _info(f"wrote {len(docs)} documents to {args.out}, roles to {roles_out}")
    return 0


def cmd_serve(args) -> int:
    config = load_config(args.config)
    if "service" not in config:
        raise ConfigError("serve needs a 'service' config section")
    from . import service

    cfg = service.service_config_from_json(config["service"])
    if args.host is not None:
        cfg = service.with_bind(cfg, host=args.host)
    if args.port is not None:
        cfg = service.with_bind(cfg, port=args.port)
    app = service.build_app(cfg)
    import uvicorn

    host, port = service.split_bind(cfg.bind_address)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factverdict",
        description="Fact-based legal judgment prediction toolkit.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, metavar="INT", help="seed override")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str, parents=(common,)):
        p = sub.add_parser(name, parents=list(parents), help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("ingest", cmd_ingest, "validate and normalize a JSONL corpus")
    p.add_argument("corpus", help="input corpus JSONL")

    p = add("mask", cmd_mask, "mask named entities with category placeholders")
    p.add_argument("corpus")
    p.add_argument("--entities", metavar="PATH",
                   help="entity sidecar JSONL; omitted means heuristic detection")

    p = add("tag", cmd_tag, "assign rhetorical roles to every sentence")
    p.add_argument("corpus")
    p.add_argument("--model", metavar="PATH", help="tagger model JSON (default: zero weights)")

    p = add("summarize", cmd_summarize, "role-weighted extractive summaries")
    p.add_argument("corpus")
    roles_group = p.add_mutually_exclusive_group()
    roles_group.add_argument("--roles", metavar="PATH", help="role sidecar JSONL")
    roles_group.add_argument("--tagger", metavar="PATH", help="tagger model JSON")

    p = add("chunk", cmd_chunk, "report chunk spans per document")
    p.add_argument("corpus")

    p = add("train", cmd_train, "train the verdict predictor or the role tagger")
    p.add_argument("corpus")
    p.add_argument("--target", choices=("predictor", "tagger"), default="predictor")
    roles_group = p.add_mutually_exclusive_group()
    roles_group.add_argument("--roles", metavar="PATH", help="role sidecar JSONL")
    roles_group.add_argument("--tagger", metavar="PATH", help="tagger model JSON")

    p = add("predict", cmd_predict, "predict verdicts for a corpus")
    p.add_argument("corpus")
    p.add_argument("--model", required=True, metavar="PATH", help="predictor model file")
    roles_group = p.add_mutually_exclusive_group()
    roles_group.add_argument("--roles", metavar="PATH", help="role sidecar JSONL")
    roles_group.add_argument("--tagger", metavar="PATH", help="tagger model JSON")

    p = add("explain", cmd_explain, "occlusion explanations for predictions")
    p.add_argument("corpus")
    p.add_argument("--model", required=True, metavar="PATH", help="predictor model file")
    p.add_argument("--k", type=int, required=True, help="how many sentences to rank")
    p.add_argument("--doc", metavar="ID", help="explain a single document id")
    roles_group = p.add_mutually_exclusive_group()
    roles_group.add_argument("--roles", metavar="PATH", help="role sidecar JSONL")
    roles_group.add_argument("--tagger", metavar="PATH", help="tagger model JSON")

    p = add("eval", cmd_eval, "score predictions against gold labels")
    p.add_argument("predictions", help="prediction JSONL from the predict command")
    p.add_argument("corpus")
    p.add_argument("--split", choices=("train", "dev", "test"),
                   help="restrict scoring to one split")

    p = add("grid", cmd_grid, "run the selection x technique experiment grid")
    p.add_argument("corpus")
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    roles_group = p.add_mutually_exclusive_group()
    roles_group.add_argument("--roles", metavar="PATH", help="role sidecar JSONL")
    roles_group.add_argument("--tagger", metavar="PATH", help="tagger model JSON")

    p = add("gen-synthetic", cmd_gen_synthetic, "generate a planted-signal corpus")
    p.add_argument("--n-docs", type=int, default=200, metavar="INT")
    p.add_argument("--roles-out", metavar="PATH",
                   help="role sidecar path (default: derived from --out)")

    p = add("serve", cmd_serve, "start the HTTP service")
    p.add_argument("--host", metavar="ADDR", help="bind host override")
    p.add_argument("--port", type=int, metavar="INT", help="bind port override")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("gen-synthetic", "train") and args.out is None:
        parser.error(f"{args.command} requires --out")
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
