"""HTTP JSON API over the toolkit.

Endpoints: POST /api/tag, /api/predict, /api/summarize, /api/explain and
GET /api/schemes, /api/health. Models are loaded once at startup and never
mutated, so request handling is pure function evaluation. All errors use
the shape {"error": {"code": str, "message": str}}.

Status mapping: 400 for configuration-level mistakes (bad enums, bad spec,
empty or oversized bodies, out-of-range indices), 422 for documents that
cannot be processed (unparseable text, too few sentences), 409 when the
resolved input is empty with fallback disabled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .corpus import Document, parse_document
from .errors import (
    ConfigError,
    DataError,
    EmptyDocumentError,
    EmptyInputError,
    FactVerdictError,
    SpanOutOfRangeError,
    TooFewSentencesError,
)
from .explainer import explain
from .pipeline import (
    InputSelection,
    PipelineConfig,
    exclude_sentences,
    technique_from_number,
)
from .predictor import PredictorModel, forward
from .roles import TaggerModel, tag, zero_model
from .summarizer import (
    BUILTIN_SCHEMES,
    RoleWeightScheme,
    scheme_from_value,
    spec_from_json,
    summarize,
)

DEFAULT_BIND = "127.0.0.1:8037"
DEFAULT_BODY_LIMIT = 1_000_000
DEFAULT_CORS = (
    "http://localhost:5173",
    "http://127.0.0.1:5173",
    "http://localhost:8080",
)


@dataclass(frozen=True)
class ServiceConfig:
    model_path: str
    tagger_path: str | None = None
    bind_address: str = DEFAULT_BIND
    default_scheme: str | None = None
    request_body_limit: int = DEFAULT_BODY_LIMIT
    cors_allow_list: tuple[str, ...] = DEFAULT_CORS

    def __post_init__(self):
        if not isinstance(self.request_body_limit, int) or self.request_body_limit < 1:
            raise ConfigError("request_body_limit must be a positive int")
        split_bind(self.bind_address)


def split_bind(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise ConfigError(f"bind_address must look like 'host:port', got {address!r}")
    return host, int(port)


def with_bind(cfg: ServiceConfig, host: str | None = None, port: int | None = None) -> ServiceConfig:
    old_host, old_port = split_bind(cfg.bind_address)
    return replace(cfg, bind_address=f"{host or old_host}:{port if port is not None else old_port}")


def service_config_from_json(obj: Mapping) -> ServiceConfig:
    if not isinstance(obj, Mapping):
        raise ConfigError("service config must be a JSON object")
    model_path = obj.get("model_path")
    if not isinstance(model_path, str) or not model_path:
        raise ConfigError("service config needs a 'model_path' string")
    tagger_path = obj.get("tagger_path")
    if tagger_path is not None and not isinstance(tagger_path, str):
        raise ConfigError("'tagger_path' must be a string")
    bind_address = obj.get("bind_address", DEFAULT_BIND)
    if not isinstance(bind_address, str):
        raise ConfigError("'bind_address' must be a string")
    scheme = obj.get("default_scheme")
    if scheme is not None:
        scheme_from_value(scheme)  # fail fast on unknown names
    limit = obj.get("request_body_limit", DEFAULT_BODY_LIMIT)
    if isinstance(limit, bool) or not isinstance(limit, int):
        raise ConfigError("'request_body_limit' must be an int")
    cors = obj.get("cors_allow_list", list(DEFAULT_CORS))
    if not isinstance(cors, list) or not all(isinstance(o, str) for o in cors):
        raise ConfigError("'cors_allow_list' must be an array of origins")
    return ServiceConfig(
        model_path=model_path,
        tagger_path=tagger_path,
        bind_address=bind_address,
        default_scheme=scheme,
        request_body_limit=limit,
        cors_allow_list=tuple(cors),
    )


def model_version(model: PredictorModel) -> str:
    """Stable identifier derived from the model, not from load time."""
    meta = model.train_meta
    return "hier-attn-d{dim}-a{att}-s{seed}-e{epochs}".format(
        dim=model.encoder.dim,
        att=model.attention_dim,
        seed=meta.get("seed", 0),
        epochs=meta.get("epochs_run", 0),
    )


class ApiError(Exception):
    """An error with a fixed HTTP status and machine-readable code."""

    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def translate_error(exc: FactVerdictError) -> ApiError:
    if isinstance(exc, EmptyInputError):
        return ApiError(409, "empty_input", str(exc))
    if isinstance(exc, SpanOutOfRangeError):
        return ApiError(400, "index_out_of_range", str(exc))
    if isinstance(exc, TooFewSentencesError):
        return ApiError(422, "too_few_sentences", str(exc))
    if isinstance(exc, EmptyDocumentError):
        return ApiError(422, "unparseable_document", str(exc))
    if isinstance(exc, ConfigError):
        return ApiError(400, "bad_request", str(exc))
    if isinstance(exc, DataError):
        return ApiError(422, "bad_document", str(exc))
    return ApiError(500, "internal_error", str(exc))


async def _read_payload(request: Request, limit: int) -> dict:
    body = await request.body()
    if len(body) > limit:
        raise ApiError(400, "body_too_large", f"request body exceeds {limit} bytes")
    if not body:
        raise ApiError(400, "empty_body", "a JSON request body is required")
    try:
        obj = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ApiError(400, "invalid_json", f"request body is not valid JSON: {exc.msg}")
    if not isinstance(obj, dict):
        raise ApiError(400, "invalid_json", "request body must be a JSON object")
    return obj


def _require_text(payload: Mapping) -> str:
    """Empty 'text' is a 400; non-empty text that parses to no sentences
    surfaces later as a 422 from the document parser."""
    text = payload.get("text")
    if not isinstance(text, str):
        raise ApiError(400, "missing_text", "'text' must be a string")
    if not text:
        raise ApiError(400, "empty_text", "'text' must be non-empty")
    return text


def _parse(text: str) -> Document:
    try:
        return parse_document(text, "request")
    except FactVerdictError as exc:
        raise translate_error(exc) from exc


def _int_field(payload: Mapping, key: str, default: int | None) -> int:
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ApiError(400, "bad_field", f"'{key}' must be an integer")
    return value


def build_app(cfg: ServiceConfig) -> FastAPI:
    """Load models once and return the configured application."""
    predictor = PredictorModel.load(cfg.model_path)
    tagger = TaggerModel.load(cfg.tagger_path) if cfg.tagger_path else zero_model()
    default_scheme: RoleWeightScheme | None = (
        scheme_from_value(cfg.default_scheme) if cfg.default_scheme else None
    )
    version = model_version(predictor)

    app = FastAPI(title="factverdict", openapi_url=None, docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cfg.cors_allow_list),
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type"],
    )

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(FactVerdictError)
    async def on_toolkit_error(request: Request, exc: FactVerdictError):
        return await on_api_error(request, translate_error(exc))

    def tagged_roles(doc: Document):
        return tag(doc, tagger)

    @app.post("/api/tag")
    async def tag_endpoint(request: Request):
        payload = await _read_payload(request, cfg.request_body_limit)
        doc = _parse(_require_text(payload))
        seq = tagged_roles(doc)
        return {
            "sentences": [
                {
                    "index": s.index,
                    "text": s.text,
                    "role": seq.roles[s.index].value,
                    "score": seq.scores[s.index],
                }
                for s in doc.sentences
            ]
        }

    @app.post("/api/predict")
    async def predict_endpoint(request: Request):
        payload = await _read_payload(request, cfg.request_body_limit)
        doc = _parse(_require_text(payload))

        selection_name = payload.get("input_selection", "full")
        if not isinstance(selection_name, str):
            raise ApiError(400, "bad_field", "'input_selection' must be a string")
        selection = InputSelection.from_string(selection_name)
        chunking = technique_from_number(_int_field(payload, "technique", 1))
        scheme = default_scheme
        if payload.get("scheme") is not None:
            scheme = scheme_from_value(payload["scheme"])

        excluded = payload.get("what_if_excluded", [])
        if not isinstance(excluded, list):
            raise ApiError(400, "bad_field", "'what_if_excluded' must be an array")

        roles = tuple(tagged_roles(doc).roles)
        indices = tuple(range(len(doc.sentences)))
        if excluded:
            view = exclude_sentences(doc, excluded)
            indices = view.indices
            doc = view.to_document()
            roles = tuple(roles[i] for i in indices)

        pipeline = PipelineConfig(
            selection=selection,
            chunking=chunking,
            scheme=scheme,
            fallback_to_full=False,
        )
        result = forward(doc, predictor, pipeline, roles=roles)
        return {
            "label": result.label,
            "p": result.p,
            "alpha": list(result.alpha),
            "used_sentences": [indices[i] for i in result.used_sentences],
        }

    @app.post("/api/summarize")
    async def summarize_endpoint(request: Request):
        payload = await _read_payload(request, cfg.request_body_limit)
        doc = _parse(_require_text(payload))
        raw_spec = payload.get("spec")
        if not isinstance(raw_spec, Mapping):
            raise ApiError(400, "bad_field", "'spec' must be a JSON object")
        spec = spec_from_json(raw_spec)
        summary = summarize(doc, tagged_roles(doc).roles, spec)
        return {"selected": list(summary.selected), "objective": summary.objective}

    @app.post("/api/explain")
    async def explain_endpoint(request: Request):
        payload = await _read_payload(request, cfg.request_body_limit)
        doc = _parse(_require_text(payload))
        k = _int_field(payload, "k", None)
        pipeline = PipelineConfig(scheme=default_scheme, fallback_to_full=False)
        roles = tuple(tagged_roles(doc).roles)
        explanation = explain(doc, predictor, pipeline, k=k, roles=roles)
        return explanation.to_json_dict()

    @app.get("/api/schemes")
    async def schemes_endpoint():
        return {
            "schemes": {
                name: {role.value: w for role, w in scheme.weights.items()}
                for name, scheme in BUILTIN_SCHEMES.items()
            }
        }

    @app.get("/api/health")
    async def health_endpoint():
        return {"status": "ok", "modelVersion": version}

    return app
