"""Operational shell: service configuration, a stateless HTTP service and
outbound invocation of synthesized calls.

The server keeps no conversation state; clients accumulate parameter
bindings and resend them with the expression.  Requests are served from an
immutable graph snapshot; a single writer applies knowledge-graph updates
to a copy, persists it atomically (write + rename) and swaps the snapshot.
"""

from __future__ import annotations

import copy
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Union

import httpx
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .embedding import EmbeddingModel, load_embeddings
from .errors import EmptyExpression, UnknownDeclaration
from .extractor import LexiconTagger, default_stopwords, load_lexicon, load_stopwords
from .kg import (
    KnowledgeGraph,
    add_sample_expression,
    enrich_values,
    load_kg,
    record_learned_value,
    save_kg,
)
from .synthesis import (
    NEEDS_INPUT,
    READY,
    ApiCall,
    LearnedValue,
    SynthesisConfig,
    SynthesisResult,
    synthesize,
)

CONFIG_ENV_VAR = "APISYNTH_CONFIG"
DRY_RUN = "dry_run"
LIVE = "live"

QUESTION_TEMPLATE = "What value should I use for '{param}'?"


def question_for(param: str) -> str:
    return QUESTION_TEMPLATE.format(param=param)


@dataclass
class Thresholds:
    kg_update: float = 0.40
    api_min_score: float = 0.30
    declaration_floor: float = 0.25
    enrich_min_sim: float = 0.50
    top_k: int = 5

    def __post_init__(self):
        for name in ("kg_update", "api_min_score", "declaration_floor", "enrich_min_sim"):
            value = getattr(self, name)
            if not 0.0 <= float(value) <= 1.0:
                raise ValueError(f"threshold {name} must be within [0, 1]")
        if int(self.top_k) < 1:
            raise ValueError("top_k must be a positive integer")


@dataclass
class ServiceConfig:
    graph_path: str = "graph.json"
    embeddings_path: str = "vectors.vec"
    stopwords_path: Optional[str] = None
    lexicon_path: Optional[str] = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    listen_port: int = 8080
    invoke_mode: str = DRY_RUN
    ui_origin: str = "*"

    def __post_init__(self):
        if self.invoke_mode not in (DRY_RUN, LIVE):
            raise ValueError(f"invoke_mode must be {DRY_RUN!r} or {LIVE!r}")

    def synthesis_config(self) -> SynthesisConfig:
        return SynthesisConfig(
            top_k=self.thresholds.top_k,
            api_min_score=self.thresholds.api_min_score,
            declaration_floor=self.thresholds.declaration_floor,
            kg_update_threshold=self.thresholds.kg_update,
        )

    def to_dict(self) -> dict:
        return {
            "graph_path": self.graph_path,
            "embeddings_path": self.embeddings_path,
            "stopwords_path": self.stopwords_path,
            "lexicon_path": self.lexicon_path,
            "thresholds": vars(self.thresholds).copy(),
            "listen_port": self.listen_port,
            "invoke_mode": self.invoke_mode,
            "ui_origin": self.ui_origin,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ServiceConfig":
        allowed = {
            "graph_path", "embeddings_path", "stopwords_path", "lexicon_path",
            "thresholds", "listen_port", "invoke_mode", "ui_origin",
        }
        unknown = set(raw) - allowed
        if unknown:
            raise ValueError(f"unknown config key(s) {sorted(unknown)}")
        data = dict(raw)
        thresholds_raw = data.pop("thresholds", {})
        if not isinstance(thresholds_raw, Mapping):
            raise ValueError("thresholds must be an object")
        unknown = set(thresholds_raw) - set(vars(Thresholds()))
        if unknown:
            raise ValueError(f"unknown threshold key(s) {sorted(unknown)}")
        return cls(thresholds=Thresholds(**thresholds_raw), **data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ServiceConfig":
        """Load a JSON config file; relative data paths resolve against the
        file's directory."""
        path = Path(path)
        config = cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        base = path.parent
        for attr in ("graph_path", "embeddings_path", "stopwords_path", "lexicon_path"):
            value = getattr(config, attr)
            if value and not Path(value).is_absolute():
                setattr(config, attr, str(base / value))
        return config

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        config_path = env.get(CONFIG_ENV_VAR)
        return cls.from_file(config_path) if config_path else cls()

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


@dataclass
class InvocationOutcome:
    kind: str  # dry_run | ok | timeout | network_failure
    url: str
    http_status: Optional[int] = None
    body: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "url": self.url,
            "http_status": self.http_status,
            "response_body": self.body,
            "error": self.error,
        }


def invoke(call: ApiCall, mode: str = DRY_RUN, timeout: float = 10.0) -> InvocationOutcome:
    """Perform (or, in dry_run mode, only describe) a synthesized call.

    Live failures are surfaced in the outcome, never raised.
    """
    if mode == DRY_RUN:
        return InvocationOutcome(kind="dry_run", url=call.url)
    if mode != LIVE:
        raise ValueError(f"unknown invoke mode {mode!r}")
    try:
        with httpx.Client(timeout=timeout, follow_redirects=True) as client:
            response = client.request(call.method, call.url, json=call.body or None)
        return InvocationOutcome(
            kind="ok", url=call.url, http_status=response.status_code, body=response.text
        )
    except httpx.TimeoutException as exc:
        return InvocationOutcome(kind="timeout", url=call.url, error=str(exc) or "timeout")
    except (httpx.HTTPError, OSError) as exc:
        return InvocationOutcome(kind="network_failure", url=call.url, error=str(exc))


def atomic_write(path: Union[str, Path], data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


class SynthesisEngine:
    """Loaded model + graph snapshot behind a single-writer gate."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.model: EmbeddingModel = load_embeddings(config.embeddings_path)
        self.graph: KnowledgeGraph = load_kg(config.graph_path)
        if config.lexicon_path:
            self.tagger = LexiconTagger(load_lexicon(config.lexicon_path))
        else:
            self.tagger = LexiconTagger()
        if config.stopwords_path:
            self.stopwords = load_stopwords(config.stopwords_path)
        else:
            self.stopwords = default_stopwords()
        self._write_lock = threading.Lock()

    def _swap_and_persist(self, working: KnowledgeGraph) -> None:
        atomic_write(self.config.graph_path, save_kg(working))
        self.graph = working

    def synthesize_request(
        self, expression: str, bindings: Mapping[str, str]
    ) -> SynthesisResult:
        """Synthesize against the current snapshot; on a ready result, feed
        the matrix bindings to the knowledge-graph updater and persist when
        anything was accepted."""
        snapshot = self.graph
        result = synthesize(
            expression,
            snapshot,
            self.model,
            user_bindings=bindings,
            config=self.config.synthesis_config(),
            tagger=self.tagger,
            stopwords=self.stopwords,
            learn=False,
        )
        if result.status == READY and result.matrix and result.matrix.entries:
            with self._write_lock:
                working = copy.deepcopy(self.graph)
                learned = []
                for entry in result.matrix.entries:
                    literal = entry.entity_text.replace("_", " ")
                    accepted = record_learned_value(
                        working,
                        result.declaration_match.declaration_id,
                        entry.param_name,
                        literal,
                        entry.confidence,
                        threshold=self.config.thresholds.kg_update,
                    )
                    learned.append(
                        LearnedValue(entry.param_name, literal, entry.confidence, accepted)
                    )
                result.learned = learned
                if any(lv.accepted for lv in learned):
                    self._swap_and_persist(working)
        return result

    def add_sample(self, declaration_id: str, expression: str) -> tuple[bool, list[str]]:
        with self._write_lock:
            working = copy.deepcopy(self.graph)
            added = add_sample_expression(working, declaration_id, expression)
            if added:
                self._swap_and_persist(working)
            samples = list(working.declaration(declaration_id).sample_expressions)
        return added, samples

    def enrich(self, k: int, min_sim: float):
        with self._write_lock:
            working = copy.deepcopy(self.graph)
            report = enrich_values(working, self.model, k, min_sim)
            if report.added_values or report.added_links:
                self._swap_and_persist(working)
        return report

    def graph_summary(self) -> dict:
        return {
            "apis": [
                {
                    "id": api.id,
                    "name": api.name,
                    "description": api.description,
                    "tags": list(api.tags),
                    "base_uri": api.base_uri,
                    "declarations": [
                        {
                            "id": decl.id,
                            "method": decl.method,
                            "path_template": decl.path_template,
                            "sample_expressions": len(decl.sample_expressions),
                            "parameters": [
                                {
                                    "name": p.name,
                                    "required": p.required,
                                    "values": len(p.values),
                                }
                                for p in decl.parameters
                            ],
                        }
                        for decl in self.graph.declarations_of(api.id)
                    ],
                }
                for api in self.graph.apis()
            ]
        }


def result_payload(result: SynthesisResult, engine: SynthesisEngine) -> dict:
    payload = result.to_dict()
    missing = (
        result.coverage_report.missing_required
        if result.status == NEEDS_INPUT and result.coverage_report
        else []
    )
    payload["questions"] = [question_for(param) for param in missing]
    if result.status == READY and engine.config.invoke_mode == LIVE and result.call:
        payload["invocation"] = invoke(result.call, LIVE).to_dict()
    return payload


def create_app(source: Union[ServiceConfig, SynthesisEngine]) -> FastAPI:
    """Build the FastAPI application around a config or prebuilt engine."""
    engine = source if isinstance(source, SynthesisEngine) else SynthesisEngine(source)
    app = FastAPI(title="apisynth", version="0.1.0")
    app.state.engine = engine
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[engine.config.ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def bad_request(message: str) -> JSONResponse:
        return JSONResponse({"error": message}, status_code=400)

    async def json_object(request: Request) -> Optional[dict]:
        try:
            payload = await request.json()
        except Exception:
            return None
        return payload if isinstance(payload, dict) else None

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.get("/apis")
    async def apis():
        return engine.graph_summary()

    @app.post("/synthesize")
    async def synthesize_route(request: Request):
        payload = await json_object(request)
        if payload is None:
            return bad_request("body must be a JSON object")
        unknown = set(payload) - {"expression", "bindings"}
        if unknown:
            return bad_request(f"unknown key(s) {sorted(unknown)}")
        expression = payload.get("expression")
        bindings = payload.get("bindings", {})
        if not isinstance(expression, str):
            return bad_request("'expression' must be a string")
        if not isinstance(bindings, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in bindings.items()
        ):
            return bad_request("'bindings' must map parameter names to strings")
        try:
            result = engine.synthesize_request(expression, bindings)
        except EmptyExpression:
            return JSONResponse({"error": "empty_expression"}, status_code=422)
        return JSONResponse(result_payload(result, engine))

    @app.post("/kg/declarations/{declaration_id}/expressions")
    async def add_expression(declaration_id: str, request: Request):
        payload = await json_object(request)
        if payload is None or set(payload) != {"expression"}:
            return bad_request("body must be {\"expression\": \"...\"}")
        expression = payload["expression"]
        if not isinstance(expression, str) or not expression.strip():
            return bad_request("'expression' must be a non-empty string")
        try:
            added, samples = engine.add_sample(declaration_id, expression)
        except UnknownDeclaration as exc:
            return JSONResponse({"error": str(exc)}, status_code=404)
        return {"added": added, "sample_expressions": samples}

    @app.post("/kg/enrich")
    async def enrich_route(request: Request):
        payload = await json_object(request)
        if payload is None:
            return bad_request("body must be a JSON object")
        unknown = set(payload) - {"k", "min_sim"}
        if unknown:
            return bad_request(f"unknown key(s) {sorted(unknown)}")
        k = payload.get("k", 5)
        min_sim = payload.get("min_sim", engine.config.thresholds.enrich_min_sim)
        if not isinstance(k, int) or isinstance(k, bool) or k < 0:
            return bad_request("'k' must be a non-negative integer")
        if isinstance(min_sim, bool) or not isinstance(min_sim, (int, float)):
            return bad_request("'min_sim' must be a number")
        try:
            report = engine.enrich(k, float(min_sim))
        except ValueError as exc:
            return bad_request(str(exc))
        body = report.to_dict()
        body["added_value_count"] = len(report.added_values)
        body["added_link_count"] = len(report.added_links)
        return body

    return app
