"""HTTP facade over the answer pipeline.

Owns service configuration (env vars over config file over defaults)
and exposes /api/ask, /api/approaches and /api/health for the chat UI
and scripted clients.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import requests
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .corpus import Corpus, build_corpus
from .embed import Approach, ApproachName
from .errors import (
    BackendUnavailableError,
    ChatbotError,
    EmptyAnswerError,
    EmptyGenerationError,
    MetricMismatchError,
    ProtocolError,
    ProviderUnavailableError,
)
from .pipeline import GeneratorMode, PipelineConfig, answer_question
from .rank import Metric

log = logging.getLogger(__name__)

DISCLAIMER = (
    "Answers are for general research purposes only. This is not a diagnostic "
    "tool and is not a substitute for professional medical advice or treatment."
)

ENV_PREFIX = "CORDCHAT_"
_PROVIDER_ENV = {
    "bert": "BERT_URL",
    "biobert": "BIOBERT_URL",
    "use": "USE_URL",
}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    corpus_path: str | None = None
    generator_endpoint: str | None = None
    provider_endpoints: dict[str, str] = field(default_factory=dict)
    approach: str = "tfidf"
    metric: str = "cosine"
    top_k: int = 5
    dedup: bool = False
    generator: str = "stub"
    request_timeout: float = 30.0
    probe_timeout: float = 3.0
    cors_origins: list[str] = field(default_factory=lambda: ["*"])

    def validate(self) -> None:
        if not self.generator_endpoint and not (self.generator == "stub" and self.corpus_path):
            raise ValueError(
                "configure a generator endpoint or a corpus path with the stub generator"
            )

    @classmethod
    def load(cls, config_file: str | Path | None = None, env=None) -> "ServiceConfig":
        """Build the effective config: env vars over file over defaults."""
        env = os.environ if env is None else env
        config = cls()
        if config_file:
            file_values = json.loads(Path(config_file).read_text("utf-8"))
            for key, value in file_values.items():
                if not hasattr(config, key):
                    raise ValueError(f"unknown config key: {key}")
                setattr(config, key, value)

        def env_get(name):
            return env.get(ENV_PREFIX + name)

        if env_get("HOST"):
            config.host = env_get("HOST")
        if env_get("PORT"):
            config.port = int(env_get("PORT"))
        if env_get("CORPUS"):
            config.corpus_path = env_get("CORPUS")
        if env_get("GENERATOR_URL"):
            config.generator_endpoint = env_get("GENERATOR_URL")
        for approach, suffix in _PROVIDER_ENV.items():
            if env_get(suffix):
                config.provider_endpoints[approach] = env_get(suffix)
        if env_get("APPROACH"):
            config.approach = env_get("APPROACH").lower()
        if env_get("METRIC"):
            config.metric = env_get("METRIC").lower()
        if env_get("TOP_K"):
            config.top_k = int(env_get("TOP_K"))
        if env_get("DEDUP"):
            config.dedup = env_get("DEDUP").lower() in ("1", "true", "yes")
        if env_get("GENERATOR"):
            config.generator = env_get("GENERATOR").lower()
        if env_get("TIMEOUT"):
            config.request_timeout = float(env_get("TIMEOUT"))
        if env_get("CORS"):
            config.cors_origins = [o.strip() for o in env_get("CORS").split(",")]
        return config

    def echo(self) -> None:
        for key, value in vars(self).items():
            log.info("config %s = %r", key, value)


class AskRequest(BaseModel):
    question: str
    approach: str | None = None
    metric: str | None = None
    top_k: int | None = None
    dedup: bool | None = None


def _load_corpus(config: ServiceConfig) -> Corpus | None:
    if not config.corpus_path:
        return None
    path = Path(config.corpus_path)
    try:
        if path.is_dir():
            return build_corpus(path)
        return Corpus.load(path)
    except (OSError, ChatbotError) as exc:
        log.warning("corpus unavailable at %s: %s", path, exc)
        return None


def _error_response(exc: ChatbotError, status: int, **extra) -> JSONResponse:
    body = {"error": str(exc), "stage": exc.stage or "generate"}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def create_app(config: ServiceConfig, corpus: Corpus | None = None) -> FastAPI:
    """Wire the service; the corpus and config are immutable afterwards."""
    config.validate()
    config.echo()
    if corpus is None:
        corpus = _load_corpus(config)

    app = FastAPI(title="cordchat")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def resolve_approach(name: str) -> Approach:
        approach_name = ApproachName(name)
        if approach_name is ApproachName.TFIDF:
            return Approach(ApproachName.TFIDF)
        endpoint = config.provider_endpoints.get(approach_name.value)
        if not endpoint:
            raise ValueError(f"no provider endpoint configured for '{name}'")
        return Approach(approach_name, endpoint=endpoint)

    @app.post("/api/ask")
    def ask(body: AskRequest):
        if not body.question.strip():
            return JSONResponse(
                status_code=400,
                content={"error": "question must be non-empty", "stage": "generate"},
            )
        try:
            pipeline_config = PipelineConfig(
                approach=resolve_approach(body.approach or config.approach),
                metric=Metric(body.metric or config.metric),
                top_k=body.top_k if body.top_k is not None else config.top_k,
                dedup=body.dedup if body.dedup is not None else config.dedup,
                generator=GeneratorMode(config.generator),
                generator_endpoint=config.generator_endpoint,
                request_timeout=config.request_timeout,
            )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc), "stage": "generate"})

        try:
            response = answer_question(body.question, pipeline_config, corpus=corpus)
        except MetricMismatchError as exc:
            return _error_response(exc, 400)
        except EmptyAnswerError as exc:
            return _error_response(exc, 422, raw_text=exc.raw)
        except (BackendUnavailableError, EmptyGenerationError,
                ProviderUnavailableError, ProtocolError) as exc:
            return _error_response(exc, 502)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc), "stage": "generate"})

        payload = response.to_dict(include_timings=True)
        return {
            "question": body.question,
            "answer": payload["answer_text"],
            "selected": payload["selected"],
            "approach": pipeline_config.approach.name.value,
            "metric": pipeline_config.metric.value,
            "dedup_applied": payload["dedup_applied"],
            "raw_text": payload["raw_text"],
            "timings_ms": payload["timings_ms"],
            "disclaimer": DISCLAIMER,
        }

    def probe_provider(endpoint: str) -> bool:
        try:
            r = requests.post(
                endpoint.rstrip("/") + "/embed",
                json={"texts": ["ping"]},
                timeout=config.probe_timeout,
            )
            return r.status_code == 200
        except requests.RequestException:
            return False

    def probe_generator() -> bool | None:
        if not config.generator_endpoint:
            return None
        try:
            r = requests.post(
                config.generator_endpoint.rstrip("/") + "/generate",
                json={"prompt": "ping", "max_length": 16, "temperature": 0.0},
                timeout=config.probe_timeout,
            )
            return r.status_code == 200
        except requests.RequestException:
            return False

    @app.get("/api/approaches")
    def approaches():
        entries = [{"name": ApproachName.TFIDF.value, "ready": True}]
        for name in (ApproachName.BERT, ApproachName.BIOBERT, ApproachName.USE):
            endpoint = config.provider_endpoints.get(name.value)
            if endpoint:
                entries.append({"name": name.value, "ready": probe_provider(endpoint)})
        return {"approaches": entries}

    @app.get("/api/health")
    def health():
        documents = len(corpus) if corpus is not None else 0
        return {
            "status": "ok" if documents > 0 else "degraded",
            "documents": documents,
            "generator": probe_generator(),
            "providers": {
                name: probe_provider(endpoint)
                for name, endpoint in config.provider_endpoints.items()
            },
        }

    return app
