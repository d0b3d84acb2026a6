"""Raw answer generation.

Stage 1 of the pipeline either calls a remote language-model backend
over the /generate wire contract or, for offline runs and tests, pulls
a deterministic excerpt from the corpus document that best overlaps the
question.
"""

import re
import time
from dataclasses import dataclass

import requests

from .corpus import Corpus
from .embed import tokenize
from .errors import BackendUnavailableError, EmptyGenerationError

DEFAULT_MAX_LENGTH = 512
DEFAULT_TEMPERATURE = 0.7


@dataclass(frozen=True)
class GenerationRequest:
    question: str
    max_length: int = DEFAULT_MAX_LENGTH
    temperature: float = DEFAULT_TEMPERATURE
    seed: int = 0

    def __post_init__(self):
        if not self.question:
            raise ValueError("question must be non-empty")
        if self.max_length < 16:
            raise ValueError("max_length must be >= 16")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class RawAnswer:
    text: str
    backend_id: str
    latency_ms: int


def generate_remote(
    endpoint: str,
    req: GenerationRequest,
    timeout: float = 30.0,
    prompt_template: str | None = None,
) -> RawAnswer:
    """Ask a remote backend for a completion of the question.

    The question is sent verbatim unless a prompt template (with a
    ``{question}`` placeholder) is configured.
    """
    prompt = prompt_template.format(question=req.question) if prompt_template else req.question
    url = endpoint.rstrip("/") + "/generate"
    started = time.monotonic()
    try:
        response = requests.post(
            url,
            json={
                "prompt": prompt,
                "max_length": req.max_length,
                "temperature": req.temperature,
            },
            timeout=timeout,
        )
    except requests.RequestException as exc:
        raise BackendUnavailableError(f"generator backend unreachable: {exc}") from exc
    latency_ms = int((time.monotonic() - started) * 1000)
    if response.status_code != 200:
        raise BackendUnavailableError(
            f"generator backend returned status {response.status_code}"
        )
    try:
        payload = response.json()
        text = payload["text"]
        model = payload.get("model", "remote")
    except (ValueError, KeyError, TypeError) as exc:
        raise BackendUnavailableError(f"malformed generator response: {exc}") from exc
    if not text:
        raise EmptyGenerationError("generator backend returned an empty completion")
    return RawAnswer(text=text, backend_id=str(model), latency_ms=latency_ms)


def generate_stub(corpus: Corpus, req: GenerationRequest) -> RawAnswer:
    """Deterministic corpus-retrieval stand-in for the remote backend.

    Scores each document by how many distinct question tokens it
    contains, then excerpts max_length characters from the best document
    starting at the earliest occurrence of any shared token. With no
    overlap anywhere, falls back to the head of the first document.
    """
    if not corpus.documents:
        raise ValueError("generate_stub requires a non-empty corpus")
    started = time.monotonic()
    question_tokens = set(tokenize(req.question))

    best_doc = None
    best_score = 0
    for doc in corpus.documents:
        score = len(question_tokens & set(tokenize(doc.combined_text)))
        if score > best_score:
            best_doc, best_score = doc, score

    if best_doc is None:
        text = corpus.documents[0].combined_text[: req.max_length]
    else:
        combined = best_doc.combined_text
        start = 0
        for match in re.finditer(r"[^\W_]{2,}", combined.lower()):
            if match.group() in question_tokens:
                start = match.start()
                break
        text = combined[start : start + req.max_length]
    latency_ms = int((time.monotonic() - started) * 1000)
    return RawAnswer(text=text, backend_id="stub", latency_ms=latency_ms)
