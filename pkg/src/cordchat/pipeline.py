"""End-to-end answer pipeline and the batch evaluation grid.

question -> raw generation -> regex/string cleanup -> similarity
ranking -> top-k composition. Every intermediate artifact is retained
on the FinalResponse for inspection.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .corpus import Corpus
from .embed import Approach, EmbeddingMatrix, embed
from .errors import ChatbotError
from .generator import (
    DEFAULT_MAX_LENGTH,
    DEFAULT_TEMPERATURE,
    GenerationRequest,
    RawAnswer,
    generate_remote,
    generate_stub,
)
from .rank import (
    ComposedAnswer,
    Metric,
    SimilarityRanking,
    compose_answer,
    select_top_k,
    similarity_to_question,
)
from .textclean import SentenceSet, clean_answer

log = logging.getLogger(__name__)


class GeneratorMode(str, Enum):
    REMOTE = "remote"
    STUB = "stub"


@dataclass(frozen=True)
class PipelineConfig:
    approach: Approach
    metric: Metric = Metric.COSINE
    top_k: int = 5
    dedup: bool = False
    generator: GeneratorMode = GeneratorMode.STUB
    generator_endpoint: str | None = None
    max_length: int = DEFAULT_MAX_LENGTH
    temperature: float = DEFAULT_TEMPERATURE
    seed: int = 0
    tfidf_fit_on_corpus: bool = False
    allow_unnormalized_inner: bool = False
    original_order: bool = False
    prompt_template: str | None = None
    request_timeout: float = 30.0

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.generator is GeneratorMode.REMOTE and not self.generator_endpoint:
            raise ValueError("remote generator requires an endpoint")

    def to_dict(self) -> dict:
        return {
            "approach": self.approach.name.value,
            "approach_endpoint": self.approach.endpoint,
            "metric": self.metric.value,
            "top_k": self.top_k,
            "dedup": self.dedup,
            "generator": self.generator.value,
            "generator_endpoint": self.generator_endpoint,
            "max_length": self.max_length,
            "temperature": self.temperature,
            "seed": self.seed,
            "tfidf_fit_on_corpus": self.tfidf_fit_on_corpus,
            "allow_unnormalized_inner": self.allow_unnormalized_inner,
            "original_order": self.original_order,
            "prompt_template": self.prompt_template,
        }


@dataclass(frozen=True)
class FinalResponse:
    """Everything one pipeline run produced, stage by stage."""

    answer: ComposedAnswer
    raw: RawAnswer
    sentence_set: SentenceSet
    ranking: SimilarityRanking
    matrix: EmbeddingMatrix
    config: PipelineConfig
    timings_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> dict:
        """JSON-ready view. Timing fields are volatile and excluded by
        default so that equal inputs serialize identically."""
        data = {
            "question": self.sentence_set.question,
            "answer_text": self.answer.text,
            "dedup_applied": self.answer.dedup_applied,
            "selected": [
                {"sentence": s, "score": score, "index": idx}
                for s, score, idx in self.answer.selected
            ],
            "sentences": list(self.sentence_set.sentences),
            "scores": [float(v) for v in self.ranking.scores],
            "order": [int(i) for i in self.ranking.order],
            "raw_text": self.raw.text,
            "backend_id": self.raw.backend_id,
            "config": self.config.to_dict(),
        }
        if include_timings:
            data["latency_ms"] = self.raw.latency_ms
            data["timings_ms"] = dict(self.timings_ms)
        return data

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings=include_timings), sort_keys=True)


def answer_question(
    question: str,
    config: PipelineConfig,
    corpus: Corpus | None = None,
) -> FinalResponse:
    """Run the four stages in order for one question."""
    if not question:
        raise ValueError("question must be non-empty")
    timings: dict[str, float] = {}
    req = GenerationRequest(
        question=question,
        max_length=config.max_length,
        temperature=config.temperature,
        seed=config.seed,
    )

    started = time.monotonic()
    if config.generator is GeneratorMode.STUB:
        if corpus is None:
            raise ValueError("stub generator requires a corpus")
        raw = generate_stub(corpus, req)
    else:
        raw = generate_remote(
            config.generator_endpoint,
            req,
            timeout=config.request_timeout,
            prompt_template=config.prompt_template,
        )
    timings["generate"] = (time.monotonic() - started) * 1000

    started = time.monotonic()
    sentence_set = clean_answer(raw.text, question)
    timings["clean"] = (time.monotonic() - started) * 1000

    started = time.monotonic()
    matrix = embed(
        config.approach,
        sentence_set,
        corpus=corpus,
        fit_on_corpus=config.tfidf_fit_on_corpus,
        timeout=config.request_timeout,
    )
    timings["embed"] = (time.monotonic() - started) * 1000

    started = time.monotonic()
    ranking = similarity_to_question(
        matrix, config.metric, allow_unnormalized_inner=config.allow_unnormalized_inner
    )
    selected = select_top_k(ranking, sentence_set.sentences, config.top_k)
    answer = compose_answer(selected, dedup=config.dedup, original_order=config.original_order)
    timings["rank"] = (time.monotonic() - started) * 1000

    return FinalResponse(
        answer=answer,
        raw=raw,
        sentence_set=sentence_set,
        ranking=ranking,
        matrix=matrix,
        config=config,
        timings_ms=timings,
    )


@dataclass(frozen=True)
class BatchRecord:
    question_id: int
    approach: str
    sample: int
    response: FinalResponse

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "approach": self.approach,
            "sample": self.sample,
            **self.response.to_dict(),
        }


@dataclass(frozen=True)
class BatchError:
    question_id: int
    approach: str
    sample: int
    stage: str
    message: str

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "approach": self.approach,
            "sample": self.sample,
            "error": self.message,
            "stage": self.stage,
        }


@dataclass
class BatchResult:
    records: list[BatchRecord]
    errors: list[BatchError]

    def write_jsonl(self, path: str | Path) -> None:
        """One line per grid cell, answers and error entries alike."""
        entries = [r.to_dict() for r in self.records] + [e.to_dict() for e in self.errors]
        entries.sort(key=lambda d: (d["question_id"], d["approach"], d["sample"]))
        with open(path, "w", encoding="utf-8") as fh:
            for entry in entries:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _question_pairs(questions) -> list[tuple[int, str]]:
    pairs = []
    for i, q in enumerate(questions, start=1):
        if isinstance(q, str):
            pairs.append((i, q))
        elif isinstance(q, tuple):
            pairs.append((int(q[0]), q[1]))
        else:
            pairs.append((int(q.id), q.text))
    return pairs


def batch_generate(
    questions,
    approaches: list[Approach],
    samples_per_cell: int,
    config: PipelineConfig,
    corpus: Corpus | None = None,
    concurrency: int = 4,
) -> BatchResult:
    """Fill the |questions| x |approaches| x samples answer grid.

    Each sample triggers a fresh generation. Individual cell failures
    become error entries; the batch keeps going.
    """
    if not questions or not approaches:
        raise ValueError("questions and approaches must be non-empty")
    if samples_per_cell < 1:
        raise ValueError("samples_per_cell must be >= 1")

    pairs = _question_pairs(questions)
    cells = [
        (qid, text, approach, sample)
        for qid, text in pairs
        for approach in approaches
        for sample in range(1, samples_per_cell + 1)
    ]

    def run_cell(cell):
        qid, text, approach, sample = cell
        cell_config = replace(config, approach=approach)
        try:
            response = answer_question(text, cell_config, corpus=corpus)
            return BatchRecord(qid, approach.name.value, sample, response)
        except ChatbotError as exc:
            log.warning("cell (%s, %s, %s) failed: %s", qid, approach.name.value, sample, exc)
            return BatchError(qid, approach.name.value, sample,
                              exc.stage or "unknown", str(exc))

    if concurrency <= 1:
        outcomes = [run_cell(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            outcomes = list(pool.map(run_cell, cells))

    records = [o for o in outcomes if isinstance(o, BatchRecord)]
    errors = [o for o in outcomes if isinstance(o, BatchError)]
    return BatchResult(records=records, errors=errors)
