"""Similarity ranking and answer composition.

Scores every sentence embedding against the question embedding, ranks
descending (ties broken by original index), keeps the top k and joins
the winners into the final answer.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embed import EmbeddingMatrix
from .errors import MetricMismatchError


class Metric(str, Enum):
    COSINE = "cosine"
    INNER_PRODUCT = "inner_product"


@dataclass(frozen=True)
class SimilarityRanking:
    """Per-sentence similarity to the question, plus the rank order."""

    scores: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        if len(self.order) != len(self.scores):
            raise ValueError("order must be a permutation of the score indices")


@dataclass(frozen=True)
class ComposedAnswer:
    text: str
    selected: tuple[tuple[str, float, int], ...]
    dedup_applied: bool


def _check_metric(matrix: EmbeddingMatrix, metric: Metric, allow_unnormalized_inner: bool):
    if metric is Metric.INNER_PRODUCT and not matrix.normalized and not allow_unnormalized_inner:
        raise MetricMismatchError(
            "inner product requires a normalized embedding matrix "
            "(set the override to permit it anyway)"
        )


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    out = np.zeros_like(rows)
    np.divide(rows, norms, out=out, where=norms > 0)
    return out


def similarity_to_question(
    matrix: EmbeddingMatrix,
    metric: Metric,
    allow_unnormalized_inner: bool = False,
) -> SimilarityRanking:
    """Similarity of every sentence row to the question row.

    Cosine with a zero vector is defined as 0 so out-of-vocabulary
    sentences rank last instead of crashing.
    """
    if matrix.rows.shape[0] < 2:
        raise ValueError("matrix must hold at least one sentence plus the question")
    _check_metric(matrix, metric, allow_unnormalized_inner)
    sentences = matrix.sentence_rows
    question = matrix.question_row
    if metric is Metric.COSINE:
        scores = _unit_rows(sentences) @ _unit_rows(question[None, :])[0]
    else:
        scores = sentences @ question
    order = np.argsort(-scores, kind="stable")
    return SimilarityRanking(scores=scores, order=order)


def full_similarity_matrix(
    matrix: EmbeddingMatrix,
    metric: Metric,
    allow_unnormalized_inner: bool = False,
) -> np.ndarray:
    """Pairwise similarity over all rows (sentences plus question).

    The last column holds each row's similarity to the question.
    """
    if matrix.rows.shape[0] < 2:
        raise ValueError("matrix must hold at least one sentence plus the question")
    _check_metric(matrix, metric, allow_unnormalized_inner)
    rows = _unit_rows(matrix.rows) if metric is Metric.COSINE else matrix.rows
    return rows @ rows.T


def select_top_k(
    ranking: SimilarityRanking,
    sentences: list[str] | tuple[str, ...],
    k: int = 5,
) -> list[tuple[str, float, int]]:
    """First min(k, n) entries of the rank order as (sentence, score, index)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    picks = ranking.order[: min(k, len(sentences))]
    return [(sentences[i], float(ranking.scores[i]), int(i)) for i in picks]


def compose_answer(
    selected: list[tuple[str, float, int]],
    dedup: bool = False,
    original_order: bool = False,
) -> ComposedAnswer:
    """Join the selected sentences with single spaces.

    Default order is descending similarity; ``original_order`` restores
    text order instead. With ``dedup``, case-folded duplicates are
    dropped (the selection is not refilled from lower ranks).
    """
    if not selected:
        raise ValueError("selected must be non-empty")
    entries = list(selected)
    if dedup:
        seen: set[str] = set()
        kept = []
        for entry in entries:
            key = entry[0].casefold()
            if key in seen:
                continue
            seen.add(key)
            kept.append(entry)
        entries = kept
    if original_order:
        entries = sorted(entries, key=lambda e: e[2])
    return ComposedAnswer(
        text=" ".join(e[0] for e in entries),
        selected=tuple(entries),
        dedup_applied=dedup,
    )
