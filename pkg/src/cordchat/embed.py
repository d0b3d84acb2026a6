"""Sentence embedding back-ends.

Two routes produce the embedding matrix for a sentence set: a native
tf-idf vectorizer (smoothed idf, raw counts, L2-normalized rows) and an
HTTP client for out-of-process neural encoders speaking the /embed wire
contract. The matrix always carries the question embedding as its last
row.
"""

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np
import requests

from .corpus import Corpus
from .errors import EmptyVocabularyError, ProtocolError, ProviderUnavailableError
from .textclean import SentenceSet

# tolerance for the "rows are unit length" check on normalized matrices
NORM_TOL = 1e-6

_TOKEN = re.compile(r"[^\W_]{2,}")


class ApproachName(str, Enum):
    TFIDF = "tfidf"
    BERT = "bert"
    BIOBERT = "biobert"
    USE = "use"


@dataclass(frozen=True)
class Approach:
    """Embedding back-end selector. Non-tfidf approaches need an endpoint."""

    name: ApproachName
    endpoint: str | None = None

    def __post_init__(self):
        if self.name is not ApproachName.TFIDF and not self.endpoint:
            raise ValueError(f"approach '{self.name.value}' requires a provider endpoint")


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    fitted_on: int

    def __post_init__(self):
        if sorted(self.vocabulary.values()) != list(range(len(self.vocabulary))):
            raise ValueError("vocabulary indices must be 0..V-1 without gaps")
        if np.any(self.idf < 1.0) or not np.all(np.isfinite(self.idf)):
            raise ValueError("idf values must be finite and >= 1")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Rows for S union {q}; the question row is last."""

    rows: np.ndarray
    normalized: bool
    approach: Approach | None = None

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[0] < 1:
            raise ValueError("embedding matrix must be 2-D with at least one row")
        if self.normalized:
            norms = np.linalg.norm(self.rows, axis=1)
            nonzero = norms > 0
            if np.any(np.abs(norms[nonzero] - 1.0) > NORM_TOL):
                raise ValueError("normalized matrix has a row with non-unit norm")

    @property
    def sentence_rows(self) -> np.ndarray:
        return self.rows[:-1]

    @property
    def question_row(self) -> np.ndarray:
        return self.rows[-1]


def tokenize(text: str) -> list[str]:
    """Maximal runs of two or more alphanumeric characters, lowercased."""
    return _TOKEN.findall(text.lower())


def fit_tfidf(texts: list[str]) -> TfidfModel:
    """Fit vocabulary and smoothed idf: ln((1+N)/(1+df)) + 1."""
    if not texts or not any(t.strip() for t in texts):
        raise ValueError("fit_tfidf requires at least one non-empty text")
    doc_tokens = [set(tokenize(t)) for t in texts]
    vocabulary = sorted(set().union(*doc_tokens))
    if not vocabulary:
        raise EmptyVocabularyError("no tokens of length >= 2 in the fitting texts")
    index = {tok: i for i, tok in enumerate(vocabulary)}
    n = len(texts)
    df = np.zeros(len(vocabulary))
    for toks in doc_tokens:
        for tok in toks:
            df[index[tok]] += 1
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return TfidfModel(vocabulary=index, idf=idf, fitted_on=n)


def transform_tfidf(model: TfidfModel, sentence_set: SentenceSet) -> EmbeddingMatrix:
    """Raw term counts times idf, L2-normalized per row (zero rows stay zero)."""
    texts = sentence_set.texts
    rows = np.zeros((len(texts), len(model.vocabulary)))
    for r, text in enumerate(texts):
        for tok, count in Counter(tokenize(text)).items():
            col = model.vocabulary.get(tok)
            if col is not None:
                rows[r, col] = count
    rows *= model.idf
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    np.divide(rows, norms, out=rows, where=norms > 0)
    return EmbeddingMatrix(rows=rows, normalized=True, approach=Approach(ApproachName.TFIDF))


def embed_via_provider(
    endpoint: str,
    sentence_set: SentenceSet,
    approach: Approach | None = None,
    timeout: float = 30.0,
) -> EmbeddingMatrix:
    """POST all texts (question last) to an /embed provider.

    The provider must return one embedding per text, in order, plus a
    normalized flag; anything else is a protocol error.
    """
    texts = sentence_set.texts
    url = endpoint.rstrip("/") + "/embed"
    try:
        response = requests.post(url, json={"texts": texts}, timeout=timeout)
    except requests.RequestException as exc:
        raise ProviderUnavailableError(f"embedding provider unreachable: {exc}") from exc
    if response.status_code != 200:
        raise ProviderUnavailableError(
            f"embedding provider returned status {response.status_code}"
        )
    try:
        payload = response.json()
        embeddings = payload["embeddings"]
        normalized = bool(payload["normalized"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ProtocolError(f"malformed provider response: {exc}") from exc

    if not isinstance(embeddings, list) or len(embeddings) != len(texts):
        got = len(embeddings) if isinstance(embeddings, list) else type(embeddings).__name__
        raise ProtocolError(f"provider returned {got} rows for {len(texts)} texts")
    try:
        dims = {len(row) for row in embeddings}
    except TypeError as exc:
        raise ProtocolError(f"provider returned non-vector rows: {exc}") from exc
    if len(dims) != 1 or dims == {0}:
        raise ProtocolError(f"provider returned ragged or empty vectors: dims={sorted(dims)}")
    try:
        rows = np.asarray(embeddings, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProtocolError(f"provider returned non-numeric embeddings: {exc}") from exc
    try:
        return EmbeddingMatrix(rows=rows, normalized=normalized, approach=approach)
    except ValueError as exc:
        raise ProtocolError(str(exc)) from exc


def embed(
    approach: Approach,
    sentence_set: SentenceSet,
    corpus: Corpus | None = None,
    fit_on_corpus: bool = False,
    timeout: float = 30.0,
) -> EmbeddingMatrix:
    """Dispatch to the tf-idf route or the provider route.

    tf-idf fits on the sentences plus question of the current exchange
    by default; ``fit_on_corpus`` switches the fitting texts to the
    corpus documents instead.
    """
    if approach.name is ApproachName.TFIDF:
        if fit_on_corpus:
            if corpus is None:
                raise ValueError("fit_on_corpus requires a corpus")
            fit_texts = [doc.combined_text for doc in corpus.documents]
        else:
            fit_texts = sentence_set.texts
        model = fit_tfidf(fit_texts)
        return transform_tfidf(model, sentence_set)
    return embed_via_provider(approach.endpoint, sentence_set, approach=approach, timeout=timeout)
