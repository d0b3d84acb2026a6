"""Corpus-backed question answering with similarity-ranked answers.

The pipeline generates a raw answer to a question, cleans it with
regex/string filters, ranks its sentences by semantic similarity to the
question through pluggable embedding back-ends, and composes the top-k
sentences into the final response. An evaluation harness and an HTTP
chat service sit on top.
"""

from .corpus import Corpus, Document, build_corpus, load_article, term_present
from .embed import (
    Approach,
    ApproachName,
    EmbeddingMatrix,
    TfidfModel,
    embed,
    embed_via_provider,
    fit_tfidf,
    transform_tfidf,
)
from .generator import GenerationRequest, RawAnswer, generate_remote, generate_stub
from .pipeline import (
    BatchResult,
    FinalResponse,
    GeneratorMode,
    PipelineConfig,
    answer_question,
    batch_generate,
)
from .rank import (
    ComposedAnswer,
    Metric,
    SimilarityRanking,
    compose_answer,
    full_similarity_matrix,
    select_top_k,
    similarity_to_question,
)
from .textclean import SentenceSet, clean_answer, normalize_sentence, split_sentences

__version__ = "0.1.0"

__all__ = [
    "Approach",
    "ApproachName",
    "BatchResult",
    "ComposedAnswer",
    "Corpus",
    "Document",
    "EmbeddingMatrix",
    "FinalResponse",
    "GenerationRequest",
    "GeneratorMode",
    "Metric",
    "PipelineConfig",
    "RawAnswer",
    "SentenceSet",
    "SimilarityRanking",
    "TfidfModel",
    "answer_question",
    "batch_generate",
    "build_corpus",
    "clean_answer",
    "compose_answer",
    "embed",
    "embed_via_provider",
    "fit_tfidf",
    "full_similarity_matrix",
    "generate_remote",
    "generate_stub",
    "load_article",
    "normalize_sentence",
    "select_top_k",
    "similarity_to_question",
    "split_sentences",
    "term_present",
    "transform_tfidf",
]
