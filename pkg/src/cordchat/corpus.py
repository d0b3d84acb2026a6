"""Article corpus ingestion.

Reads directories of CORD-19-schema JSON articles (``paper_id``,
``abstract`` and ``body_text`` lists whose entries carry a ``text``
field) and exposes the combined abstract+body text used for retrieval
and tf-idf fitting.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ArticleParseError, EmptyCorpusError, RejectedDocumentError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Document:
    """One ingested article. combined_text joins abstract and body with a
    single newline, skipping empty parts."""

    doc_id: str
    abstract_text: str
    body_text: str
    combined_text: str = field(default="")

    def __post_init__(self):
        expected = "\n".join(p for p in (self.abstract_text, self.body_text) if p)
        if not self.combined_text:
            object.__setattr__(self, "combined_text", expected)
        elif self.combined_text != expected:
            raise ValueError("combined_text does not match abstract/body join")
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")


@dataclass(frozen=True)
class Corpus:
    """Immutable document collection, ordered by doc_id."""

    documents: tuple[Document, ...]
    source_dir: str = ""
    rejected: int = 0

    def __len__(self) -> int:
        return len(self.documents)

    def save(self, path: str | Path) -> None:
        """Write the cache file: one JSON record per document."""
        with open(path, "w", encoding="utf-8") as fh:
            for doc in self.documents:
                record = {
                    "doc_id": doc.doc_id,
                    "abstract_text": doc.abstract_text,
                    "body_text": doc.body_text,
                }
                fh.write(json.dumps(record, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        """Read a cache file written by :meth:`save`."""
        docs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                docs.append(Document(
                    doc_id=record["doc_id"],
                    abstract_text=record["abstract_text"],
                    body_text=record["body_text"],
                ))
        docs.sort(key=lambda d: d.doc_id)
        return cls(documents=tuple(docs), source_dir=str(path))


def _paragraph_texts(record: dict, key: str) -> list[str]:
    if key not in record:
        raise ArticleParseError(f"article record is missing field '{key}'")
    entries = record[key]
    if not isinstance(entries, list):
        raise ArticleParseError(f"article field '{key}' is not a list")
    texts = []
    for entry in entries:
        if not isinstance(entry, dict) or "text" not in entry:
            raise ArticleParseError(f"entry in '{key}' is missing field 'text'")
        texts.append(entry["text"])
    return texts


def load_article(file_bytes: bytes, fallback_id: str = "") -> Document:
    """Parse one article record into a Document.

    ``fallback_id`` (normally the filename stem) is used when the record
    carries no paper identifier.
    """
    try:
        record = json.loads(file_bytes)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ArticleParseError(f"article record is not valid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise ArticleParseError("article record is not a JSON object")

    doc_id = record.get("paper_id") or fallback_id
    if not doc_id:
        raise ArticleParseError("article record is missing field 'paper_id'")

    abstract_text = "\n".join(_paragraph_texts(record, "abstract"))
    body_text = "\n".join(_paragraph_texts(record, "body_text"))
    if not abstract_text and not body_text:
        raise RejectedDocumentError(f"article '{doc_id}' has no abstract or body text")
    return Document(doc_id=str(doc_id), abstract_text=abstract_text, body_text=body_text)


def build_corpus(source_dir: str | Path) -> Corpus:
    """Ingest every parseable article file under ``source_dir``.

    Files that fail to parse are tallied and skipped; an empty result is
    an error. Document order is deterministic (sorted by doc_id) no
    matter how the filesystem enumerates the directory.
    """
    source = Path(source_dir)
    if not source.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {source}")

    documents: dict[str, Document] = {}
    rejected = 0
    for path in sorted(source.glob("*.json")):
        try:
            doc = load_article(path.read_bytes(), fallback_id=path.stem)
        except (ArticleParseError, RejectedDocumentError) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            rejected += 1
            continue
        if doc.doc_id in documents:
            log.warning("skipping %s: duplicate doc_id %s", path.name, doc.doc_id)
            rejected += 1
            continue
        documents[doc.doc_id] = doc

    if not documents:
        raise EmptyCorpusError(f"no parseable article files in {source}")
    ordered = tuple(documents[k] for k in sorted(documents))
    return Corpus(documents=ordered, source_dir=str(source), rejected=rejected)


def term_present(corpus: Corpus, term: str) -> bool:
    """Case-insensitive substring search over every combined_text."""
    if not term:
        raise ValueError("term must be non-empty")
    needle = term.lower()
    return any(needle in doc.combined_text.lower() for doc in corpus.documents)
