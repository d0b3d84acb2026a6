"""Regex/string cleanup of raw generated answers.

A raw generation is chunked into sentences, then each sentence goes
through four operations: collapse whitespace runs, collapse repeated
'.'/'!'/'?' marks, strip bracket debris (empty groups and unmatched
bracket characters), and finally re-split anything still holding an
interior period. Only ASCII '.', '!' and '?' are treated as sentence
terminators; there is no abbreviation handling by design.
"""

import re
from dataclasses import dataclass

from .errors import EmptyAnswerError

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
_MARK_RUN = re.compile(r"([.!?])\1+")
_EMPTY_GROUP = re.compile(r"\(\s*\)|\[\s*\]")
_INTERIOR_PERIOD = re.compile(r"(?<=\.)(?!$)")


@dataclass(frozen=True)
class SentenceSet:
    """Cleaned sentences plus the question they will be ranked against."""

    sentences: tuple[str, ...]
    question: str

    def __post_init__(self):
        if not self.question:
            raise ValueError("question must be non-empty")
        for s in self.sentences:
            if not s.strip():
                raise ValueError("sentences must be non-empty")
            if "\n" in s or "  " in s:
                raise ValueError(f"sentence not normalized: {s!r}")

    @property
    def texts(self) -> list[str]:
        """All texts to embed, question last."""
        return [*self.sentences, self.question]


def split_sentences(text: str) -> list[str]:
    """Chunk text at '.', '!' or '?' followed by whitespace or end of text.

    The terminator stays on its sentence; the separating whitespace is
    consumed; empty fragments are dropped.
    """
    return [frag for frag in _SENTENCE_BOUNDARY.split(text) if frag.strip()]


def _strip_unmatched_brackets(s: str) -> str:
    drop: set[int] = set()
    for opener, closer in (("(", ")"), ("[", "]")):
        stack: list[int] = []
        for i, ch in enumerate(s):
            if ch == opener:
                stack.append(i)
            elif ch == closer:
                if stack:
                    stack.pop()
                else:
                    drop.add(i)
        drop.update(stack)
    if not drop:
        return s
    return "".join(ch for i, ch in enumerate(s) if i not in drop)


def _normalize_once(s: str) -> str:
    s = " ".join(s.split())
    s = _MARK_RUN.sub(r"\1", s)
    while True:
        stripped = _EMPTY_GROUP.sub("", s)
        if stripped == s:
            break
        s = stripped
    s = _strip_unmatched_brackets(s)
    return " ".join(s.split())


def normalize_sentence(s: str) -> str:
    """Apply the whitespace, punctuation-run and bracket cleanup steps,
    iterated to a fixpoint (bracket removal can expose new mark runs).

    Returns the empty string when nothing survives; the caller drops
    such sentences.
    """
    while True:
        out = _normalize_once(s)
        if out == s:
            return out
        s = out


def _resplit_interior_periods(s: str) -> list[str]:
    parts = _INTERIOR_PERIOD.split(s)
    return [p.strip() for p in parts if p.strip()]


def _clean_pass(text: str) -> list[str]:
    sentences: list[str] = []
    for fragment in split_sentences(text):
        normalized = normalize_sentence(fragment)
        if not normalized:
            continue
        # re-splitting can orphan half of a matched bracket pair, so each
        # piece is normalized again
        for piece in _resplit_interior_periods(normalized):
            cleaned = normalize_sentence(piece)
            if cleaned:
                sentences.append(cleaned)
    return sentences


def clean_answer(raw: str, question: str) -> SentenceSet:
    """Run the full cleanup over a raw generation.

    The split/normalize/re-split pass repeats until the sentence list is
    stable: normalization can expose new sentence boundaries (a removed
    bracket leaving 'x! y'), and a stable list is what makes the whole
    operation idempotent. Raises EmptyAnswerError (carrying the raw
    text) when no sentence survives.
    """
    if not question:
        raise ValueError("question must be non-empty")
    sentences = _clean_pass(raw)
    while sentences:
        again = _clean_pass(" ".join(sentences))
        if again == sentences:
            break
        sentences = again
    if not sentences:
        raise EmptyAnswerError("no usable answer: every sentence was filtered out", raw=raw)
    return SentenceSet(sentences=tuple(sentences), question=question)
