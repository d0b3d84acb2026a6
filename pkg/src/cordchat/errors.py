"""Exception types raised across the answer pipeline.

Pipeline-facing errors carry a ``stage`` attribute (generate, clean,
embed or rank) so callers such as the HTTP service can attribute
failures to the step that produced them.
"""


class ChatbotError(Exception):
    """Base class for all package errors."""

    stage: str | None = None


# corpus ingestion

class ArticleParseError(ChatbotError):
    """Article record is malformed; message names the missing field."""


class RejectedDocumentError(ChatbotError):
    """Article parsed but carries no usable text (empty abstract and body)."""


class EmptyCorpusError(ChatbotError):
    """Source directory yielded zero parseable documents."""


# generation (stage 1)

class BackendUnavailableError(ChatbotError):
    stage = "generate"


class EmptyGenerationError(ChatbotError):
    stage = "generate"


# cleanup (stages 2-3)

class EmptyAnswerError(ChatbotError):
    """No sentence survived cleanup; carries the raw generated text."""

    stage = "clean"

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


# embedding (stage 4a)

class EmptyVocabularyError(ChatbotError):
    stage = "embed"


class ProviderUnavailableError(ChatbotError):
    stage = "embed"


class ProtocolError(ChatbotError):
    """Provider response violates the /embed wire contract."""

    stage = "embed"


# ranking (stage 4b)

class MetricMismatchError(ChatbotError):
    """Inner product requested on a non-normalized embedding matrix."""

    stage = "rank"


# evaluation harness

class DegenerateSampleError(ChatbotError):
    """Statistic undefined: zero variance or zero standard deviation."""


class PairingError(ChatbotError):
    """Annotator rating sets do not cover identical cells."""


class ReportFormatError(ChatbotError):
    """Two-annotator report layout requested with a different count."""
