"""Exception types shared across the toolchain.

Config/schema problems map to CLI exit code 2, everything else to 1.
"""


class TomforgeError(Exception):
    """Base class for all toolchain errors."""


class ConfigError(TomforgeError):
    """Invalid or insufficient configuration (bad vocabularies, bad profile, ...)."""


class SchemaError(TomforgeError):
    """A dataset row failed validation."""

    def __init__(self, line: int, field: str, message: str = ""):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: field '{field}'" + (f": {message}" if message else ""))


class UnknownSentence(TomforgeError):
    """No story template matches this sentence."""

    def __init__(self, index: int, text: str):
        self.index = index
        self.text = text
        super().__init__(f"sentence {index}: no template matches: {text!r}")


class InconsistentPresence(TomforgeError):
    """Events contradict room-presence bookkeeping (double exit, absent mover, ...)."""


class UnknownQuestionForm(TomforgeError):
    """The question text matches none of the supported phrasings."""


class UnknownAgent(TomforgeError):
    """Referenced agent is not declared in the story."""


class UnknownObject(TomforgeError):
    """Referenced object is not declared in the story."""


class NoLocationEvidence(TomforgeError):
    """The story never places the queried object anywhere."""


class EmptyGroundTruth(TomforgeError):
    """Answer matching needs a non-empty ground truth."""


class EmptyInput(TomforgeError):
    """Statistics need at least one record."""


class InfillRejected(TomforgeError):
    """A rewrite dropped required surface tokens."""

    def __init__(self, missing_tokens: list[str]):
        self.missing_tokens = missing_tokens
        super().__init__(f"rewrite missing tokens: {missing_tokens}")


class JudgeParseError(TomforgeError):
    """Judge model never produced parseable JSON within the retry budget."""


class BindError(TomforgeError):
    """The scoring service could not bind its port."""


class ClientError(TomforgeError):
    """Base class for chat-client failures."""


class RequestTimeout(ClientError):
    """The endpoint did not answer within the configured timeout."""


class RateLimited(ClientError):
    """Still rate limited after exhausting retries."""


class HttpError(ClientError):
    """Non-retryable HTTP failure (or retryable one after exhausting retries)."""

    def __init__(self, status: int, detail: str = ""):
        self.status = status
        super().__init__(f"HTTP {status}" + (f": {detail}" if detail else ""))


class DecodeError(ClientError):
    """Endpoint response was not valid chat-completion JSON."""


class CacheMiss(ClientError):
    """Replay store has no entry for this request."""
