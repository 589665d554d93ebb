"""Exception hierarchy shared across pipeline stages."""


class PersonaSynthError(Exception):
    pass


class ConfigError(PersonaSynthError):
    pass


class MalformedResponse(PersonaSynthError):
    """Backend output could not be parsed into the expected JSON shape."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class TextTooLong(PersonaSynthError):
    pass


class CorruptRecord(PersonaSynthError):
    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


# --- backend errors -------------------------------------------------------


class BackendError(PersonaSynthError):
    """Any failure talking to a completion or embedding provider."""


class FatalBackendError(BackendError):
    """Errors that must abort a run instead of skipping the current record."""


class AuthError(FatalBackendError):
    pass


class BackendConfigError(FatalBackendError):
    pass


class CassetteMiss(FatalBackendError):
    def __init__(self, key: str):
        super().__init__(f"no cassette entry for key {key}")
        self.key = key


class TransientBackendError(BackendError):
    """Retryable failure (HTTP 429/5xx, timeouts, dropped connections)."""

    def __init__(self, message: str, status: int | None = None, timeout: bool = False):
        super().__init__(message)
        self.status = status
        self.timeout = timeout


class RetriesExhausted(BackendError):
    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class RateLimitedExhausted(RetriesExhausted):
    pass


class BackendTimeout(RetriesExhausted):
    pass


class DimensionMismatch(PersonaSynthError):
    pass


class ZeroNormEmbedding(PersonaSynthError):
    pass


class IncompatibleSignatures(PersonaSynthError):
    pass


# --- synthesis / evaluation ----------------------------------------------


class UnknownScenario(PersonaSynthError):
    pass


class MissingModifier(PersonaSynthError):
    pass


class DemoPersonaMissing(PersonaSynthError):
    pass


class InvalidPromptSpec(PersonaSynthError):
    pass


class JudgeUnavailable(PersonaSynthError):
    pass


class InsufficientPairs(PersonaSynthError):
    def __init__(self, found: int, wanted: int, center: float):
        super().__init__(f"only {found} pairs in band {center:g}, wanted {wanted}")
        self.found = found
        self.wanted = wanted
