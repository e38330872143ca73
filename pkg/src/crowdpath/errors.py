"""Exception types shared across the package."""


class CrowdPathError(Exception):
    """Base class for package errors."""


class UnknownRecordError(CrowdPathError, KeyError):
    def __init__(self, record):
        super().__init__(record)
        self.record = record

    def __str__(self):
        return f"unknown record: {self.record!r}"


class SelfPairError(CrowdPathError, ValueError):
    def __init__(self, record):
        super().__init__(record)
        self.record = record

    def __str__(self):
        return f"a record cannot be paired with itself: {self.record!r}"


class OracleSizeError(CrowdPathError, ValueError):
    """Raised when the exhaustive score oracle is asked about too large a graph."""


class ConfigError(CrowdPathError):
    """Bad experiment or service configuration (CLI exit code 1)."""


class DataError(CrowdPathError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class ReplayExhaustedError(CrowdPathError):
    """A recorded vote stream has no more votes for the requested pair."""

    def __init__(self, pair):
        super().__init__(pair)
        self.pair = pair

    def __str__(self):
        return f"no recorded votes left for pair {self.pair!r}"
