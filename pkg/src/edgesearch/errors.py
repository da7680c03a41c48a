"""Exception hierarchy shared across the package."""


class EdgeSearchError(Exception):
    """Base class for all errors raised by this package."""


class ResourceError(EdgeSearchError):
    """A required on-disk resource is missing or unreadable."""


class ParseError(ResourceError):
    """A resource file is present but malformed.

    The message names the offending file and line number.
    """


class ConfigError(EdgeSearchError):
    """Invalid or incomplete configuration."""


class CorpusError(EdgeSearchError):
    """The document corpus cannot be ingested."""


class TrainingError(EdgeSearchError):
    """A model cannot be trained from the supplied data."""


class InterestUnavailableError(EdgeSearchError):
    """No interest can be predicted: empty history and no configured default."""


class ConsistencyError(EdgeSearchError):
    """Internal invariant violated between pipeline stages."""
