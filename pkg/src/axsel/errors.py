"""Common exception base so the CLI can report any domain failure uniformly."""


class AxselError(Exception):
    """Base class for all errors raised by this package."""
