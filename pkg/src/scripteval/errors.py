"""Exception types shared across the toolkit."""

from __future__ import annotations


class ScriptEvalError(Exception):
    """Base class for every error raised by this package."""


class MalformedTimecode(ScriptEvalError):
    """A timestamp string could not be interpreted."""


class ParseError(ScriptEvalError):
    """Input text is not valid JSON (after unwrapping a fenced block)."""


class SchemaError(ScriptEvalError):
    """Parsed JSON does not satisfy the script schema.

    Individual event problems are collected into ``problems`` so a single
    pass reports every defect instead of stopping at the first one.
    """

    def __init__(self, message: str, problems: list[str] | None = None):
        self.problems = problems or []
        if self.problems:
            message = message + "\n  - " + "\n  - ".join(self.problems)
        super().__init__(message)


class NoComparableContent(ScriptEvalError):
    """Neither text component exists on either side of a pair."""


class JudgeUnavailable(ScriptEvalError):
    """The remote judge failed after retries and degradation is disabled."""


class TemplateMissing(ScriptEvalError):
    """No judge prompt template is registered for the requested field."""


class ManifestError(ScriptEvalError):
    """A corpus manifest is unreadable or references missing files."""


class ConfigError(ScriptEvalError):
    """A configuration file has unknown keys or unusable values."""
