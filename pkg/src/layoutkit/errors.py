"""Exception and warning types shared across the toolkit."""

from __future__ import annotations


class LayoutKitError(Exception):
    """Base class for all toolkit errors."""


class MalformedGeometryError(LayoutKitError):
    """A geometric value violates its basic shape contract."""


class DegenerateBaselineError(LayoutKitError):
    """A baseline has zero total length, so no midpoint exists."""


class AltoParseError(LayoutKitError):
    """The input is not well-formed XML."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class AltoSchemaError(LayoutKitError):
    """Well-formed XML that is missing required ALTO structure."""


class PageIntegrityError(LayoutKitError):
    """A line references a region that is not present on its page."""


class UnknownClassError(LayoutKitError):
    """A label or class index is not covered by the label map."""


class DegenerateRegionError(LayoutKitError):
    """A region has no area left after clamping to the page."""


class RecordFormatError(LayoutKitError):
    """A detection record file has a malformed or inconsistent line."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class ExportError(LayoutKitError):
    """Dataset export cannot proceed (bad split assignment, collisions, ...)."""


class EvaluationError(LayoutKitError):
    """Evaluation inputs are unusable (mismatched keys, no ground truth)."""


class LayoutKitWarning(UserWarning):
    """Base class for recoverable data issues reported during processing."""


class AltoWarning(LayoutKitWarning):
    """Tolerated irregularity in an ALTO file (clamped or skipped content)."""


class RecordWarning(LayoutKitWarning):
    """Tolerated irregularity while converting to or from detection records."""


class DispatchWarning(LayoutKitWarning):
    """A line needed a fallback during region assignment."""
