"""Exception hierarchy shared by every scopeline module.

Each exception carries a stable ``code`` string; the HTTP service and the
CLI surface that code verbatim, so renaming one is a wire-format change.
"""

from __future__ import annotations


class ScopelineError(Exception):
    """Base class for all domain errors."""

    code = "Error"


class UnknownLabelCodeError(ScopelineError):
    code = "UnknownLabelCode"


class OutOfBoundsError(ScopelineError):
    code = "OutOfBounds"


class SegmentOverlapError(ScopelineError):
    code = "SegmentOverlap"


class EmptyTagError(ScopelineError):
    code = "EmptyTag"


class BadDistanceGranularityError(ScopelineError):
    code = "BadDistanceGranularity"


class UnknownAnnotationError(ScopelineError):
    code = "UnknownAnnotation"


class InvalidTimelineError(ScopelineError):
    """Raised when an operation requires an error-free timeline."""

    code = "InvalidTimeline"

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class AlreadyCompleteError(ScopelineError):
    code = "AlreadyComplete"


class MissingRecommendationError(ScopelineError):
    code = "MissingRecommendation"


class UnlocatedFindingError(ScopelineError):
    code = "UnlocatedFinding"

    def __init__(self, message: str, annotation_id: str):
        super().__init__(message)
        self.annotation_id = annotation_id


class EmptyInputError(ScopelineError):
    code = "EmptyInput"


class BadThresholdError(ScopelineError):
    code = "BadThreshold"


class SchemaVersionUnsupportedError(ScopelineError):
    code = "SchemaVersionUnsupported"


class CorruptFileError(ScopelineError):
    code = "CorruptFile"


class IoFailureError(ScopelineError):
    code = "IoFailure"


class RevisionConflictError(ScopelineError):
    code = "RevisionConflict"


class UnknownProcedureError(ScopelineError):
    code = "UnknownProcedure"


class UnknownReportError(ScopelineError):
    code = "UnknownReport"


class BindFailureError(ScopelineError):
    code = "BindFailure"
