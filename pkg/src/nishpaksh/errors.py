"""Error hierarchy shared by every module.

Each error carries a stable string code. The HTTP layer and the CLI map
codes to status codes / exit codes; the codes themselves are frozen and
must never be renamed once released.
"""

from __future__ import annotations

from typing import Any


class AuditError(Exception):
    """Base class for every domain error raised by this package."""

    code = "AUDIT_ERROR"

    def __init__(self, message: str, details: Any = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.details is not None:
            out["details"] = self.details
        return out


# -- dataset ingestion ------------------------------------------------------

class MissingColumnError(AuditError):
    code = "MISSING_COLUMN"


class NonBinaryValueError(AuditError):
    code = "NON_BINARY_VALUE"


class EmptyGroupError(AuditError):
    code = "EMPTY_GROUP"


class EmptyFileError(AuditError):
    code = "EMPTY_FILE"


class MissingValueError(AuditError):
    code = "MISSING_VALUE"


class UnknownAttributeError(AuditError):
    code = "UNKNOWN_ATTRIBUTE"


class SchemaValidationError(AuditError):
    code = "SCHEMA_VALIDATION"


# -- metrics ----------------------------------------------------------------

class TooManyDegenerateReplicatesError(AuditError):
    code = "TOO_MANY_DEGENERATE_REPLICATES"


class UnknownMetricError(AuditError):
    code = "UNKNOWN_METRIC"


# -- survey scoring ---------------------------------------------------------

class MissingResponseError(AuditError):
    code = "MISSING_RESPONSE"


class DuplicateResponseError(AuditError):
    code = "DUPLICATE_RESPONSE"


class IncompleteDomainsError(AuditError):
    code = "INCOMPLETE_DOMAINS"


class OutOfRangeError(AuditError):
    code = "OUT_OF_RANGE"


# -- configuration ----------------------------------------------------------

class UnsupportedTaskError(AuditError):
    code = "UNSUPPORTED_TASK"


class InvalidOverrideError(AuditError):
    code = "INVALID_OVERRIDE"


class InvalidPolicyError(AuditError):
    code = "INVALID_POLICY"


# -- composite scoring ------------------------------------------------------

class VectorMismatchError(AuditError):
    code = "VECTOR_MISMATCH"


class EmptyListError(AuditError):
    code = "EMPTY_LIST"


class MissingResultError(AuditError):
    code = "MISSING_RESULT"


# -- session workflow -------------------------------------------------------

class StageOrderViolationError(AuditError):
    code = "STAGE_ORDER_VIOLATION"


class StageNotCompletedError(AuditError):
    code = "STAGE_NOT_COMPLETED"


class PayloadValidationError(AuditError):
    code = "PAYLOAD_VALIDATION_ERROR"


class SchemaVersionMismatchError(AuditError):
    code = "SCHEMA_VERSION_MISMATCH"


class CorruptCheckpointError(AuditError):
    code = "CORRUPT_CHECKPOINT"


class SessionNotFoundError(AuditError):
    code = "SESSION_NOT_FOUND"


# -- reporting --------------------------------------------------------------

class SessionIncompleteError(AuditError):
    code = "SESSION_INCOMPLETE"


class UnknownFormatError(AuditError):
    code = "UNKNOWN_FORMAT"


class PayloadMissingError(AuditError):
    code = "PAYLOAD_MISSING"


# -- fixtures ---------------------------------------------------------------

class DegenerateSpecError(AuditError):
    code = "DEGENERATE_SPEC"
