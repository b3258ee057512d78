"""Exception hierarchy for the qcity pipeline.

Every failure mode that callers are expected to branch on gets its own
class; ingestion counts rejections by ``type(exc).__name__``.
"""


class QcityError(Exception):
    """Base class for all qcity errors."""


# --- observation validation -------------------------------------------------

class ValidationError(QcityError):
    """An observation record failed validation."""


class MissingField(ValidationError):
    pass


class BadCoordinate(ValidationError):
    pass


class BadTimestamp(ValidationError):
    pass


class BadPayload(ValidationError):
    pass


# --- spatial / temporal -----------------------------------------------------

class EmptyPartition(QcityError):
    pass


class DuplicateZoneId(QcityError):
    pass


class DegeneratePolygon(QcityError):
    pass


class PreEpochTimestamp(ValidationError):
    """Timestamps before the Unix epoch have no bucket on the timeline."""


# --- ingestion / fusion -----------------------------------------------------

class FileNotFound(QcityError):
    pass


class UnreadableLine(ValidationError):
    """A line that could not be parsed as a JSON observation record."""


class ConflictingDuplicate(ValidationError):
    """Same observation id seen again with different content."""


# --- analytics ----------------------------------------------------------------

class EmptyCorpus(QcityError):
    pass


class SeriesTooShort(QcityError):
    pass


class InsufficientHistory(QcityError):
    pass


class UnknownZone(QcityError):
    pass


# --- persistence --------------------------------------------------------------

class IoError(QcityError):
    pass


class InconsistentStore(QcityError):
    pass


class VersionMismatch(QcityError):
    pass


class CorruptRecord(QcityError):
    def __init__(self, message: str, path: str = "", line_no: int = 0):
        super().__init__(message)
        self.path = path
        self.line_no = line_no
