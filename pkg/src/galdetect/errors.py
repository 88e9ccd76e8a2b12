"""Exception hierarchy.

Three buckets matter to the CLI exit codes: configuration problems
(:class:`ConfigError`), malformed input data (:class:`DataError`), and
everything else raised while the pipeline runs (plain :class:`GalError`
subclasses).
"""


class GalError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GalError):
    """Bad or inconsistent experiment configuration."""


class DataError(GalError):
    """Input files that do not match the expected layout."""


# --- CSV ingestion ---------------------------------------------------------

class MalformedHeader(DataError):
    pass


class RaggedRow(DataError):
    pass


class NonNumericCell(DataError):
    pass


class LengthMismatch(DataError):
    pass


class NonBinaryCell(DataError):
    pass


class WrongEventColumns(DataError):
    pass


class IndexOutOfRange(GalError):
    pass


# --- signal processing -----------------------------------------------------

class EmptyInput(GalError):
    pass


class TooShortForLevels(GalError):
    def __init__(self, message: str, max_levels: int):
        super().__init__(message)
        self.max_levels = max_levels


class InconsistentLengths(GalError):
    pass


class InvalidCutoff(GalError):
    pass


class DegenerateChannel(GalError):
    pass


class ChannelMismatch(GalError):
    pass


# --- windowing -------------------------------------------------------------

class RecordingTooShort(GalError):
    pass


class InsufficientSeries(GalError):
    pass


# --- models ----------------------------------------------------------------

class ShapeMismatch(GalError):
    pass


class BatchTooSmall(GalError):
    pass


class EmptyTrainingSet(GalError):
    pass


class NonFiniteLoss(GalError):
    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class CheckpointMismatch(GalError):
    pass


# --- evaluation ------------------------------------------------------------

class SingleClass(GalError):
    pass


class AllSingleClass(GalError):
    pass
