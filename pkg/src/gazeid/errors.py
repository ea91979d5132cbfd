"""Exception hierarchy shared by all gazeid subsystems."""


class GazeIdError(Exception):
    """Base class for all gazeid errors."""


class ConfigError(GazeIdError):
    """A configuration value is out of its legal range."""


class DecimationRatioError(GazeIdError):
    """Source rate is not an integer multiple of the target rate."""


class SignalTooShortError(GazeIdError):
    """Recording has too few samples for the requested operation."""


class DegenerateCorpusError(GazeIdError):
    """Normalization corpus has a zero-variance channel."""


class InputTooShortError(GazeIdError):
    """Network input shorter than the receptive field."""


class InvalidInputError(GazeIdError):
    """Network input contains non-finite values."""


class DegenerateBatchError(GazeIdError):
    """Training batch lacks the class structure the loss requires."""


class DataError(GazeIdError):
    """Training corpus is empty or has too few users."""


class ModelMismatchError(GazeIdError):
    """Embeddings produced by different models cannot be compared."""


class ValidationError(GazeIdError):
    """A request or record field fails validation."""


class NotFoundError(GazeIdError):
    """Requested user is not enrolled."""


class RecordingRejectedError(GazeIdError):
    """Recording failed pre-flight validation; carries the report."""

    def __init__(self, report):
        super().__init__(f"recording rejected: {report}")
        self.report = report


class DegenerateMatrixError(GazeIdError):
    """Score matrix lacks genuine or impostor cells."""


class ProtocolError(GazeIdError):
    """Evaluation protocol references sessions missing from the corpus."""


class CheckpointFormatError(GazeIdError):
    """Model checkpoint has an unknown or corrupt format."""


class StoreFormatError(GazeIdError):
    """Template store file has an unknown format version."""
