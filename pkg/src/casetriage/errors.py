"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """Invalid user-supplied data or configuration. The CLI maps this to exit code 1."""


class ModelFormatError(InputError):
    """Model file is corrupt or carries an unsupported format version."""


class TrainingDivergedError(RuntimeError):
    """Training loss became non-finite; usually the learning rate is too large."""


class ZeroPositivesError(ValueError):
    """A rank metric was requested for a label with no positive cases."""


class LowConfidenceCaseError(ValueError):
    """A hard label decision was requested for a case inside the uncertainty band."""
