"""Exception types shared across the pipeline."""


class LatentCptError(Exception):
    """Base class for every error raised by this package."""


# --- data ------------------------------------------------------------------


class EmptyBin(LatentCptError):
    """A 5 cm depth bin inside [0, 10) m received no samples."""

    def __init__(self, bin_index: int):
        self.bin_index = int(bin_index)
        lo = 0.05 * self.bin_index
        super().__init__(
            f"no samples in 5 cm bin {self.bin_index} ([{lo:.2f}, {lo + 0.05:.2f}) m)"
        )


class NonPositiveValue(LatentCptError):
    """A value that must be strictly positive is zero or negative."""


class LengthMismatch(LatentCptError):
    """Two arrays that must have equal length do not."""


class TooFewItems(LatentCptError):
    """Not enough items to perform the requested split."""


class DuplicateId(LatentCptError):
    """A site id occurs more than once where keys must be unique."""


class WindowOutOfRange(LatentCptError):
    """The 4 m feature window does not sufficiently intersect the profile."""


# --- autoencoder -----------------------------------------------------------


class ZeroStd(LatentCptError):
    """Channel statistics cannot be fit on a constant array."""


class NonFiniteInput(LatentCptError):
    """An input array contains NaN or infinity."""


class DivergedLoss(LatentCptError):
    """Training loss became non-finite."""


class RankDeficient(LatentCptError):
    """Training data variance is too degenerate for the requested components."""


# --- gbdt ------------------------------------------------------------------


class SingleClassTraining(LatentCptError):
    """Classifier training requires both classes in the training rows."""


class DimensionMismatch(LatentCptError):
    """Feature vector length does not match the model's feature count."""


class MissingInput(LatentCptError):
    """A feature block required by the model variant was not provided."""


class UndefinedMetric(LatentCptError):
    """A classification metric has a zero denominator."""

    def __init__(self, name: str):
        self.metric = name
        super().__init__(f"metric '{name}' is undefined (zero denominator)")


# --- explain ---------------------------------------------------------------


class EmptyBackground(LatentCptError):
    """Shapley attribution needs at least one background row."""


class IndexOutOfRange(LatentCptError):
    """Latent coordinate index outside the latent dimension."""


class UnknownFeature(LatentCptError):
    """A feature name is not part of the explained model."""


# --- cli -------------------------------------------------------------------


class ConfigError(LatentCptError):
    """Pipeline configuration file is invalid."""


class MissingArtifact(LatentCptError):
    """A stage prerequisite file is not on disk."""

    def __init__(self, path, hint: str = ""):
        self.path = str(path)
        msg = f"missing required artifact: {self.path}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)
