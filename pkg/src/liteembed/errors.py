"""Exception hierarchy shared by all liteembed modules."""


class LiteEmbedError(Exception):
    """Base class for every error raised by this package."""


# -- vector / set level ------------------------------------------------------

class ZeroVector(LiteEmbedError):
    """A vector with (near-)zero L2 norm where a direction is required."""


class DimensionMismatch(LiteEmbedError):
    """Operands declare incompatible dimensions."""


class EmptySet(LiteEmbedError):
    """An embedding set that must be nonempty is empty."""


class NonFiniteVector(LiteEmbedError):
    """A vector contains NaN or Inf components."""


class DuplicateName(LiteEmbedError):
    """Two entries in one set share a name."""


# -- subspace ----------------------------------------------------------------

class TooFewPoints(LiteEmbedError):
    """Not enough points to fit the requested decomposition."""


class DegenerateSet(LiteEmbedError):
    """All points identical; no principal direction exists."""


class InvalidSplit(LiteEmbedError):
    """Split index outside [1, D-1]."""


class InsufficientLabels(LiteEmbedError):
    """Category labels too sparse for a cross/within distance ratio."""


# -- neighborhood ------------------------------------------------------------

class EmptyCandidates(LiteEmbedError):
    """Candidate set for negative filtering is empty."""


class EmptyExemplars(LiteEmbedError):
    """Exemplar image set is empty."""


class UnresolvedName(LiteEmbedError):
    """Candidate names missing from the text lookup."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"unresolved names: {', '.join(self.missing)}")


class InsufficientCandidates(LiteEmbedError):
    """Fewer resolvable candidates than the requested keep count."""


# -- objective ---------------------------------------------------------------

class ZeroProjection(LiteEmbedError):
    """A vector is (near-)orthogonal to the subspace it must project into."""


class NonFinite(LiteEmbedError):
    """A function evaluation produced NaN or Inf."""


# -- optimizer ---------------------------------------------------------------

class NonFiniteGradient(LiteEmbedError):
    """Gradient passed to the optimizer contains NaN or Inf."""


class OutOfRange(LiteEmbedError):
    """Step index outside the configured schedule."""


class SplitInfeasible(LiteEmbedError):
    """Fitted basis has rank < 2, so no coarse/fine split exists."""


class DuplicateClass(LiteEmbedError):
    """A class name was registered twice."""


# -- evaluation --------------------------------------------------------------

class UnknownLabel(LiteEmbedError):
    """A ground-truth label has no matching class embedding."""


class GalleryTooSmall(LiteEmbedError):
    """Retrieval gallery smaller than the requested cutoff."""


# -- file formats ------------------------------------------------------------

class FormatError(LiteEmbedError):
    """Base class for file parsing errors."""


class BadMagic(FormatError):
    """File does not start with the EMB1 magic bytes."""


class BadVersion(FormatError):
    """Unsupported container version."""


class Truncated(FormatError):
    """File ends before the declared payload."""


class NonUtf8Name(FormatError):
    """A record name is not valid UTF-8."""


class InvalidTemplate(LiteEmbedError):
    """Prompt template violates the single-placeholder contract."""


class ConfigError(LiteEmbedError):
    """Run configuration is malformed or references missing files."""
