"""Exception hierarchy shared across the toolkit.

Every domain failure raises a dedicated subclass so callers (CLI, service,
tests) can branch on the exact condition instead of string matching.
"""


class ArtigenError(Exception):
    """Base class for all toolkit errors."""


# --- connectivity graph validation -----------------------------------------

class GraphValidationError(ArtigenError):
    """A connectivity graph violates a structural invariant."""


class CycleDetected(GraphValidationError):
    pass


class MultipleRoots(GraphValidationError):
    pass


class DisconnectedNode(GraphValidationError):
    pass


class RootNotBase(GraphValidationError):
    pass


class DanglingParent(GraphValidationError):
    pass


class TooManyParts(ArtigenError):
    """Part count exceeds the fixed padding capacity."""


# --- kinematics -------------------------------------------------------------

class DegenerateExtent(ArtigenError):
    """Union bounding box has no positive extent on any axis."""


class InvalidQ(ArtigenError):
    """Normalized joint coordinate outside [0, 1]."""


class InvalidK(ArtigenError):
    """State count must be at least 2."""


# --- dataset ----------------------------------------------------------------

class ParseError(ArtigenError):
    """Object or manifest file could not be parsed."""


class ValidationError(ArtigenError):
    """Loaded object failed validation; wraps the underlying error."""

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause


class MaskGraphMismatch(ArtigenError):
    """Padding-mask count does not match graph node count."""


class BadRatios(ArtigenError):
    """Split ratios do not sum to 1."""


# --- conditioning -----------------------------------------------------------

class BadMagic(ArtigenError):
    """Feature file does not start with the expected magic bytes."""


class ShapeMismatch(ArtigenError):
    """Tensor or file payload shape disagrees with its declared shape."""


class TruncatedFile(ArtigenError):
    """Feature file payload is shorter than its header promises."""


class DegenerateProjection(ArtigenError):
    """Object cannot be projected onto the image plane."""


# --- graph prediction -------------------------------------------------------

class NoExamples(ArtigenError):
    """Prompt construction requires at least one in-context example."""


class NoParseableBlock(ArtigenError):
    """Model response contains no parseable graph block."""


class UnknownLabel(ArtigenError):
    """Label outside the vocabulary with no synonym-table entry."""


class Unreachable(ArtigenError):
    """Chat endpoint could not be reached."""


class AuthFailed(ArtigenError):
    """Chat endpoint rejected the credentials."""


class RetriesExhausted(ArtigenError):
    """All retry attempts failed."""


class NotSyntheticLayout(ArtigenError):
    """Feature grid does not use the synthetic 32-dim layout."""


# --- diffusion --------------------------------------------------------------

class BadBetas(ArtigenError):
    """Noise-schedule endpoints outside (0, 1) or out of order."""


class NonFiniteActivation(ArtigenError):
    """Denoiser produced NaN or infinite activations."""


class NonFiniteLoss(ArtigenError):
    """Training loss is NaN or infinite."""


class MissingImage(ArtigenError):
    """Operation requires image conditioning."""


class MissingGraph(ArtigenError):
    """Operation requires a connectivity graph."""


# --- retrieval --------------------------------------------------------------

class EmptyLibrary(ArtigenError):
    """Part library contains no entries."""


class NoDefaultMesh(ArtigenError):
    """No candidate mesh and no default mesh for a semantic label."""


class DegenerateMesh(ArtigenError):
    """Mesh has zero extent on some axis and cannot be fitted."""


class EmptyMesh(ArtigenError):
    """Mesh has no triangles to sample."""


# --- metrics ----------------------------------------------------------------

class EmptyMatrix(ArtigenError):
    """Assignment requires a nonempty cost matrix."""
