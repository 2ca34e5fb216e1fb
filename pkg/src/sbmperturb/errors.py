"""Exception and warning classes raised across the package."""


class SBMError(ValueError):
    """Base class for every error raised by sbmperturb."""


# model construction / labels
class NonSymmetricB(SBMError):
    pass


class ProbabilityOutOfRange(SBMError):
    pass


class CommunityTooSmall(SBMError):
    pass


class LabelOutOfRange(SBMError):
    pass


# estimation
class KTooLarge(SBMError):
    pass


class EmptyCluster(SBMError):
    pass


class MismatchedLength(SBMError):
    pass


# perturbation stack / statistics
class DegenerateEstimate(SBMError):
    """Some plug-in probability is exactly 0 or 1 and no clamp was supplied."""


class ClampedStack(SBMError):
    """Exact identities were requested from a stack built with clamping."""


class NonSymmetric(SBMError):
    pass


class NoConvergence(SBMError):
    pass


class DegenerateVariance(SBMError):
    """``2L - 2`` is too close to zero to standardize by."""


class IdentityViolation(SBMError):
    """An exact finite-sample identity failed its inline audit."""


# reference laws
class InvalidLaw(SBMError):
    pass


class InsufficientReps(SBMError):
    pass


class EmptySample(SBMError):
    pass


# Monte Carlo
class AllFlagged(SBMError):
    pass


class TooManyFlagged(SBMError):
    pass


# file formats
class ParseError(SBMError):
    pass


class SchemaViolation(SBMError):
    pass


class SelfLoop(SBMError):
    pass


class NodeIndexOutOfRange(SBMError):
    pass


class DuplicateEdgeWarning(UserWarning):
    pass
