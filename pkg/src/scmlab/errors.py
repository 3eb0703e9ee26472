"""Exception types raised across the toolkit.

Grouped by the layer that raises them; all inherit from :class:`ScmLabError`
so callers can catch toolkit failures with a single except clause.
"""


class ScmLabError(Exception):
    """Base class for every error raised by this package."""


# --- structural model layer ---------------------------------------------

class CycleError(ScmLabError):
    """The induced graph contains a directed cycle (names one)."""


class UnknownParentError(ScmLabError):
    """An assignment references a parent that is not a declared node."""


class DuplicateAssignmentError(ScmLabError):
    """A node appears in more than one assignment."""


class UnknownNodeError(ScmLabError):
    """A node name is not part of the model or graph."""


class NonlinearModelError(ScmLabError):
    """Analytic solving requested for a model outside the linear-Gaussian
    family (custom assignments, or noise that is neither Gaussian nor
    constant)."""


class SingularCovarianceError(ScmLabError):
    """Regressor covariance block is numerically singular."""


# --- graph layer --------------------------------------------------------

class OverlappingSetsError(ScmLabError):
    """d-separation query sets X, Y, Z are not pairwise disjoint."""


class TooManyCandidatesError(ScmLabError):
    """Adjustment-set search asked to enumerate subsets of more than 20
    candidate nodes."""


# --- estimator layer ----------------------------------------------------

class RankDeficientError(ScmLabError):
    """Design matrix is rank deficient (smallest singular value below
    1e-10 times the largest)."""


class InsufficientDataError(ScmLabError):
    """Not enough rows for the requested fit or split."""


class DegenerateColumnError(ScmLabError):
    """A column required to vary has zero variance."""


class SeparationError(ScmLabError):
    """Logistic regression diverged: perfectly separated or degenerate
    target."""


class NonBinaryTargetError(ScmLabError):
    """Logistic target contains values outside {0, 1}."""


# --- flexible-model layer -----------------------------------------------

class DivergenceError(ScmLabError):
    """Training loss exceeded 1e6 times its initial value."""


class DegenerateTargetError(ScmLabError):
    """Zero-variance target under squared loss."""


class MissingFeatureError(ScmLabError):
    """Prediction input lacks a feature column the model was trained on."""


# --- explanation layer --------------------------------------------------

class TooManyFeaturesError(ScmLabError):
    """Exact coalition enumeration refused beyond 12 features."""


class EmptyBackgroundError(ScmLabError):
    """Shapley background sample has no rows."""


# --- experiment runner --------------------------------------------------

class UnknownExperimentError(ScmLabError):
    """Requested experiment name is not registered."""


class ConfigValidationError(ScmLabError):
    """Experiment configuration failed validation."""


class IoError(ScmLabError):
    """Reading or writing an experiment artifact failed."""
