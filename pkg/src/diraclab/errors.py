"""Exception types shared across the package.

The split mirrors the exit-code contract of the command line driver:
``UsageError`` (and plain ``ValueError`` raised during input parsing) maps to
exit code 2, every other ``DiracLabError`` maps to exit code 1.
"""


class DiracLabError(Exception):
    """Base class for invariant or contract violations."""


class UsageError(DiracLabError):
    """Bad user input: malformed config, out-of-domain argument, missing file."""


class InvalidProfileError(UsageError):
    """Warping profile is non-positive or otherwise unusable."""


class ResolutionError(UsageError):
    """Requested output exceeds what the mesh / sample density supports."""


class DiscretizationFailureError(DiracLabError):
    """A discrete solve produced results outside its validity regime
    (e.g. non-real eigenvalues of the advective finite-difference matrix)."""


class TruncationRiskError(DiracLabError):
    """A truncated transverse spectrum cannot guarantee the requested number
    of global eigenvalues."""


class FlowStuckError(DiracLabError):
    """The metric flow cannot take a step although the eigenvalue is nonzero."""


class NotCoveredError(UsageError):
    """Query outside the tabulated range of the fact catalog."""


class FactNotFoundError(UsageError):
    """No catalog row matches the query."""
