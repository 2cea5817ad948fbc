"""Exception hierarchy shared by every module."""


class LfapproxError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(LfapproxError):
    """Evaluation point is numerically indistinguishable from a pole."""


class PrecisionError(LfapproxError):
    """The working precision cannot support the requested accuracy."""


class ConvergenceError(LfapproxError):
    """An iterative scheme exhausted its budget without converging."""


class ToleranceError(LfapproxError):
    """A consistency check failed beyond numerical tolerance."""


class ParseError(LfapproxError):
    """Malformed coefficient file (bad line, gap in indices, ...)."""


class NormalizationError(LfapproxError):
    """Coefficient data is not Hecke-normalized (a_1 != 1)."""


class ResourceError(LfapproxError):
    """Request exceeds the configured memory/size budget."""


class CutoffError(LfapproxError):
    """Coefficient table too short for the certified series cutoff."""


class RegimeError(LfapproxError):
    """Inputs fall outside the regime where a bound is valid."""


class SeparationError(LfapproxError):
    """Poles too close together for an isolating contour."""


class SearchError(LfapproxError):
    """A constrained search (e.g. for a sparse contour) failed."""


class AmbiguityError(LfapproxError):
    """A classification landed inside the noise band."""
