"""Exception types shared across the library."""


class BellshapeError(Exception):
    """Base class for all library-specific failures."""


class NonConvergence(BellshapeError):
    """Series summation could not reach the requested accuracy."""


class OrderTooLarge(BellshapeError):
    """Requested derivative order exceeds the configured cap."""


class QuadratureFailure(BellshapeError):
    """Adaptive quadrature could not meet its tolerance."""


class AmbiguousZero(BellshapeError):
    """A grid cell looks tangent to zero and refinement did not resolve it.

    Raised instead of silently counting 0 or 2 zeros: the functions this
    library scans are real-analytic with simple zeros along the verified
    profiles, so ambiguity signals numerical trouble, not mathematics.
    """


class DegeneratePoles(BellshapeError):
    """Rational Laplace transform has a pole configuration we cannot handle."""
