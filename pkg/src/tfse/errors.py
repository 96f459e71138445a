"""Exception types shared across the package."""


class TfseError(Exception):
    """Base class for all numerical failures raised by this package."""


class NonConvergence(TfseError):
    """Power series hit the term cap before meeting the tolerance.

    Callers should fall back to the oscillatory/decay decomposition.
    """


class QuadratureFailure(TfseError):
    """Adaptive quadrature could not meet the requested tolerance."""


class DenominatorSingularity(TfseError):
    """A root of the kernel denominator sits too close to the integration ray.

    Only possible for orders in (1, 2]; occurs in a narrow window around 4/3.
    """


class ContourClash(TfseError):
    """The inversion pole lies within the safety margin of the contour."""


class SingularTime(TfseError):
    """Quantity undefined at t = 0 (a t**(nu-1) factor diverges there)."""


class InvalidOrder(TfseError):
    """Fractional order outside the regime required by the operation."""
