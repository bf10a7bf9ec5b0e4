"""Exception types shared across the toolkit."""


class DimensionError(ValueError):
    """Matrix dimensions are inconsistent with the requested operation."""


class SpectrumSeparationError(ValueError):
    """Two spectra violate the separation condition needed for a unique
    Sylvester/Lyapunov solution (some lambda_i + mu_j is numerically zero)."""


class NotPsdError(ValueError):
    """A matrix required to be positive semidefinite has a negative
    eigenvalue beyond the admitted tolerance."""


class StabilityError(ValueError):
    """A system matrix required to be Hurwitz has eigenvalues with
    nonnegative real part."""
