"""Exception types shared across permacheck modules.

Exit-code mapping (see cli): usage/validation errors -> 2, numeric
failures (singularity, nonconvergence, spectral radius) -> 3.
"""


class PermacheckError(Exception):
    """Base class for all library errors."""


class InputFormatError(PermacheckError):
    """Malformed matrix/chain input: ragged rows, non-finite values, bad JSON."""


class DimensionCapError(PermacheckError):
    """Matrix dimension exceeds a configured cap (permanent cap, desk-scale cap)."""


class SingularMatrixError(PermacheckError):
    """Singular or ill-conditioned matrix. Carries the condition estimate."""

    def __init__(self, message, cond_estimate=None):
        super().__init__(message)
        self.cond_estimate = cond_estimate


class NotPositiveDefiniteError(PermacheckError):
    """Symmetric input failed the positive-definiteness eigen screen."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotPSDError(NotPositiveDefiniteError):
    """Input failed a positive-semidefiniteness screen."""


class SpectralRadiusError(PermacheckError):
    """Sub-Markov kernel is not transient: spectral radius >= 1 - tolerance."""

    def __init__(self, message, spectral_radius=None):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class SignConditionError(PermacheckError):
    """A pairwise or cyclic-triple sign condition fails.

    ``indices`` is (i, j) for a pairwise violation G(i,j)G(j,i) < 0 and
    (i, j, k) for a triple violation G(j,i)G(j,k)G(k,i) < 0; ``value`` is
    the offending product.
    """

    def __init__(self, message, indices, value):
        super().__init__(message)
        self.indices = tuple(indices)
        self.value = value


class SignInconsistencyError(PermacheckError):
    """Sign propagation contradicted itself; lists near-zero entries involved."""

    def __init__(self, message, near_zero_entries=()):
        super().__init__(message)
        self.near_zero_entries = list(near_zero_entries)


class NegativeCrossProductError(PermacheckError):
    """2x2 symmetrization requires C(0,1)*C(1,0) >= 0."""


class InvalidIndexError(PermacheckError):
    """Permanental index beta is not 2/k for an integer k >= 1."""


class SchemaMismatchError(PermacheckError):
    """Report JSON schema version is not supported."""
