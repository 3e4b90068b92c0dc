"""Exception types raised by the solvers."""


class AttractorError(Exception):
    """Base class for all solver failures."""


class NoAttractor(AttractorError):
    """The charge admits no attractor of the requested kind.

    ``reason`` is a short machine-readable tag such as ``"det(R) <= 0"``.
    """

    def __init__(self, reason: str):
        super().__init__(f"no attractor: {reason}")
        self.reason = reason


class AsymmetricCharge(AttractorError):
    """The symmetric-branch solver was handed a charge with non-symmetric P or Q."""


class DependentVectors(AttractorError):
    """Two lattice (or Mukai) vectors expected to be independent are proportional."""


class DegenerateCoefficients(AttractorError):
    """Im(C1 * conj(C2)) vanishes, so the rank-2 formula is undefined."""


class DomainError(AttractorError):
    """A positivity condition required by a potential or a chart is violated."""
