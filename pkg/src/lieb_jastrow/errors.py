"""Exception types raised by the package."""


class ConvergenceError(RuntimeError):
    """A root finder, eigensolver or quadrature failed to reach its tolerance."""


class ResonanceError(ValueError):
    """The scattering length sits at or beyond the confinement-induced resonance."""


class TransitionDomainError(ValueError):
    """No correlation-hole transition exists for the requested momentum."""


class BasisOverflowError(RuntimeError):
    """The exact-diagonalization basis would exceed the configured size cap."""
