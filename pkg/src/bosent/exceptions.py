"""Exception and warning types raised by bosent."""


class BosentError(Exception):
    """Base class for all bosent errors."""


class CutoffError(BosentError, ValueError):
    """Raised for a Fock cutoff below two levels."""


class NonHermitianError(BosentError, ValueError):
    """Raised when a matrix handed to the eigensolver is not Hermitian.

    The largest elementwise asymmetry ``max|H - H^dagger|`` is kept in
    ``max_asymmetry``.
    """

    def __init__(self, max_asymmetry: float, tolerance: float) -> None:
        self.max_asymmetry = max_asymmetry
        self.tolerance = tolerance
        super().__init__(
            f"matrix is not Hermitian: max |H - H^dagger| = {max_asymmetry:.3e} "
            f"exceeds tolerance {tolerance:.1e}"
        )


class InstabilityError(BosentError, ValueError):
    """Raised when a coupling makes one of the normal modes unstable."""


class InvalidStateError(BosentError, ValueError):
    """Raised for states or density matrices that violate their invariants."""


class NegativeEigenvalueError(InvalidStateError):
    """Raised when a density matrix has an eigenvalue well below zero."""


class TruncationWarning(UserWarning):
    """The Fock cutoff discards a non-negligible part of the state."""
