"""Truncated Fock-space linear algebra for one and two bosonic modes.

Conventions used throughout the package:

* hbar = 1, quadratures are dimensionless: ``x = (a + a^dagger)/sqrt(2)``,
  ``p = (a - a^dagger)/(j sqrt(2))``.
* Two-mode composite index is mode-1 major: ``i = j * N2 + n`` for the
  product state ``|j>|n>``.  This is what ``np.kron`` produces and what
  ``reshape(N1, N2)`` undoes.
"""
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg as sla

from .exceptions import CutoffError, NonHermitianError

HERMITIAN_TOL = 1e-10


def check_cutoff(levels: int) -> int:
    """Validate a Fock cutoff (number of retained levels) and return it as int."""
    if isinstance(levels, bool) or int(levels) != levels:
        raise CutoffError(f"cutoff must be an integer, got {levels!r}")
    levels = int(levels)
    if levels < 2:
        raise CutoffError(f"cutoff must keep at least 2 levels, got {levels}")
    return levels


def annihilation_matrix(levels: int) -> np.ndarray:
    """Matrix of the annihilation operator on ``|0>, ..., |N-1>``.

    Entry ``(n-1, n)`` is ``sqrt(n)``; the conjugate transpose is the
    creation operator.
    """
    levels = check_cutoff(levels)
    a = np.zeros((levels, levels), dtype=complex)
    n = np.arange(1, levels)
    a[n - 1, n] = np.sqrt(n)
    return a


def creation_matrix(levels: int) -> np.ndarray:
    return annihilation_matrix(levels).conj().T


def number_matrix(levels: int) -> np.ndarray:
    a = annihilation_matrix(levels)
    return a.conj().T @ a


class QuadraturePair(NamedTuple):
    x: np.ndarray
    p: np.ndarray


def quadrature_matrices(levels: int) -> QuadraturePair:
    """Position and momentum quadratures in the truncated basis.

    Both are Hermitian.  Because of the cutoff the commutator is
    ``[x, p] = j (I - N |N-1><N-1|)`` rather than ``j I``.
    """
    a = annihilation_matrix(levels)
    adag = a.conj().T
    x = (a + adag) / np.sqrt(2.0)
    p = (a - adag) / (1j * np.sqrt(2.0))
    return QuadraturePair(x, p)


def tensor_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices, mode-1-major indexing.

    ``(A (x) B)[j*N2 + n, k*N2 + m] = A[j, k] * B[n, m]``.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    for name, M in (("A", A), ("B", B)):
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    return np.kron(A, B)


def vacuum_projector(levels: int) -> np.ndarray:
    """``|0><0|`` on one mode."""
    levels = check_cutoff(levels)
    P = np.zeros((levels, levels), dtype=complex)
    P[0, 0] = 1.0
    return P


def max_asymmetry(H: np.ndarray) -> float:
    H = np.asarray(H)
    if H.size == 0:
        return 0.0
    return float(np.max(np.abs(H - H.conj().T)))


def hermitize(H: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(H + H^dagger)/2`` after checking that H is Hermitian.

    The tolerance is relative to ``max(1, max|H|)``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    asym = max_asymmetry(H)
    if asym > tol * scale:
        raise NonHermitianError(asym, tol * scale)
    return (H + H.conj().T) / 2


def hermitian_eigensystem(
    H: np.ndarray, count: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Parameters
    ----------
    H : ndarray
        Square Hermitian matrix.  It is symmetrized before solving; an
        asymmetry above ``1e-10 * max(1, max|H|)`` raises
        :class:`NonHermitianError`.
    count : int, optional
        Only compute the ``count`` lowest eigenpairs.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Orthonormal columns, ``eigenvectors[:, k]`` belongs to
        ``eigenvalues[k]``.
    """
    H = hermitize(H)
    if np.iscomplexobj(H) and not np.any(H.imag):
        H = H.real
    if count is None:
        w, v = sla.eigh(H, check_finite=True)
    else:
        count = int(count)
        if not 1 <= count <= H.shape[0]:
            raise ValueError(f"count must be in [1, {H.shape[0]}], got {count}")
        w, v = sla.eigh(H, subset_by_index=[0, count - 1], check_finite=True)
    return w, v


def hermitian_eigenvalues(H: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (no eigenvectors)."""
    H = hermitize(H)
    return sla.eigvalsh(H, check_finite=True)
