"""Density matrices, partial traces and entanglement entropies.

The numeric route (partial trace, then spectral entropy) and the closed
forms for each family of states live side by side so they can be
compared.  Entropies default to natural logarithms; pass ``base="2"``
for bits.
"""
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from .exceptions import InvalidStateError, NegativeEigenvalueError
from .fock import hermitian_eigenvalues, hermitize
from .states import TwoModePureState

TRACE_TOL = 1e-10
ZERO_WEIGHT = 1e-12
NEGATIVE_TOL = 1e-8
NORM_REJECT_TOL = 1e-8


class Base(str, enum.Enum):
    NATURAL = "e"
    TWO = "2"

    @classmethod
    def parse(cls, value: Union["Base", str, int, float]) -> "Base":
        if isinstance(value, Base):
            return value
        key = str(value).strip().lower()
        if key in ("e", "natural", "nat", "nats", "ln"):
            return cls.NATURAL
        if key in ("2", "2.0", "two", "bit", "bits", "log2"):
            return cls.TWO
        raise ValueError(f"unknown entropy base {value!r}; use 'e' or '2'")

    @property
    def log_factor(self) -> float:
        """Divide a natural-log entropy by this to convert it."""
        return 1.0 if self is Base.NATURAL else math.log(2.0)


BaseLike = Union[Base, str, int]


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: Base = Base.NATURAL

    def __float__(self) -> float:
        return self.value

    def to(self, base: BaseLike) -> "EntropyValue":
        base = Base.parse(base)
        nats = self.value * self.base.log_factor
        return EntropyValue(nats / base.log_factor, base)


def _entropy(nats: float, base: BaseLike) -> EntropyValue:
    base = Base.parse(base)
    if -1e-12 <= nats <= 0:
        nats = 0.0
    return EntropyValue(nats / base.log_factor, base)


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    ``mode_structure = (N1, N2)`` marks a matrix on a two-mode space with
    the mode-1-major composite index.  The matrix is symmetrized on
    construction; positivity is checked when the spectrum is computed.
    """

    __slots__ = ("_data", "mode_structure")

    def __init__(self, data: np.ndarray, mode_structure: Optional[Tuple[int, int]] = None):
        data = hermitize(np.array(data, dtype=complex))
        if not np.all(np.isfinite(data)):
            raise InvalidStateError("density matrix has non-finite entries")
        tr = float(np.trace(data).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace {tr!r} is not 1 (tol {TRACE_TOL})")
        if mode_structure is not None:
            n1, n2 = (int(v) for v in mode_structure)
            if n1 * n2 != data.shape[0]:
                raise InvalidStateError(
                    f"mode structure {mode_structure} does not match dimension {data.shape[0]}"
                )
            mode_structure = (n1, n2)
        data.setflags(write=False)
        self._data = data
        self.mode_structure = mode_structure

    @classmethod
    def from_unnormalized(
        cls, data: np.ndarray, mode_structure: Optional[Tuple[int, int]] = None
    ) -> "DensityMatrix":
        data = np.asarray(data, dtype=complex)
        return cls(data / np.trace(data).real, mode_structure)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self._data).real)

    @property
    def purity(self) -> float:
        # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.sum(np.abs(self._data) ** 2))

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self._data)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, mode_structure={self.mode_structure})"


def density_from_pure(state: TwoModePureState) -> DensityMatrix:
    """``|psi><psi|`` on the composite index space."""
    psi = state.vector
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > NORM_REJECT_TOL:
        raise InvalidStateError(f"state norm {norm!r} is not 1")
    return DensityMatrix(np.outer(psi, psi.conj()), mode_structure=state.cutoffs)


def _check_keep(keep: Union[str, int]) -> int:
    if keep in ("mode1", 1):
        return 1
    if keep in ("mode2", 2):
        return 2
    raise ValueError(f"keep must be 'mode1' or 'mode2', got {keep!r}")


def partial_trace(rho: DensityMatrix, keep: Union[str, int] = "mode1") -> DensityMatrix:
    """Trace out one mode of a two-mode density matrix.

    With ``keep="mode1"``: ``rho1[j, k] = sum_n rho[(j, n), (k, n)]``.
    """
    if rho.mode_structure is None:
        raise InvalidStateError("partial trace needs a density matrix with mode_structure")
    n1, n2 = rho.mode_structure
    blocks = rho.data.reshape(n1, n2, n1, n2)
    if _check_keep(keep) == 1:
        reduced = np.einsum("jnkn->jk", blocks)
    else:
        reduced = np.einsum("jnjm->nm", blocks)
    return DensityMatrix(reduced)


def reduced_density(state: TwoModePureState, keep: Union[str, int] = "mode1") -> DensityMatrix:
    """Reduced state of one mode of a pure state, without forming ``|psi><psi|``.

    Equal to ``partial_trace(density_from_pure(state), keep)``, but costs
    ``O(N^3)`` instead of ``O(N^4)`` memory-bound work, which matters at
    cutoffs of a few hundred levels.
    """
    c = state.coeffs
    if _check_keep(keep) == 1:
        reduced = c @ c.conj().T
    else:
        reduced = c.T @ c.conj()
    return DensityMatrix(reduced)


def entropy_from_probabilities(p: Iterable[float], base: BaseLike = Base.NATURAL) -> EntropyValue:
    """``-sum p log p`` over a spectrum, with the clamping rules for noise.

    Weights ``<= 1e-12`` contribute nothing.  Weights in ``[-1e-8, 0)`` are
    treated as truncation noise; anything more negative raises
    :class:`NegativeEigenvalueError`.
    """
    p = np.asarray(list(p) if not isinstance(p, np.ndarray) else p, dtype=float)
    if p.size and p.min() < -NEGATIVE_TOL:
        raise NegativeEigenvalueError(
            f"eigenvalue {p.min():.3e} below -{NEGATIVE_TOL:g}; the state is not positive"
        )
    p = p[p > ZERO_WEIGHT]
    nats = float(-np.sum(p * np.log(p)))
    return _entropy(nats, base)


def von_neumann_entropy(rho: DensityMatrix, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """``-tr(rho log rho)`` from the eigenvalues of ``rho``."""
    return entropy_from_probabilities(rho.eigenvalues(), base)


def schmidt_weights(state: TwoModePureState) -> np.ndarray:
    """Squared singular values of the coefficient grid, descending."""
    s = np.linalg.svd(state.coeffs, compute_uv=False)
    return np.sort(s**2)[::-1]


def entanglement_entropy(
    state: TwoModePureState, base: BaseLike = Base.NATURAL, keep: Union[str, int] = "mode1"
) -> EntropyValue:
    """Spectral entropy of the reduced state of a pure two-mode state."""
    return von_neumann_entropy(reduced_density(state, keep), base)


def _xlogx(v: float) -> float:
    return 0.0 if v == 0.0 else v * math.log(v)


def entropy_tms_closed(lam: float, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """``cosh^2 log cosh^2 - sinh^2 log sinh^2`` for the two-mode squeezed vacuum."""
    if not lam >= 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {lam!r}")
    c2 = math.cosh(lam) ** 2
    s2 = math.sinh(lam) ** 2
    return _entropy(_xlogx(c2) - _xlogx(s2), base)


def entropy_tms_series(lam: float, terms: int, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """Explicit series ``-sum_{n<terms} p_n log p_n``, ``p_n = tanh^(2n)/cosh^2``."""
    if not lam >= 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {lam!r}")
    n = np.arange(int(terms))
    if lam == 0:
        return _entropy(0.0, base)
    log_p = -2.0 * math.log(math.cosh(lam)) + 2.0 * n * math.log(math.tanh(lam))
    nats = float(-np.sum(np.exp(log_p) * log_p))
    return _entropy(nats, base)


def occupation_series(lam: float, terms: int) -> float:
    """Partial sum ``sum_{n=0}^{terms} (n + 1) tanh^(2n) lam``; tends to ``cosh^4 lam``."""
    t2 = math.tanh(lam) ** 2
    n = np.arange(int(terms) + 1)
    return float(np.sum((n + 1) * np.power(t2, n)))


def entropy_tv_closed(beta_omega: float, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """``-log(1 - x) - x/(1 - x) log x`` with ``x = exp(-beta omega)``."""
    if not beta_omega > 0:
        raise ValueError(f"beta*omega must be > 0, got {beta_omega!r}")
    one_minus_x = -math.expm1(-beta_omega)
    # x/(1-x) * log x = -beta_omega * x / (1 - x)
    nats = -math.log(one_minus_x) + beta_omega * math.exp(-beta_omega) / one_minus_x
    return _entropy(nats, base)


def entropy_gaussian_closed(nu: float, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """Entropy of a single-mode Gaussian state with symplectic eigenvalue ``nu``.

    ``((nu+1)/2) log((nu+1)/2) - ((nu-1)/2) log((nu-1)/2)``, zero at ``nu = 1``.
    """
    if nu < 1 - 1e-10:
        raise ValueError(f"symplectic eigenvalue must be >= 1, got {nu!r}")
    nu = max(float(nu), 1.0)
    return _entropy(_xlogx((nu + 1) / 2) - _xlogx((nu - 1) / 2), base)
