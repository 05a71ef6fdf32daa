"""Two-mode bosonic states in a truncated Fock basis.

Three families are built here:

* the two-mode squeezed vacuum ``exp{lam (a1^dag a2^dag - a1 a2)}|00>``,
* the thermal vacuum of a free boson ``H = omega a^dag a``, where the
  second ("tilde") mode is the fictitious copy of the system,
* the ground state of two identical oscillators with an ``x1 x2``
  coupling, found by diagonalizing the Hamiltonian directly.

States are stored as a coefficient grid ``c[j, n]`` for ``|j>|n>``.
Infinite-series states are cut at the requested number of levels and
renormalized; the discarded probability is kept as ``truncation_weight``.
"""
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .exceptions import InstabilityError, InvalidStateError, TruncationWarning
from .fock import check_cutoff, hermitian_eigensystem, quadrature_matrices, tensor_product

#: Boltzmann constant in J/K used for the reference thermal sweep.
BOLTZMANN_J_PER_K = 1.3806568e-23
#: Quantum of energy (J) used for the reference thermal sweep.
DEFAULT_OMEGA_ENERGY = 1e-20

TRUNCATION_WARN_LEVEL = 0.01
NORM_TOL = 1e-12


@dataclass(frozen=True)
class TwoModePureState:
    """Normalized pure state on a truncated two-mode Fock space.

    Attributes
    ----------
    coeffs : ndarray, shape (N1, N2)
        ``coeffs[j, n]`` is the amplitude of ``|j>|n>``.
    truncation_weight : float
        Probability discarded by the cutoff before renormalization.
    energy : float or None
        Eigenvalue for states obtained by diagonalization.
    warnings : tuple of str
        Non-fatal diagnostics such as a large truncation weight.
    """

    coeffs: np.ndarray
    truncation_weight: float = 0.0
    energy: Optional[float] = None
    warnings: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2:
            raise InvalidStateError(f"coefficient grid must be 2-D, got shape {c.shape}")
        check_cutoff(c.shape[0])
        check_cutoff(c.shape[1])
        if not np.all(np.isfinite(c)):
            raise InvalidStateError("coefficient grid has non-finite entries")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
        if not self.truncation_weight >= 0:
            raise InvalidStateError(f"negative truncation weight {self.truncation_weight!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def cutoffs(self) -> Tuple[int, int]:
        return self.coeffs.shape

    @property
    def vector(self) -> np.ndarray:
        """State vector in the composite (mode-1-major) basis."""
        return self.coeffs.reshape(-1)

    @property
    def flagged(self) -> bool:
        return bool(self.warnings)

    @classmethod
    def from_unnormalized(
        cls,
        coeffs: np.ndarray,
        discarded: float = 0.0,
        energy: Optional[float] = None,
        warn: bool = True,
    ) -> "TwoModePureState":
        """Renormalize ``coeffs`` and record ``discarded`` as truncation weight.

        A discarded weight above 0.01 is noted in ``warnings`` and, unless
        ``warn`` is false, also emitted as a :class:`TruncationWarning`.
        """
        c = np.asarray(coeffs, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(c) ** 2)))
        if norm == 0.0:
            raise InvalidStateError("cannot normalize a zero state")
        discarded = max(0.0, float(discarded))
        notes: Tuple[str, ...] = ()
        if discarded > TRUNCATION_WARN_LEVEL:
            msg = (
                f"cutoff {c.shape} discards probability {discarded:.3g} "
                f"(> {TRUNCATION_WARN_LEVEL}); raise the cutoff"
            )
            if warn:
                warnings.warn(msg, TruncationWarning, stacklevel=3)
            notes = (msg,)
        return cls(c / norm, truncation_weight=discarded, energy=energy, warnings=notes)


def _schmidt_diagonal(weights_sqrt: np.ndarray) -> np.ndarray:
    return np.diag(weights_sqrt.astype(complex))


def tms_state(lam: float, levels: int, warn: bool = True) -> TwoModePureState:
    """Two-mode squeezed vacuum with squeezing parameter ``lam``.

    In the Fock basis the state is Schmidt diagonal with
    ``c[n, n] = sech(lam) tanh(lam)**n``.  The dropped tail has weight
    ``tanh(lam)**(2N)``.
    """
    levels = check_cutoff(levels)
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise ValueError(f"squeezing parameter must be finite and >= 0, got {lam!r}")
    t = math.tanh(lam)
    n = np.arange(levels)
    amps = np.power(t, n) / math.cosh(lam)
    discarded = t ** (2 * levels)
    return TwoModePureState.from_unnormalized(_schmidt_diagonal(amps), discarded, warn=warn)


def thermal_vacuum_state(beta_omega: float, levels: int, warn: bool = True) -> TwoModePureState:
    """Thermal vacuum of a free boson, system in mode 1, tilde copy in mode 2.

    ``c[n, n] = sqrt(1 - x) x**(n/2)`` with ``x = exp(-beta_omega)``; the
    reduced state of either mode is the Gibbs distribution ``(1-x) x**n``.
    """
    levels = check_cutoff(levels)
    beta_omega = float(beta_omega)
    if not beta_omega > 0 or math.isnan(beta_omega):
        raise ValueError(f"beta*omega must be > 0, got {beta_omega!r}")
    n = np.arange(levels)
    amps = math.sqrt(-math.expm1(-beta_omega)) * np.exp(-0.5 * beta_omega * n)
    discarded = math.exp(-beta_omega * levels)
    return TwoModePureState.from_unnormalized(_schmidt_diagonal(amps), discarded, warn=warn)


@dataclass(frozen=True)
class ThermalParams:
    """Free-boson energy quantum (J), temperature (K) and Boltzmann constant (J/K)."""

    omega_energy: float = DEFAULT_OMEGA_ENERGY
    temperature: float = 300.0
    boltzmann: float = BOLTZMANN_J_PER_K

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0 K, got {self.temperature!r}")
        if not self.omega_energy > 0:
            raise ValueError(f"omega must be > 0 J, got {self.omega_energy!r}")
        if not self.boltzmann > 0:
            raise ValueError(f"Boltzmann constant must be > 0, got {self.boltzmann!r}")

    @property
    def beta_omega(self) -> float:
        return self.omega_energy / (self.boltzmann * self.temperature)


def beta_omega(params: ThermalParams) -> float:
    """Dimensionless ``omega / (k_B T)``."""
    return params.beta_omega


def partition_function(beta_omega: float) -> float:
    """``Z = 1 / (1 - exp(-beta omega))`` for ``H = omega a^dag a``."""
    if not beta_omega > 0:
        raise ValueError(f"beta*omega must be > 0, got {beta_omega!r}")
    return -1.0 / math.expm1(-beta_omega)


@dataclass(frozen=True)
class OscillatorPair:
    """Two identical oscillators of mass ``mass`` and frequency ``omega``
    coupled by ``-delta x1 x2`` (hbar = 1)."""

    mass: float = 1.0
    omega: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass!r}")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega!r}")
        if not math.isfinite(self.delta):
            raise ValueError(f"coupling must be finite, got {self.delta!r}")

    @property
    def stability_limit(self) -> float:
        return self.mass * self.omega**2

    def check_stable(self) -> None:
        shift = self.delta / self.mass
        if self.delta >= self.stability_limit:
            raise InstabilityError(
                f"unstable normal mode: omega1^2 = omega^2 - delta/m = "
                f"{self.omega**2 - shift:.6g} <= 0 (delta={self.delta:g} >= m*omega^2="
                f"{self.stability_limit:g})"
            )
        if -self.delta >= self.stability_limit:
            raise InstabilityError(
                f"unstable normal mode: omega2^2 = omega^2 + delta/m = "
                f"{self.omega**2 + shift:.6g} <= 0 (delta={self.delta:g} <= -m*omega^2)"
            )


@dataclass(frozen=True)
class NormalModeData:
    omega1: float
    omega2: float
    r1: float
    r2: float
    nu: float

    @property
    def zero_point_energy(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)


def normal_mode_params(o: OscillatorPair) -> NormalModeData:
    """Normal-mode frequencies, squeeze parameters and reduced-state
    symplectic eigenvalue of a coupled oscillator pair.

    ``omega1 = sqrt(omega^2 - delta/m)`` belongs to the symmetric
    coordinate, ``omega2 = sqrt(omega^2 + delta/m)`` to the antisymmetric
    one.  ``tanh r_i = (omega - omega_i)/(omega + omega_i)`` and
    ``nu = (omega1 + omega2) / (2 sqrt(omega1 omega2))``.
    """
    o.check_stable()
    shift = o.delta / o.mass
    w1 = math.sqrt(o.omega**2 - shift)
    w2 = math.sqrt(o.omega**2 + shift)
    r1 = math.atanh((o.omega - w1) / (o.omega + w1))
    r2 = math.atanh((o.omega - w2) / (o.omega + w2))
    nu = (w1 + w2) / (2.0 * math.sqrt(w1 * w2))
    return NormalModeData(w1, w2, r1, r2, nu)


def cho_hamiltonian(o: OscillatorPair, levels: int) -> np.ndarray:
    """``(p1^2 + p2^2)/2m + m omega^2 (x1^2 + x2^2)/2 - delta x1 x2`` on N*N levels."""
    x, p = quadrature_matrices(levels)
    eye = np.eye(levels)
    x2 = x @ x
    p2 = p @ p
    kinetic = (tensor_product(p2, eye) + tensor_product(eye, p2)) / (2 * o.mass)
    potential = 0.5 * o.mass * o.omega**2 * (tensor_product(x2, eye) + tensor_product(eye, x2))
    return kinetic + potential - o.delta * tensor_product(x, x)


def cho_ground_state_numeric(o: OscillatorPair, levels: int) -> TwoModePureState:
    """Ground state of the coupled pair by exact diagonalization.

    The Hamiltonian is real symmetric in the Fock basis, so the ground
    state is real up to a global phase; the phase is fixed by making the
    largest-magnitude amplitude positive.  ``energy`` holds the ground
    energy.  The cutoff enters through the Hamiltonian, so nothing is
    discarded from the eigenvector itself and ``truncation_weight`` is 0;
    use :func:`bosent.sweeps.convergence_report` to measure cutoff error.
    """
    o.check_stable()
    levels = check_cutoff(levels)
    w, v = hermitian_eigensystem(cho_hamiltonian(o, levels), count=1)
    psi = v[:, 0].astype(complex)
    k = int(np.argmax(np.abs(psi)))
    psi *= np.conj(psi[k]) / abs(psi[k])
    psi = psi.real.astype(complex)
    return TwoModePureState.from_unnormalized(psi.reshape(levels, levels), energy=float(w[0]))
