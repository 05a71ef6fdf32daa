"""Paper reproduction of the coupled-oscillator formulas, taken verbatim.

Nothing here feeds the headline results.  The printed coupled-oscillator
state is a product of two single-mode squeezed vacua, one per mode, so
it carries no entanglement between the modes; the printed "two level"
matrix is 3x3, rank one and not unit trace; and the printed entropy is
``-q log q`` of that matrix's trace ``q`` rather than a spectral entropy.
These functions exist so that each of those facts can be computed and
reported next to the physical answer from
:func:`bosent.states.cho_ground_state_numeric` and
:func:`bosent.entanglement.entropy_gaussian_closed`.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .entanglement import Base, BaseLike, DensityMatrix, EntropyValue, _entropy, _xlogx
from .fock import check_cutoff, tensor_product

UNIT_TRACE_TOL = 1e-10


def squeezed_vacuum_ket(r: float, levels: int) -> np.ndarray:
    """Unnormalized ``exp(tanh(r) a^dag^2 / 2)|0>`` cut at ``levels``.

    Amplitude of ``|2n>`` is ``(tanh r / 2)^n sqrt((2n)!) / n!``.
    """
    levels = check_cutoff(levels)
    t = math.tanh(r)
    ket = np.zeros(levels)
    n = np.arange((levels + 1) // 2)
    if t == 0.0:
        ket[0] = 1.0
        return ket
    log_amp = n * math.log(abs(t) / 2) + 0.5 * gammaln(2 * n + 1) - gammaln(n + 1)
    ket[2 * n] = np.exp(log_amp) * np.sign(t) ** n
    return ket


@dataclass(frozen=True)
class PaperChoState:
    """Raw coupled-oscillator density matrix as printed, with diagnostics.

    ``raw`` keeps the printed prefactor ``sech r1 sech r2``; ``trace`` is
    its trace at this cutoff.  ``mode1``/``mode2`` are the single-mode
    factors ``sech r_i |v_i><v_i|``.
    """

    r1: float
    r2: float
    raw: np.ndarray
    mode1: np.ndarray
    mode2: np.ndarray

    @property
    def levels(self) -> int:
        return self.mode1.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.raw).real)

    @property
    def trace_is_unit(self) -> bool:
        return abs(self.trace - 1.0) <= UNIT_TRACE_TOL

    @property
    def factorization_error(self) -> float:
        """``max |raw - mode1 (x) mode2|``; zero means no inter-mode correlation."""
        return float(np.max(np.abs(self.raw - tensor_product(self.mode1, self.mode2))))

    def normalized(self) -> DensityMatrix:
        return DensityMatrix.from_unnormalized(self.raw, (self.levels, self.levels))


def cho_state_paper(r1: float, r2: float, levels: int) -> PaperChoState:
    """Build ``sech r1 sech r2 exp{(a1^dag^2 tanh r1 + a2^dag^2 tanh r2)/2}|00><00| (h.c.)``.

    The exponential series is summed term by term up to the cutoff and
    the result is not renormalized.
    """
    levels = check_cutoff(levels)
    if not (math.isfinite(r1) and math.isfinite(r2)):
        raise ValueError(f"squeeze parameters must be finite, got {r1!r}, {r2!r}")
    v1 = squeezed_vacuum_ket(r1, levels)
    v2 = squeezed_vacuum_ket(r2, levels)
    s1 = 1.0 / math.cosh(r1)
    s2 = 1.0 / math.cosh(r2)
    ket = np.kron(v1, v2)
    raw = s1 * s2 * np.outer(ket, ket).astype(complex)
    return PaperChoState(
        r1=float(r1),
        r2=float(r2),
        raw=raw,
        mode1=s1 * np.outer(v1, v1).astype(complex),
        mode2=s2 * np.outer(v2, v2).astype(complex),
    )


def cho_reduced_paper(r1: float, levels: int) -> np.ndarray:
    """Printed reduced matrix ``sech r1 sum (tanh r1/2)^(m+n)/(m! n!) a^dag^2n |0><0| a^2m``."""
    v = squeezed_vacuum_ket(r1, levels)
    return np.outer(v, v) / math.cosh(r1)


def cho_truncated_matrix_paper(r1: float) -> np.ndarray:
    """The printed 3x3 "two level" matrix, not renormalized.

    ``sech r1 [[1, 0, tanh r1/sqrt2], [0, 0, 0], [tanh r1/sqrt2, 0, tanh^2 r1/2]]``.
    Its trace is ``sech r1 (1 + tanh^2 r1 / 2)``.
    """
    if not math.isfinite(r1):
        raise ValueError(f"r1 must be finite, got {r1!r}")
    t = math.tanh(r1)
    m = np.array(
        [
            [1.0, 0.0, t / math.sqrt(2)],
            [0.0, 0.0, 0.0],
            [t / math.sqrt(2), 0.0, t * t / 2],
        ]
    )
    return m / math.cosh(r1)


def truncated_trace_paper(r1: float) -> float:
    return float(np.trace(cho_truncated_matrix_paper(r1)))


def entropy_cho_paper(r1: float, base: BaseLike = Base.NATURAL) -> EntropyValue:
    """``-q log q`` with ``q = sech r1 + sech r1 tanh^2 r1 / 2``, exactly as printed.

    This is not the von Neumann entropy of the 3x3 matrix: that matrix is
    rank one, so once normalized its entropy is zero.
    """
    q = truncated_trace_paper(r1)
    return _entropy(-_xlogx(q), base)


def entropy_cho_paper_grid(r1: np.ndarray) -> np.ndarray:
    """Vectorized natural-log form of :func:`entropy_cho_paper`."""
    r1 = np.asarray(r1, dtype=float)
    q = (1.0 + np.tanh(r1) ** 2 / 2) / np.cosh(r1)
    return -q * np.log(q)
