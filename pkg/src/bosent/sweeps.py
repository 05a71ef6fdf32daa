"""Parameter sweeps, cutoff-convergence tables and the coupled-oscillator
discrepancy report.

Every sweep row pairs a closed-form entropy with the numeric one
(state -> reduced density -> spectrum).  Rows are independent, so they
may be computed on a thread pool; output order is always the grid order.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import paper
from .entanglement import (
    Base,
    BaseLike,
    entanglement_entropy,
    entropy_gaussian_closed,
    entropy_tms_closed,
    entropy_tv_closed,
    partial_trace,
    von_neumann_entropy,
)
from .exceptions import InstabilityError
from .fock import check_cutoff
from .states import (
    BOLTZMANN_J_PER_K,
    DEFAULT_OMEGA_ENERGY,
    TRUNCATION_WARN_LEVEL,
    OscillatorPair,
    ThermalParams,
    cho_ground_state_numeric,
    normal_mode_params,
    thermal_vacuum_state,
    tms_state,
)

#: Hard ceiling for auto-raised cutoffs of the Schmidt-diagonal states.
MAX_CUTOFF = 512
#: Largest per-mode cutoff for the coupled pair (N^2-dimensional eigenproblem).
MAX_CHO_CUTOFF = 64
#: Auto-raised cutoffs aim for a discarded tail below this.
TAIL_TARGET = 1e-16

TMS_TOL = 1e-8
TV_TOL = 1e-8
CHO_TOL = 1e-4

PARAMETERS = ("lambda", "temperature", "r1", "delta")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    cutoff: int = 128
    base: Base = Base.NATURAL

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"parameter must be one of {PARAMETERS}, got {self.parameter!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep bounds must be finite")
        if not self.start < self.stop:
            raise ValueError(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"sweep needs at least 2 integer steps, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "cutoff", check_cutoff(self.cutoff))
        object.__setattr__(self, "base", Base.parse(self.base))

    @classmethod
    def parse_range(cls, parameter: str, text: str, **kwargs) -> "SweepSpec":
        """Build a spec from ``"start:stop:steps"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep range must look like start:stop:steps, got {text!r}")
        return cls(parameter, float(parts[0]), float(parts[1]), int(parts[2]), **kwargs)

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass
class SweepTable:
    """Rows of sweep output in ascending parameter order."""

    columns: Tuple[str, ...]
    rows: List[tuple]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])

    @property
    def flagged_rows(self) -> List[int]:
        if "flagged" not in self.columns:
            return []
        return [k for k, f in enumerate(self.column("flagged")) if f]

    def within_tolerance(self) -> bool:
        """True when every finite ``abs_difference`` is below the declared tolerance."""
        if "abs_difference" not in self.columns:
            return True
        diff = self.column("abs_difference").astype(float)
        diff = diff[np.isfinite(diff)]
        return bool(np.all(diff < self.metadata["tolerance"]))


def _map_rows(fn: Callable[[float], tuple], grid: Sequence[float], workers: int) -> List[tuple]:
    if workers <= 1:
        return [fn(v) for v in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, grid))


def _auto_cutoff(log_ratio: float, floor: int) -> Tuple[int, bool]:
    """Smallest cutoff N >= floor with ``exp(N * log_ratio) < TAIL_TARGET``.

    ``log_ratio`` is the log of the geometric ratio of Schmidt weights.
    Returns the cutoff and whether the ``MAX_CUTOFF`` cap was hit.
    """
    if log_ratio == -math.inf:
        return floor, False
    need = math.floor(math.log(TAIL_TARGET) / log_ratio) + 1
    if need > MAX_CUTOFF:
        return max(floor, MAX_CUTOFF), True
    return max(floor, need), False


def _spec_metadata(spec: SweepSpec, system: str, tolerance: Optional[float]) -> Dict[str, Any]:
    meta = {
        "system": system,
        "parameter": spec.parameter,
        "start": spec.start,
        "stop": spec.stop,
        "steps": spec.steps,
        "cutoff": spec.cutoff,
        "base": spec.base.value,
    }
    if tolerance is not None:
        meta["tolerance"] = tolerance
    return meta


def sweep_tms(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Two-mode squeezed vacuum entropy against the squeezing parameter.

    The cutoff of each row is ``spec.cutoff`` raised, up to 512, until the
    discarded tail ``tanh(lam)^(2N)`` is below 1e-16.  Rows whose tail
    exceeds 0.01 or that hit the cap are flagged.
    """
    if spec.parameter != "lambda":
        raise ValueError(f"sweep_tms needs parameter 'lambda', got {spec.parameter!r}")
    if spec.start < 0:
        raise ValueError("squeezing parameter must be >= 0")

    def row(lam: float) -> tuple:
        t = math.tanh(lam)
        log_ratio = 2 * math.log(t) if t > 0 else -math.inf
        n, capped = _auto_cutoff(log_ratio, spec.cutoff)
        state = tms_state(lam, n, warn=False)
        closed = entropy_tms_closed(lam, spec.base).value
        numeric = entanglement_entropy(state, spec.base).value
        flagged = capped or state.truncation_weight > TRUNCATION_WARN_LEVEL
        return (float(lam), closed, numeric, abs(closed - numeric), state.truncation_weight, n, flagged)

    rows = _map_rows(row, spec.grid(), workers)
    return SweepTable(
        ("lambda", "closed_form", "numeric", "abs_difference", "truncation_weight", "cutoff", "flagged"),
        rows,
        _spec_metadata(spec, "tms", TMS_TOL),
    )


def sweep_tv(
    spec: SweepSpec,
    omega_energy: float = DEFAULT_OMEGA_ENERGY,
    boltzmann: float = BOLTZMANN_J_PER_K,
    workers: int = 1,
) -> SweepTable:
    """Thermal-vacuum entropy against temperature (K).

    The cutoff is raised until ``exp(-N beta omega) < 1e-16``; rows hitting
    the 512-level cap are flagged.
    """
    if spec.parameter != "temperature":
        raise ValueError(f"sweep_tv needs parameter 'temperature', got {spec.parameter!r}")
    if not spec.start > 0:
        raise ValueError("temperatures must be > 0 K")

    def row(temp: float) -> tuple:
        bw = ThermalParams(omega_energy, float(temp), boltzmann).beta_omega
        n, capped = _auto_cutoff(-bw, spec.cutoff)
        state = thermal_vacuum_state(bw, n, warn=False)
        closed = entropy_tv_closed(bw, spec.base).value
        numeric = entanglement_entropy(state, spec.base).value
        flagged = capped or state.truncation_weight > TRUNCATION_WARN_LEVEL
        return (float(temp), bw, closed, numeric, abs(closed - numeric), state.truncation_weight, n, flagged)

    rows = _map_rows(row, spec.grid(), workers)
    meta = _spec_metadata(spec, "thermal", TV_TOL)
    meta.update(omega_energy=omega_energy, boltzmann=boltzmann)
    return SweepTable(
        (
            "temperature",
            "beta_omega",
            "closed_form",
            "numeric",
            "abs_difference",
            "truncation_weight",
            "cutoff",
            "flagged",
        ),
        rows,
        meta,
    )


def sweep_cho(spec: SweepSpec, template: OscillatorPair = OscillatorPair(), workers: int = 1) -> SweepTable:
    """Coupled-oscillator sweep.

    ``parameter="r1"`` tabulates the printed ``-q log q`` formula and the
    trace ``q`` it is built from.  ``parameter="delta"`` is the physical
    sweep: Gaussian closed form against exact diagonalization at
    ``spec.cutoff`` levels per mode, with mass and frequency taken from
    ``template``.  Unstable couplings give a flagged row of NaNs.
    """
    if spec.parameter == "r1":
        grid = spec.grid()
        factor = spec.base.log_factor
        entropies = paper.entropy_cho_paper_grid(grid) / factor
        traces = (1.0 + np.tanh(grid) ** 2 / 2) / np.cosh(grid)
        rows = [(float(r), float(e), float(q), False) for r, e, q in zip(grid, entropies, traces)]
        meta = _spec_metadata(spec, "cho-paper", None)
        meta["argmax_r1"] = float(grid[int(np.argmax(entropies))])
        return SweepTable(("r1", "paper_entropy", "paper_trace", "flagged"), rows, meta)

    if spec.parameter != "delta":
        raise ValueError(f"sweep_cho needs parameter 'r1' or 'delta', got {spec.parameter!r}")
    if spec.cutoff > MAX_CHO_CUTOFF:
        raise ValueError(f"coupled-oscillator cutoff is limited to {MAX_CHO_CUTOFF} per mode")

    def row(delta: float) -> tuple:
        o = OscillatorPair(template.mass, template.omega, float(delta))
        try:
            modes = normal_mode_params(o)
        except InstabilityError:
            nan = math.nan
            return (float(delta), nan, nan, nan, nan, nan, nan, spec.cutoff, True)
        gauss = entropy_gaussian_closed(modes.nu, spec.base).value
        state = cho_ground_state_numeric(o, spec.cutoff)
        numeric = entanglement_entropy(state, spec.base).value
        return (
            float(delta),
            modes.nu,
            gauss,
            numeric,
            abs(gauss - numeric),
            state.energy,
            modes.zero_point_energy,
            spec.cutoff,
            False,
        )

    rows = _map_rows(row, spec.grid(), workers)
    meta = _spec_metadata(spec, "cho", CHO_TOL)
    meta.update(mass=template.mass, omega=template.omega)
    return SweepTable(
        (
            "delta",
            "nu",
            "gaussian",
            "numeric",
            "abs_difference",
            "ground_energy",
            "zero_point_energy",
            "cutoff",
            "flagged",
        ),
        rows,
        meta,
    )


@dataclass
class ConvergenceReport:
    system: str
    params: Dict[str, float]
    rows: List[Tuple[int, float, float]]

    @property
    def final_delta(self) -> float:
        return self.rows[-1][2]

    def as_table(self) -> SweepTable:
        meta = {"system": self.system, **self.params, "final_delta": self.final_delta}
        return SweepTable(("cutoff", "entropy", "delta_to_previous"), list(self.rows), meta)


def _entropy_at_cutoff(system: str, params: Dict[str, float], n: int, base: Base) -> float:
    if system == "tms":
        return entanglement_entropy(tms_state(params["lambda"], n, warn=False), base).value
    if system == "thermal":
        return entanglement_entropy(thermal_vacuum_state(params["beta_omega"], n, warn=False), base).value
    if system == "cho":
        o = OscillatorPair(params.get("mass", 1.0), params.get("omega", 1.0), params["delta"])
        return entanglement_entropy(cho_ground_state_numeric(o, n), base).value
    raise ValueError(f"unknown system {system!r}; use 'tms', 'thermal' or 'cho'")


def convergence_report(
    system: str, params: Dict[str, float], cutoffs: Sequence[int], base: BaseLike = Base.NATURAL
) -> ConvergenceReport:
    """Entropy at each cutoff and its change from the previous cutoff.

    ``system`` is ``"tms"`` (needs ``lambda``), ``"thermal"`` (needs
    ``beta_omega``) or ``"cho"`` (needs ``delta``; ``mass`` and ``omega``
    default to 1).  The first row's delta is NaN.
    """
    cutoffs = [check_cutoff(n) for n in cutoffs]
    if len(cutoffs) < 2:
        raise ValueError("convergence report needs at least two cutoffs")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError(f"cutoffs must be strictly ascending, got {cutoffs}")
    if system == "cho" and cutoffs[-1] > MAX_CHO_CUTOFF:
        raise ValueError(f"coupled-oscillator cutoff is limited to {MAX_CHO_CUTOFF} per mode")
    base = Base.parse(base)
    rows: List[Tuple[int, float, float]] = []
    prev = None
    for n in cutoffs:
        s = _entropy_at_cutoff(system, params, n, base)
        rows.append((n, s, math.nan if prev is None else abs(s - prev)))
        prev = s
    return ConvergenceReport(system, dict(params), rows)


def discrepancy_report(o: OscillatorPair, levels: int = 32, base: BaseLike = Base.NATURAL) -> Dict[str, Any]:
    """Printed coupled-oscillator formulas next to the two physical oracles.

    Keys: normal-mode data; ``gaussian_entropy`` and ``numeric_entropy``
    (physical); ``printed_entropy`` (``-q log q``) and
    ``printed_truncated_trace`` (``q``, trace of the 3x3 matrix) at this
    coupling's ``r1``; ``printed_state_trace``,
    ``printed_state_factorization_error`` and
    ``printed_state_intermode_entropy`` for the printed two-mode state.
    """
    base = Base.parse(base)
    modes = normal_mode_params(o)
    state = cho_ground_state_numeric(o, levels)
    printed = paper.cho_state_paper(modes.r1, modes.r2, levels)
    reduced_printed = partial_trace(printed.normalized(), "mode1")
    return {
        "mass": o.mass,
        "omega": o.omega,
        "delta": o.delta,
        "cutoff": levels,
        "base": base.value,
        "omega1": modes.omega1,
        "omega2": modes.omega2,
        "r1": modes.r1,
        "r2": modes.r2,
        "nu": modes.nu,
        "ground_energy": state.energy,
        "zero_point_energy": modes.zero_point_energy,
        "gaussian_entropy": entropy_gaussian_closed(modes.nu, base).value,
        "numeric_entropy": entanglement_entropy(state, base).value,
        "printed_entropy": paper.entropy_cho_paper(modes.r1, base).value,
        "printed_truncated_trace": paper.truncated_trace_paper(modes.r1),
        "printed_state_trace": printed.trace,
        "printed_state_factorization_error": printed.factorization_error,
        "printed_state_intermode_entropy": von_neumann_entropy(reduced_printed, base).value,
    }
