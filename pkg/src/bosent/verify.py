"""End-to-end self-verification suite behind ``bosent verify``.

Each check measures one quantity, compares it to a tolerance and returns a
:class:`CheckResult`.  ``fast=True`` halves the cutoffs and multiplies the
tolerances by 100; a halved cutoff is never allowed below the level at
which the discarded tail of a Schmidt-diagonal state drops under 1e-16,
since below that the check would measure truncation rather than the code.
"""
import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import paper
from .entanglement import (
    density_from_pure,
    entanglement_entropy,
    entropy_gaussian_closed,
    entropy_tms_closed,
    entropy_tv_closed,
    occupation_series,
    partial_trace,
    von_neumann_entropy,
)
from .fock import hermitian_eigensystem, vacuum_projector
from .states import (
    OscillatorPair,
    TwoModePureState,
    cho_ground_state_numeric,
    normal_mode_params,
    thermal_vacuum_state,
    tms_state,
)
from .sweeps import TAIL_TARGET, SweepSpec, convergence_report, sweep_cho, sweep_tv

TMS_LAMBDAS = (0.2, 0.5, 1.0, 1.5)
IDENTITY_LAMBDAS = (0.5, 1.0, 1.5)
THERMAL_BETAS = (0.5, 1.0, 2.0)
CHO_DELTAS = (0.1, 0.3, 0.5)


@dataclass
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: measured {self.measured:.3e} vs tolerance {self.tolerance:.1e}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass(frozen=True)
class Settings:
    fast: bool = False
    seed: int = 1234

    @property
    def tol_scale(self) -> float:
        return 100.0 if self.fast else 1.0

    def cutoff(self, full: int, log_ratio: float = -math.inf) -> int:
        if not self.fast:
            return full
        half = max(2, full // 2)
        if log_ratio == -math.inf:
            return half
        floor = math.floor(math.log(TAIL_TARGET) / log_ratio) + 1
        return min(full, max(half, floor))


def _tms_log_ratio(lam: float) -> float:
    return 2 * math.log(math.tanh(lam)) if lam > 0 else -math.inf


def _upper(measured: float, tol: float, name: str, detail: str = "") -> CheckResult:
    return CheckResult(name, measured, tol, bool(measured < tol), detail)


def check_tms_closed_vs_numeric(s: Settings) -> CheckResult:
    tol = 1e-8 * s.tol_scale
    start = time.perf_counter()
    worst = 0.0
    for lam in TMS_LAMBDAS:
        n = s.cutoff(128, _tms_log_ratio(lam))
        numeric = entanglement_entropy(tms_state(lam, n, warn=False)).value
        worst = max(worst, abs(entropy_tms_closed(lam).value - numeric))
    elapsed = time.perf_counter() - start
    res = _upper(worst, tol, "1 tms closed form vs spectral entropy", f"runtime {elapsed:.2f}s < 5s")
    res.passed = res.passed and elapsed < 5.0
    return res


def check_occupation_identity(s: Settings) -> CheckResult:
    tol = 1e-8 * s.tol_scale
    worst = max(
        abs(occupation_series(lam, 512) - math.cosh(lam) ** 4) / math.cosh(lam) ** 4
        for lam in IDENTITY_LAMBDAS
    )
    return _upper(worst, tol, "2 occupation series sums to cosh^4", "relative error")


def check_tms_monotone(s: Settings) -> CheckResult:
    grid = np.arange(61) * 0.05
    values = np.array([entropy_tms_closed(lam).value for lam in grid])
    min_step = float(np.min(np.diff(values)))
    return CheckResult(
        "3 tms entropy strictly increasing on 0..3 step 0.05",
        min_step,
        0.0,
        min_step > 0.0,
        "smallest increment, must be > 0",
    )


def check_thermal_gibbs(s: Settings) -> CheckResult:
    gibbs_tol = 1e-10 * s.tol_scale
    entropy_tol = 1e-8 * s.tol_scale
    worst_p = 0.0
    worst_s = 0.0
    for bw in THERMAL_BETAS:
        n = s.cutoff(64, -bw)
        state = thermal_vacuum_state(bw, n, warn=False)
        reduced = partial_trace(density_from_pure(state), "mode1")
        x = math.exp(-bw)
        expected = (1 - x) * x ** np.arange(n)
        worst_p = max(worst_p, float(np.max(np.abs(reduced.data - np.diag(expected)))))
        worst_s = max(worst_s, abs(von_neumann_entropy(reduced).value - entropy_tv_closed(bw).value))
    return CheckResult(
        "4 thermal reduced state is Gibbs; closed-form entropy matches",
        worst_p,
        gibbs_tol,
        worst_p < gibbs_tol and worst_s < entropy_tol,
        f"entropy error {worst_s:.3e} < {entropy_tol:.0e}",
    )


def check_thermal_limits(s: Settings) -> CheckResult:
    tol = 1e-12
    cold = max(
        entropy_tv_closed(50.0).value,
        entanglement_entropy(thermal_vacuum_state(50.0, s.cutoff(16))).value,
    )
    table = sweep_tv(SweepSpec("temperature", 50.0, 1000.0, 96, cutoff=s.cutoff(64)))
    closed = table.column("closed_form")
    numeric = table.column("numeric")
    monotone = bool(np.all(np.diff(closed) > 0) and np.all(np.diff(numeric) > 0))
    return CheckResult(
        "5 thermal entropy vanishes as T->0 and grows over 50..1000 K",
        cold,
        tol,
        cold < tol and monotone,
        f"entropy at beta*omega=50; monotone={monotone}",
    )


def check_cho_dual_oracle(s: Settings) -> CheckResult:
    ent_tol = 1e-4 * s.tol_scale
    energy_tol = 1e-6 * s.tol_scale
    n = s.cutoff(32)
    start = time.perf_counter()
    worst_s = 0.0
    worst_e = 0.0
    for delta in CHO_DELTAS:
        o = OscillatorPair(1.0, 1.0, delta)
        modes = normal_mode_params(o)
        state = cho_ground_state_numeric(o, n)
        worst_s = max(worst_s, abs(entanglement_entropy(state).value - entropy_gaussian_closed(modes.nu).value))
        worst_e = max(worst_e, abs(state.energy - modes.zero_point_energy))
    elapsed = time.perf_counter() - start
    return CheckResult(
        "6 coupled oscillators: diagonalization vs Gaussian entropy and zero-point energy",
        worst_s,
        ent_tol,
        worst_s < ent_tol and worst_e < energy_tol and elapsed < 30.0,
        f"energy error {worst_e:.3e} < {energy_tol:.0e}; runtime {elapsed:.2f}s < 30s",
    )


def check_printed_entropy_argmax(s: Settings) -> CheckResult:
    table = sweep_cho(SweepSpec("r1", 0.0, 5.0, 501))
    r_max = table.metadata["argmax_r1"]
    return CheckResult(
        "7 printed coupled-oscillator entropy peaks near r1 = 2",
        r_max,
        2.15,
        1.95 <= r_max <= 2.15,
        "argmax r1 must lie in [1.95, 2.15]",
    )


def check_printed_state_factorizes(s: Settings) -> CheckResult:
    tol = 1e-12
    n = s.cutoff(32)
    worst_f = 0.0
    worst_s = 0.0
    modes = [normal_mode_params(OscillatorPair(1.0, 1.0, d)) for d in CHO_DELTAS]
    pairs = [(m.r1, m.r2) for m in modes] + [(0.7, -0.3)]
    for r1, r2 in pairs:
        printed = paper.cho_state_paper(r1, r2, n)
        worst_f = max(worst_f, printed.factorization_error)
        reduced = partial_trace(printed.normalized(), "mode1")
        worst_s = max(worst_s, von_neumann_entropy(reduced).value)
    return CheckResult(
        "8 printed coupled-oscillator state is a product state",
        worst_f,
        tol,
        worst_f <= tol and worst_s <= 1e-10,
        f"inter-mode entropy after normalization {worst_s:.3e}",
    )


def check_symmetry_purity_vacuum(s: Settings) -> CheckResult:
    tol = 1e-9
    purity_tol = 1e-10
    states: List[TwoModePureState] = [
        tms_state(1.0, s.cutoff(24)),
        thermal_vacuum_state(1.0, s.cutoff(24)),
        cho_ground_state_numeric(OscillatorPair(1.0, 1.0, 0.5), s.cutoff(16)),
    ]
    worst_sym = 0.0
    worst_purity = 0.0
    for st in states:
        rho = density_from_pure(st)
        worst_purity = max(worst_purity, abs(rho.purity - 1.0))
        s1 = von_neumann_entropy(partial_trace(rho, "mode1")).value
        s2 = von_neumann_entropy(partial_trace(rho, "mode2")).value
        worst_sym = max(worst_sym, abs(s1 - s2))
    vac = np.zeros((8, 8), dtype=complex)
    vac[0, 0] = 1.0
    rho_vac = partial_trace(density_from_pure(TwoModePureState(vac)), "mode1")
    vac_err = float(np.max(np.abs(rho_vac.data - vacuum_projector(8))))
    return CheckResult(
        "9 equal entropies across modes, unit purity, vacuum projector",
        worst_sym,
        tol,
        worst_sym <= tol and worst_purity <= purity_tol and vac_err == 0.0,
        f"purity error {worst_purity:.3e}; vacuum projector error {vac_err:.1e}",
    )


def check_convergence(s: Settings) -> CheckResult:
    fine_tol = 1e-8 * s.tol_scale
    cho_tol = 1e-6 * s.tol_scale
    worst_fine = 0.0
    for lam in IDENTITY_LAMBDAS:
        n = s.cutoff(128, _tms_log_ratio(lam))
        worst_fine = max(worst_fine, convergence_report("tms", {"lambda": lam}, [n, 2 * n]).final_delta)
    for bw in THERMAL_BETAS:
        n = s.cutoff(64, -bw)
        worst_fine = max(worst_fine, convergence_report("thermal", {"beta_omega": bw}, [n, 2 * n]).final_delta)
    worst_cho = 0.0
    n = s.cutoff(16)
    for delta in CHO_DELTAS:
        worst_cho = max(worst_cho, convergence_report("cho", {"delta": delta}, [n, 2 * n]).final_delta)
    return CheckResult(
        "10 entropy converged between cutoffs N and 2N",
        worst_fine,
        fine_tol,
        worst_fine < fine_tol and worst_cho < cho_tol,
        f"coupled oscillators {worst_cho:.3e} < {cho_tol:.0e}",
    )


def check_eigensolver(s: Settings) -> CheckResult:
    rng = np.random.default_rng(s.seed)
    worst = 0.0
    for dim in (2, 17, 64, 128 if s.fast else 256):
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (m + m.conj().T) / 2
        w, v = hermitian_eigensystem(h)
        err = np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) / np.max(np.abs(h))
        worst = max(worst, float(err))
    return _upper(worst, 1e-9, "eigensolver reconstructs random Hermitian matrices", f"seed {s.seed}")


# the first CRITERIA entries are the numbered acceptance criteria
CRITERIA = 10

CHECKS: List[Callable[[Settings], CheckResult]] = [
    check_tms_closed_vs_numeric,
    check_occupation_identity,
    check_tms_monotone,
    check_thermal_gibbs,
    check_thermal_limits,
    check_cho_dual_oracle,
    check_printed_entropy_argmax,
    check_printed_state_factorizes,
    check_symmetry_purity_vacuum,
    check_convergence,
    check_eigensolver,
]


def run_checks(fast: bool = False, seed: int = 1234) -> List[CheckResult]:
    settings = Settings(fast=fast, seed=seed)
    results = []
    for number, check in enumerate(CHECKS, start=1):
        try:
            results.append(check(settings))
        except Exception as exc:  # a crashing check is a failing check
            label = check.__name__.removeprefix("check_").replace("_", " ")
            if number <= CRITERIA:
                label = f"{number} {label}"
            results.append(CheckResult(label, math.nan, math.nan, False, f"error: {exc!r}"))
    return results
