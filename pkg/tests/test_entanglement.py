import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosent.entanglement import (
    Base,
    DensityMatrix,
    density_from_pure,
    entanglement_entropy,
    entropy_from_probabilities,
    entropy_gaussian_closed,
    entropy_tms_closed,
    entropy_tms_series,
    entropy_tv_closed,
    occupation_series,
    partial_trace,
    reduced_density,
    schmidt_weights,
    von_neumann_entropy,
)
from bosent.exceptions import InvalidStateError, NegativeEigenvalueError
from bosent.states import (
    OscillatorPair,
    TwoModePureState,
    cho_ground_state_numeric,
    normal_mode_params,
    thermal_vacuum_state,
    tms_state,
)

# Frozen from 40-digit mpmath sums of -sum p_n log p_n over the full
# geometric distributions (tms: p_n = sech^2 tanh^2n; thermal: (1-x) x^n;
# Gaussian: thermal distribution with mean occupation (nu - 1)/2).
TMS_ENTROPY = {0.5: 0.6594529591680367, 1.0: 1.6198220928977023, 1.5: 2.6145320945579407}
TV_ENTROPY = {0.5: 1.7034991708355877, 1.0: 1.0406518522564083, 2.0: 0.4584487433681904}
TV_ENTROPY_300K = 0.3307977498328816
GAUSS_ENTROPY_HALF_COUPLING = 0.09439246594441708


def bell_like(n=3):
    c = np.zeros((n, n))
    c[0, 0] = c[1, 1] = 1 / math.sqrt(2)
    return TwoModePureState(c)


def brute_partial_trace(rho, n1, n2, keep):
    out = np.zeros((n1, n1) if keep == 1 else (n2, n2), dtype=complex)
    for j in range(n1):
        for k in range(n1):
            for n in range(n2):
                for m in range(n2):
                    v = rho[j * n2 + n, k * n2 + m]
                    if keep == 1 and n == m:
                        out[j, k] += v
                    if keep == 2 and j == k:
                        out[n, m] += v
    return out


def random_state(rng, n1, n2):
    c = rng.normal(size=(n1, n2)) + 1j * rng.normal(size=(n1, n2))
    return TwoModePureState(c / np.linalg.norm(c))


class TestDensityMatrix:
    def test_vacuum(self):
        c = np.zeros((4, 4))
        c[0, 0] = 1
        rho = density_from_pure(TwoModePureState(c))
        expected = np.zeros((16, 16))
        expected[0, 0] = 1
        np.testing.assert_array_equal(rho.data, expected)

    def test_bell_like_entries(self):
        rho = density_from_pure(bell_like(3))
        nz = np.argwhere(np.abs(rho.data) > 0)
        assert {tuple(ix) for ix in nz} == {(0, 0), (0, 4), (4, 0), (4, 4)}
        np.testing.assert_allclose(np.abs(rho.data[np.abs(rho.data) > 0]), 0.5)

    def test_purity_of_pure_state(self):
        rho = density_from_pure(tms_state(0.7, 12))
        assert rho.purity == pytest.approx(1.0, abs=1e-10)

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.diag([0.5, 0.4]))

    def test_symmetrizes_small_noise(self):
        rho = DensityMatrix(np.array([[0.5, 0.1 + 1e-13], [0.1, 0.5]]))
        np.testing.assert_array_equal(rho.data, rho.data.conj().T)

    def test_rejects_mismatched_mode_structure(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix(np.eye(4) / 4, mode_structure=(3, 2))


class TestPartialTrace:
    def test_vacuum(self):
        c = np.zeros((5, 5))
        c[0, 0] = 1
        rho1 = partial_trace(density_from_pure(TwoModePureState(c)), "mode1")
        expected = np.zeros((5, 5))
        expected[0, 0] = 1
        np.testing.assert_array_equal(rho1.data, expected)

    @pytest.mark.parametrize("keep", [1, 2])
    def test_matches_brute_force_sum(self, keep):
        rng = np.random.default_rng(7)
        s = random_state(rng, 3, 4)
        rho = density_from_pure(s)
        got = partial_trace(rho, "mode1" if keep == 1 else "mode2").data
        np.testing.assert_allclose(got, brute_partial_trace(rho.data, 3, 4, keep), atol=1e-15)

    @pytest.mark.parametrize("keep", ["mode1", "mode2"])
    def test_reduced_density_shortcut_agrees(self, keep):
        rng = np.random.default_rng(11)
        s = random_state(rng, 5, 3)
        np.testing.assert_allclose(
            reduced_density(s, keep).data, partial_trace(density_from_pure(s), keep).data, atol=1e-15
        )

    def test_tms_reduced_is_geometric(self):
        rho1 = reduced_density(tms_state(1.0, 64), "mode1").data
        p = np.diag(rho1).real
        off = rho1 - np.diag(np.diag(rho1))
        assert np.abs(off).max() < 1e-12
        np.testing.assert_allclose(p[1:40] / p[:39], math.tanh(1.0) ** 2, rtol=1e-12)

    @pytest.mark.parametrize("bw", [0.5, 1.0, 2.0])
    def test_thermal_reduced_is_gibbs(self, bw):
        rho1 = partial_trace(density_from_pure(thermal_vacuum_state(bw, 64)), "mode1").data
        x = math.exp(-bw)
        gibbs = np.diag([(1 - x) * x**n for n in range(64)])
        assert np.abs(rho1 - gibbs).max() < 1e-10

    def test_trace_preserved(self):
        rng = np.random.default_rng(2)
        rho = density_from_pure(random_state(rng, 6, 6))
        assert partial_trace(rho, "mode2").trace == pytest.approx(1.0, abs=1e-12)

    def test_needs_mode_structure(self):
        with pytest.raises(InvalidStateError):
            partial_trace(DensityMatrix(np.eye(4) / 4))

    def test_bad_keep(self):
        with pytest.raises(ValueError):
            partial_trace(density_from_pure(bell_like()), "mode3")


class TestVonNeumann:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(density_from_pure(tms_state(0.9, 10))).value == pytest.approx(0, abs=1e-10)

    def test_maximally_mixed_qubit(self):
        rho = DensityMatrix(np.diag([0.5, 0.5]))
        assert von_neumann_entropy(rho).value == pytest.approx(math.log(2), abs=1e-15)
        assert von_neumann_entropy(rho, "2").value == pytest.approx(1.0, abs=1e-15)

    def test_reduced_tms_numeric(self):
        s = entanglement_entropy(tms_state(1.0, 128))
        assert s.value == pytest.approx(TMS_ENTROPY[1.0], abs=1e-8)

    def test_tiny_weights_contribute_nothing(self):
        assert entropy_from_probabilities([1.0, 1e-13]).value == 0.0

    def test_negative_noise_clamped(self):
        assert entropy_from_probabilities([1.0, -5e-11]).value == 0.0

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NegativeEigenvalueError):
            entropy_from_probabilities([1.1, -0.1])

    def test_unphysical_density_rejected(self):
        rho = DensityMatrix(np.array([[1.2, 0.0], [0.0, -0.2]]))
        with pytest.raises(NegativeEigenvalueError):
            von_neumann_entropy(rho)


class TestClosedForms:
    def test_tms_zero(self):
        assert entropy_tms_closed(0.0).value == 0.0

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
    def test_tms_frozen(self, lam):
        assert entropy_tms_closed(lam).value == pytest.approx(TMS_ENTROPY[lam], abs=1e-13)

    @pytest.mark.parametrize("lam", [0.3, 1.0, 2.2])
    def test_tms_series_agrees_with_closed_form(self, lam):
        assert entropy_tms_series(lam, 4000).value == pytest.approx(entropy_tms_closed(lam).value, abs=1e-10)

    @pytest.mark.parametrize("lam", [0.0, 0.2, 0.5, 1.0, 1.5])
    def test_tms_closed_vs_numeric(self, lam):
        numeric = entanglement_entropy(tms_state(lam, 128)).value
        assert abs(entropy_tms_closed(lam).value - numeric) < 1e-8

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
    def test_occupation_identity(self, lam):
        c4 = math.cosh(lam) ** 4
        assert abs(occupation_series(lam, 512) - c4) <= 1e-8 * c4

    def test_tms_monotone(self):
        values = [entropy_tms_closed(l).value for l in np.arange(61) * 0.05]
        assert np.all(np.diff(values) > 0)

    def test_tv_cold(self):
        assert entropy_tv_closed(50.0).value < 1e-12
        assert entropy_tv_closed(1000.0).value == 0.0

    @pytest.mark.parametrize("bw", [0.5, 1.0, 2.0])
    def test_tv_frozen(self, bw):
        assert entropy_tv_closed(bw).value == pytest.approx(TV_ENTROPY[bw], abs=1e-13)

    def test_tv_room_temperature(self):
        bw = 1e-20 / (1.3806568e-23 * 300)
        assert entropy_tv_closed(bw).value == pytest.approx(TV_ENTROPY_300K, abs=1e-13)

    @pytest.mark.parametrize("bw", [0.5, 0.8, 1.0, 3.0])
    def test_tv_closed_vs_numeric(self, bw):
        numeric = entanglement_entropy(thermal_vacuum_state(bw, 64)).value
        assert abs(entropy_tv_closed(bw).value - numeric) < 1e-8

    def test_gaussian_limits(self):
        assert entropy_gaussian_closed(1.0).value == 0.0
        assert entropy_gaussian_closed(3.0).value == pytest.approx(2 * math.log(2), abs=1e-15)

    def test_gaussian_half_coupling(self):
        nu = normal_mode_params(OscillatorPair(1.0, 1.0, 0.5)).nu
        assert entropy_gaussian_closed(nu).value == pytest.approx(GAUSS_ENTROPY_HALF_COUPLING, abs=1e-13)

    def test_gaussian_rejects_subunit(self):
        with pytest.raises(ValueError):
            entropy_gaussian_closed(0.99)

    @pytest.mark.parametrize("ratio", [0.1, 0.3, 0.5, 0.7])
    def test_gaussian_vs_diagonalization(self, ratio):
        o = OscillatorPair(1.0, 1.0, ratio)
        numeric = entanglement_entropy(cho_ground_state_numeric(o, 32)).value
        assert abs(numeric - entropy_gaussian_closed(normal_mode_params(o).nu).value) < 1e-4

    @pytest.mark.parametrize(
        "fn,arg",
        [(entropy_tms_closed, 1.1), (entropy_tv_closed, 0.9), (entropy_gaussian_closed, 1.7)],
    )
    def test_base_conversion(self, fn, arg):
        nat = fn(arg, Base.NATURAL).value
        bits = fn(arg, "2").value
        assert abs(bits - nat / math.log(2)) <= 1e-12
        assert fn(arg, "2").base is Base.TWO
        assert fn(arg).to("2").value == pytest.approx(bits, abs=1e-15)


class TestSchmidt:
    def test_product(self):
        c = np.zeros((3, 3))
        c[0, 0] = 1
        np.testing.assert_allclose(schmidt_weights(TwoModePureState(c)), [1, 0, 0])

    def test_bell_like(self):
        np.testing.assert_allclose(schmidt_weights(bell_like())[:2], [0.5, 0.5])

    def test_tms_geometric(self):
        w = schmidt_weights(tms_state(1.0, 64))
        t = math.tanh(1.0) ** 2
        geometric = (1 - t) * t ** np.arange(64) / (1 - t**64)
        np.testing.assert_allclose(w, geometric, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(n1=st.integers(2, 9), n2=st.integers(2, 9), seed=st.integers(0, 2**32 - 1))
def test_pure_state_entropy_symmetry(n1, n2, seed):
    s = random_state(np.random.default_rng(seed), n1, n2)
    rho = density_from_pure(s)
    s1 = von_neumann_entropy(partial_trace(rho, "mode1")).value
    s2 = von_neumann_entropy(partial_trace(rho, "mode2")).value
    w = schmidt_weights(s)
    assert abs(s1 - s2) <= 1e-9
    assert abs(w.sum() - 1) <= 1e-12
    assert np.all(np.diff(w) <= 0)
    assert abs(entropy_from_probabilities(w).value - s1) <= 1e-9
    assert rho.purity == pytest.approx(1.0, abs=1e-10)
