import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import h, paired_state
from gaussym.core import (DEFAULT_TOLERANCES, DiracCorrelationMatrix, SpectralTolerances,
                          assemble_full, conjugate_number_conserving, correlation_from_kernel,
                          dilation_channel, direct_sum, entanglement_hamiltonian, entropy,
                          entropy_series, gaussian_asymmetry, relative_entropy_gaussian,
                          symmetrise)
from gaussym.ensemble import random_gaussian_state, random_symmetric_state, random_unitary
from gaussym.errors import (DegenerateMode, DimensionMismatch, InvalidState, NotUnitary,
                            SingularSigma)

H03 = 0.6108643020548935  # -0.3 ln 0.3 - 0.7 ln 0.7


class TestTolerances:
    def test_defaults(self):
        t = SpectralTolerances()
        assert (t.tol_herm, t.tol_spec, t.clip_eps) == (1e-10, 1e-8, 1e-12)

    @pytest.mark.parametrize("kw", [{"tol_herm": 0.0}, {"clip_eps": -1.0}, {"clip_eps": 1e-6}])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ValueError):
            SpectralTolerances(**kw)


class TestValidation:
    def test_non_hermitian_g(self):
        with pytest.raises(InvalidState, match="Hermitian"):
            DiracCorrelationMatrix([[0.2, 0.1], [0.0, 0.2]], np.zeros((2, 2)))

    def test_symmetric_f(self):
        with pytest.raises(InvalidState, match="antisymmetric"):
            DiracCorrelationMatrix(0.5 * np.eye(2), [[0, 0.1], [0.1, 0]])

    def test_spectrum_outside_unit_interval(self):
        with pytest.raises(InvalidState):
            DiracCorrelationMatrix([[1.2]], [[0.0]])

    def test_unphysical_pairing(self):
        # |f|^2 > n(1-n) breaks positivity of the assembled matrix
        with pytest.raises(InvalidState):
            DiracCorrelationMatrix(0.5 * np.eye(2), [[0, 0.6], [-0.6, 0]])

    def test_shape_mismatch(self):
        with pytest.raises(InvalidState):
            DiracCorrelationMatrix(np.eye(2) * 0.5, np.zeros((3, 3)))

    def test_unchecked_skips_validation(self):
        C = DiracCorrelationMatrix.unchecked([[1.2]], [[0.0]])
        assert C.ell == 1

    def test_blocks_are_read_only(self):
        C = DiracCorrelationMatrix.vacuum(2)
        with pytest.raises(ValueError):
            C.G[0, 0] = 1.0


class TestAssemble:
    def test_vacuum(self):
        np.testing.assert_array_equal(assemble_full(DiracCorrelationMatrix.vacuum(2)),
                                      np.diag([0, 0, 1, 1]))

    def test_infinite_temperature_mode(self):
        C = DiracCorrelationMatrix([[0.5]], [[0.0]])
        np.testing.assert_array_equal(assemble_full(C), 0.5 * np.eye(2))

    def test_pure_pair_is_projector(self):
        w = np.linalg.eigvalsh(assemble_full(paired_state(0.3)))
        np.testing.assert_allclose(w, [0, 0, 1, 1], atol=1e-12)

    def test_from_full_round_trip(self, rng):
        C = random_gaussian_state(4, rng)
        assert DiracCorrelationMatrix.from_full(assemble_full(C)).allclose(C, atol=0)


class TestEntropy:
    def test_pure_state(self, rng):
        C = random_gaussian_state(5, rng, pure=True)
        assert abs(entropy(C)) < 1e-8

    def test_maximally_mixed(self):
        C = DiracCorrelationMatrix(0.5 * np.eye(10), np.zeros((10, 10)))
        assert entropy(C) == pytest.approx(10 * np.log(2), abs=1e-12)

    def test_single_mode(self):
        assert entropy(DiracCorrelationMatrix([[0.3]], [[0.0]])) == pytest.approx(H03, abs=1e-12)

    def test_bounds(self, rng):
        for ell in range(1, 9):
            S = entropy(random_gaussian_state(ell, rng))
            assert -1e-8 <= S <= ell * np.log(2) + 1e-8


class TestSymmetrise:
    def test_already_symmetric(self):
        C = DiracCorrelationMatrix(np.diag([0.2, 0.7]), np.zeros((2, 2)))
        assert symmetrise(C).allclose(C, atol=0)

    def test_paired_half_filling(self):
        S = symmetrise(paired_state(0.5))
        assert np.all(S.F == 0)
        assert entropy(S) == pytest.approx(2 * np.log(2), abs=1e-12)

    def test_idempotent_and_physical(self, rng):
        C = random_gaussian_state(6, rng)
        S = symmetrise(C)
        assert symmetrise(S).allclose(S, atol=0)
        S.check()
        G = S.G
        assert np.linalg.eigvalsh(G @ (np.eye(6) - G))[0] > -1e-12


class TestGaussianAsymmetry:
    def test_symmetric_state_zero(self, rng):
        assert abs(gaussian_asymmetry(random_symmetric_state(5, rng))) < 1e-12

    def test_half_filled_pair(self):
        assert gaussian_asymmetry(paired_state(0.5)) == pytest.approx(2 * np.log(2), abs=1e-10)

    def test_pair_at_03(self):
        assert gaussian_asymmetry(paired_state(0.3, 1j)) == pytest.approx(2 * H03, abs=1e-9)

    def test_positivity_and_faithfulness(self, rng):
        for i in range(1000):
            ell = 1 + i % 12
            C = random_gaussian_state(ell, rng, pure=(i % 3 == 0))
            if i % 5 == 0:
                C = symmetrise(C)
            d = gaussian_asymmetry(C)
            assert d >= -1e-8
            assert (d <= 1e-8) == (np.linalg.norm(C.F) <= 1e-6)

    def test_upper_bound(self, rng):
        for ell in (2, 5, 9):
            C = random_gaussian_state(ell, rng)
            S_sym = entropy(symmetrise(C))
            assert gaussian_asymmetry(C) <= S_sym <= ell * np.log(2) + 1e-8


class TestRelativeEntropy:
    def test_identical(self, rng):
        C = random_gaussian_state(3, rng)
        assert abs(relative_entropy_gaussian(C, C)) < 1e-10

    def test_to_symmetrisation_is_asymmetry(self, rng):
        for _ in range(20):
            C = random_gaussian_state(4, rng)
            assert relative_entropy_gaussian(C, symmetrise(C)) == pytest.approx(
                gaussian_asymmetry(C), abs=1e-8)

    def test_minimality(self, rng):
        for _ in range(20):
            C = random_gaussian_state(3, rng)
            dsg = gaussian_asymmetry(C)
            for _ in range(50):
                sigma = random_symmetric_state(3, rng, 0.01, 0.99)
                assert relative_entropy_gaussian(C, sigma) >= dsg - 1e-8

    def test_singular_sigma(self):
        rho = DiracCorrelationMatrix([[0.4]], [[0.0]])
        with pytest.raises(SingularSigma):
            relative_entropy_gaussian(rho, DiracCorrelationMatrix.vacuum(1))

    def test_pure_sigma_supported(self):
        vac = DiracCorrelationMatrix.vacuum(2)
        assert abs(relative_entropy_gaussian(vac, vac)) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            relative_entropy_gaussian(DiracCorrelationMatrix.vacuum(1),
                                      DiracCorrelationMatrix.vacuum(2))


class TestEntanglementHamiltonian:
    def test_infinite_temperature(self):
        k = entanglement_hamiltonian(DiracCorrelationMatrix(0.5 * np.eye(3), np.zeros((3, 3))))
        np.testing.assert_allclose(k.W, 0, atol=1e-14)

    def test_single_mode_logit(self):
        k = entanglement_hamiltonian(DiracCorrelationMatrix([[0.3]], [[0.0]]))
        assert k.W[0, 0].real == pytest.approx(np.log(0.3 / 0.7), abs=1e-12)
        assert k.W[1, 1].real == pytest.approx(np.log(0.7 / 0.3), abs=1e-12)

    def test_round_trip(self, rng):
        for _ in range(10):
            C = random_gaussian_state(3, rng)
            back = correlation_from_kernel(entanglement_hamiltonian(C))
            assert np.linalg.norm(assemble_full(back) - assemble_full(C)) < 1e-8

    def test_pure_mode_warns(self):
        with pytest.warns(DegenerateMode):
            k = entanglement_hamiltonian(DiracCorrelationMatrix.vacuum(2))
        assert k.clipped_modes == 4


class TestEntropySeries:
    def test_half_filling_exact(self):
        C = DiracCorrelationMatrix(0.5 * np.eye(4), np.zeros((4, 4)))
        for n in (1, 5, 30):
            assert entropy_series(C, n) == 4 * np.log(2)

    def test_single_mode_converges(self):
        C = DiracCorrelationMatrix([[0.3]], [[0.0]])
        assert entropy_series(C, 50) == pytest.approx(H03, abs=1e-6)

    def test_pure_state_slowly_reaches_zero(self, rng):
        C = random_gaussian_state(3, rng, pure=True)
        vals = [entropy_series(C, n) for n in (10, 100, 1000)]
        assert vals[0] > vals[1] > vals[2] > 0
        assert vals[2] < 3e-3

    def test_monotone_and_consistent(self, rng):
        for _ in range(10):
            C = random_gaussian_state(4, rng, mixedness=0.9)
            w = np.linalg.eigvalsh(assemble_full(C))
            if w.min() < 0.05 or w.max() > 0.95:
                continue
            vals = [entropy_series(C, n) for n in range(1, 30)]
            assert np.all(np.diff(vals) <= 1e-15)
            assert entropy_series(C, 200) == pytest.approx(entropy(C), abs=1e-6)


class TestUnitaries:
    def test_identity(self, rng):
        C = random_gaussian_state(3, rng)
        assert conjugate_number_conserving(C, np.eye(3)).allclose(C, atol=1e-15)

    def test_permutation(self, rng):
        C = random_gaussian_state(4, rng)
        P = np.eye(4)[[2, 0, 3, 1]]
        out = conjugate_number_conserving(C, P)
        assert gaussian_asymmetry(out) == pytest.approx(gaussian_asymmetry(C), abs=1e-12)

    def test_haar_invariance(self, rng):
        for _ in range(200):
            C = random_gaussian_state(6, rng)
            out = conjugate_number_conserving(C, random_unitary(6, rng))
            assert abs(gaussian_asymmetry(out) - gaussian_asymmetry(C)) < 1e-8
            assert abs(entropy(out) - entropy(C)) < 1e-8

    def test_not_unitary(self):
        with pytest.raises(NotUnitary):
            conjugate_number_conserving(DiracCorrelationMatrix.vacuum(2), 2 * np.eye(2))

    def test_wrong_size(self):
        with pytest.raises(DimensionMismatch):
            conjugate_number_conserving(DiracCorrelationMatrix.vacuum(2), np.eye(3))


class TestChannels:
    def test_direct_sum_entropy_additive(self, rng):
        A, B = random_gaussian_state(2, rng), random_gaussian_state(3, rng)
        assert entropy(direct_sum(A, B)) == pytest.approx(entropy(A) + entropy(B), abs=1e-10)

    def test_monotone(self, rng):
        for _ in range(200):
            ell, m = rng.integers(2, 5), rng.integers(1, 4)
            C = random_gaussian_state(ell, rng)
            out = dilation_channel(C, random_symmetric_state(m, rng),
                                   random_unitary(ell + m, rng))
            out.check()
            assert gaussian_asymmetry(out) <= gaussian_asymmetry(C) + 1e-8

    def test_ancilla_must_be_symmetric(self, rng):
        with pytest.raises(InvalidState):
            dilation_channel(random_gaussian_state(2, rng), paired_state(0.4), np.eye(4))


@settings(max_examples=60, deadline=None)
@given(n=st.floats(0.0, 1.0), phase=st.floats(0, 2 * np.pi))
def test_pair_asymmetry_is_twice_binary_entropy(n, phase):
    C = paired_state(n, np.exp(1j * phase))
    expected = 0.0 if n in (0.0, 1.0) else 2 * h(n)
    assert gaussian_asymmetry(C) == pytest.approx(expected, abs=1e-7)
