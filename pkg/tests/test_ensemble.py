import numpy as np
import pytest
from scipy.special import digamma

from gaussym.core import DiracCorrelationMatrix, entropy, gaussian_asymmetry
from gaussym.ensemble import (MajoranaCovariance, _asymmetry_from_covariance,
                              asymmetry_profile, average_gaussian_asymmetry, haar_orthogonal,
                              random_gaussian_state, reference_covariance, sample_pure_gaussian,
                              sample_stream, to_dirac, to_majorana)
from gaussym.errors import InvalidRange, InvalidState


def mean_block_entropy(L, ell):
    """Closed-form Haar average of the block entropy for ell < L/2 (digamma expression)."""
    return ((L - 0.5) * digamma(2 * L) + (0.25 - ell) * digamma(L)
            + (0.5 + ell - L) * digamma(2 * L - 2 * ell) - 0.25 * digamma(L - ell) - ell)


def test_haar_orthogonal_is_orthogonal(rng):
    O = haar_orthogonal(12, rng)
    np.testing.assert_allclose(O @ O.T, np.eye(12), atol=1e-12)


def test_reference_is_vacuum():
    C = to_dirac(MajoranaCovariance(reference_covariance(4)))
    np.testing.assert_allclose(C.G, 0, atol=1e-15)
    np.testing.assert_allclose(C.F, 0, atol=1e-15)


@pytest.mark.parametrize("L", [2, 5, 16])
def test_samples_are_pure(L, rng):
    cov = sample_pure_gaussian(L, rng)
    assert cov.purity_defect() < 1e-11
    assert entropy(to_dirac(cov)) == pytest.approx(0, abs=1e-8)


def test_rejects_non_antisymmetric():
    with pytest.raises(InvalidState):
        MajoranaCovariance(np.eye(4))
    with pytest.raises(InvalidState):
        MajoranaCovariance(np.zeros((3, 3)))


def test_round_trip(rng):
    C = random_gaussian_state(5, rng)
    back = to_dirac(to_majorana(C))
    np.testing.assert_allclose(back.G, C.G, atol=1e-12)
    np.testing.assert_allclose(back.F, C.F, atol=1e-12)


def test_restriction_matches_dirac_restriction(rng):
    cov = sample_pure_gaussian(8, rng)
    full = to_dirac(cov)
    part = to_dirac(cov, range(2, 5))
    np.testing.assert_allclose(part.G, full.G[2:5, 2:5], atol=1e-13)
    np.testing.assert_allclose(part.F, full.F[2:5, 2:5], atol=1e-13)


@pytest.mark.parametrize("sites", [range(0), range(3, 9), [-1], slice(5, 5)])
def test_bad_ranges(sites, rng):
    with pytest.raises(InvalidRange):
        to_dirac(sample_pure_gaussian(6, rng), sites)


def test_profile_bad_ranges():
    with pytest.raises(InvalidRange):
        asymmetry_profile(10, [0, 3], 4, 0)
    with pytest.raises(InvalidRange):
        asymmetry_profile(10, [11], 4, 0)


@pytest.mark.parametrize("ell", [1, 4, 9])
def test_fast_path_equals_dirac_path(ell, rng):
    cov = sample_pure_gaussian(9, rng)
    fast = _asymmetry_from_covariance(cov.Gamma[:2 * ell, :2 * ell])
    slow = gaussian_asymmetry(to_dirac(cov, range(ell)))
    assert fast == pytest.approx(slow, abs=1e-10)


def test_full_system_asymmetry_is_symmetrised_entropy():
    est = asymmetry_profile(12, [12], 50, 7)
    vals = []
    for i in range(50):
        C = to_dirac(sample_pure_gaussian(12, sample_stream(7, i)))
        vals.append(entropy(DiracCorrelationMatrix(C.G, np.zeros_like(C.F))))
    assert est[0].mean == pytest.approx(np.mean(vals), rel=1e-10)


def test_mean_filling_is_half():
    # each sample's mean filling has spread ~ 1/(2 sqrt(L)); 2000 samples keep 5 SE < 0.013
    fill = [np.trace(to_dirac(sample_pure_gaussian(20, sample_stream(11, i))).G).real / 20
            for i in range(2000)]
    se = np.std(fill, ddof=1) / np.sqrt(len(fill))
    assert abs(np.mean(fill) - 0.5) < 5 * se


@pytest.mark.parametrize("ell", [3, 6, 9])
def test_block_entropy_matches_closed_form(ell):
    L, n = 20, 1500
    vals = [entropy(to_dirac(sample_pure_gaussian(L, sample_stream(1, i)), range(ell)))
            for i in range(n)]
    se = np.std(vals, ddof=1) / np.sqrt(n)
    assert abs(np.mean(vals) - mean_block_entropy(L, ell)) < 4 * se


def test_single_site_by_brute_force():
    # for one site the asymmetry is h(g) - h((1 + |nu|)/2) with nu from the 2x2 block
    est = average_gaussian_asymmetry(6, 1, n_samples=300, seed=5)
    vals = []
    for i in range(300):
        Gam = sample_pure_gaussian(6, sample_stream(5, i)).Gamma[:2, :2]
        nu = abs(Gam[0, 1])
        g = 0.5 * (1 + Gam[0, 1])
        h = lambda p: 0.0 if p in (0.0, 1.0) else -p * np.log(p) - (1 - p) * np.log(1 - p)
        vals.append(h(g) - h(0.5 * (1 + nu)))
    assert est.mean == pytest.approx(np.mean(vals), abs=1e-12)
    assert est.mean == pytest.approx(0.0, abs=1e-12)


def test_deterministic_and_order_independent():
    a = asymmetry_profile(10, [2, 5], 30, 42)
    b = asymmetry_profile(10, [5, 2], 30, 42)
    assert a[0].mean == b[1].mean and a[1].mean == b[0].mean
    assert average_gaussian_asymmetry(10, 5, 30, 42) == a[1]
    assert asymmetry_profile(10, [5], 30, 43)[0].mean != a[1].mean


def test_small_block_law():
    est = average_gaussian_asymmetry(200, 10, n_samples=200, seed=3)
    assert est.mean == pytest.approx(10 ** 2 / (4 * 200), rel=0.15)
