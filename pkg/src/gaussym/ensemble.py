"""Haar-random pure fermionic Gaussian states and their average Gaussian asymmetry.

Majorana convention: site ``j`` (0-based) carries ``a_{2j} = c_j + c_j^dag``
and ``a_{2j+1} = i (c_j^dag - c_j)``; the covariance ``Gamma`` is the real
antisymmetric matrix with ``<a_a a_b> = delta_ab + i Gamma_ab``. The reference
state ``Gamma_0 = (+) [[0, 1], [-1, 0]]`` is the Fock vacuum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (DEFAULT_TOLERANCES, DiracCorrelationMatrix, assemble_full,
                   binary_entropy_sum, entropy)
from .errors import InvalidRange, InvalidState

__all__ = [
    "MajoranaCovariance",
    "EnsembleEstimate",
    "haar_orthogonal",
    "reference_covariance",
    "sample_pure_gaussian",
    "to_dirac",
    "to_majorana",
    "average_gaussian_asymmetry",
    "asymmetry_profile",
    "random_gaussian_state",
    "random_symmetric_state",
    "sample_stream",
]


@dataclass(frozen=True, eq=False)
class MajoranaCovariance:
    Gamma: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.Gamma, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] % 2:
            raise InvalidState(f"Gamma must be 2L x 2L, got {G.shape}")
        if np.max(np.abs(G + G.T), initial=0.0) > 1e-10:
            raise InvalidState("Gamma is not antisymmetric")
        object.__setattr__(self, "Gamma", G)

    @property
    def two_ell(self):
        return self.Gamma.shape[0]

    @property
    def L(self):
        return self.two_ell // 2

    def purity_defect(self):
        """``max |Gamma Gamma^T - 1|``; zero for pure states."""
        return float(np.max(np.abs(self.Gamma @ self.Gamma.T - np.eye(self.two_ell))))


class EnsembleEstimate(NamedTuple):
    L: int
    ell: int
    mean: float
    std_error: float
    n_samples: int
    seed: int


def _transfer(ell):
    # rows: Majorana operators, columns: Nambu (c_1..c_ell, c_1^dag..c_ell^dag)
    A = np.zeros((2 * ell, 2 * ell), dtype=complex)
    j = np.arange(ell)
    A[2 * j, j] = 1
    A[2 * j, ell + j] = 1
    A[2 * j + 1, j] = -1j
    A[2 * j + 1, ell + j] = 1j
    return A


def _swap(ell):
    X = np.zeros((2 * ell, 2 * ell))
    X[:ell, ell:] = np.eye(ell)
    X[ell:, :ell] = np.eye(ell)
    return X


def haar_orthogonal(n, rng):
    """Haar-distributed ``n x n`` orthogonal matrix (QR with sign-fixed ``R`` diagonal)."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def reference_covariance(L):
    return np.kron(np.eye(L), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def sample_stream(seed, index):
    """Independent generator for sample ``index`` derived from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_pure_gaussian(L, rng):
    """``O Gamma_0 O^T`` with ``O`` Haar on ``O(2L)``."""
    if L < 2:
        raise ValueError("L must be >= 2")
    O = haar_orthogonal(2 * L, rng)
    OG = np.empty_like(O)
    OG[:, 0::2] = -O[:, 1::2]
    OG[:, 1::2] = O[:, 0::2]
    Gamma = OG @ O.T
    return MajoranaCovariance(0.5 * (Gamma - Gamma.T))


def _site_indices(L, sites):
    if isinstance(sites, range):
        idx = np.arange(sites.start, sites.stop, sites.step)
    elif isinstance(sites, slice):
        idx = np.arange(L)[sites]
    else:
        idx = np.asarray(sites, dtype=int)
    if idx.size == 0 or idx.min() < 0 or idx.max() >= L:
        raise InvalidRange(f"sites {sites!r} outside 0..{L - 1}")
    return idx


def _majorana_block_to_dirac(Gamma):
    ell = Gamma.shape[0] // 2
    A = _transfer(ell)
    Ainv = A.conj().T / 2
    M = np.eye(2 * ell) + 1j * Gamma
    full = _swap(ell) @ Ainv @ M @ Ainv.T
    return full[:ell, :ell], full[:ell, ell:]


def to_dirac(cov, sites=None, validate=True):
    """Dirac correlation matrix of ``cov`` restricted to ``sites`` (0-based; default all).

    Restriction is taken on the Majorana covariance first, which is exact
    because the Majorana-Dirac map is local to each site.
    """
    L = cov.L
    idx = _site_indices(L, range(L) if sites is None else sites)
    maj = np.stack([2 * idx, 2 * idx + 1], axis=1).ravel()
    G, F = _majorana_block_to_dirac(cov.Gamma[np.ix_(maj, maj)])
    return DiracCorrelationMatrix(G, F, validate=validate)


def to_majorana(C):
    """Inverse of :func:`to_dirac` (for the full set of sites)."""
    ell = C.ell
    A = _transfer(ell)
    M = A @ _swap(ell) @ assemble_full(C) @ A.T
    Gamma = -1j * (M - np.eye(2 * ell))
    if np.max(np.abs(Gamma.imag)) > 1e-8:
        raise InvalidState("Majorana covariance is not real")
    return MajoranaCovariance(Gamma.real)


def _normal_block(Gamma):
    # <c_i^dag c_j> = (2 delta + i(G_ee + G_oo) + G_oe - G_eo) / 4 in Majorana blocks
    ee, oo = Gamma[0::2, 0::2], Gamma[1::2, 1::2]
    eo, oe = Gamma[0::2, 1::2], Gamma[1::2, 0::2]
    return 0.25 * (2 * np.eye(len(ee)) + 1j * (ee + oo) + oe - eo)


def _asymmetry_from_covariance(Gamma_block):
    # the singular values of a real antisymmetric block are the |nu| of its
    # +-i nu eigenpairs, and the assembled correlation spectrum is (1 +- nu)/2
    nu = np.linalg.svd(Gamma_block, compute_uv=False)
    S_rho = 0.5 * binary_entropy_sum(0.5 * (1 + nu))
    S_sym = binary_entropy_sum(np.linalg.eigvalsh(_normal_block(Gamma_block)))
    return S_sym - S_rho


def asymmetry_profile(L, ells, n_samples, seed):
    """Ensemble mean of the Gaussian asymmetry for several block sizes at once.

    Every sample is drawn from its own stream ``sample_stream(seed, i)``, and
    all block sizes are measured on the same samples (leading blocks
    ``0..ell-1``), so the result does not depend on evaluation order.

    Returns
    -------
    list of EnsembleEstimate, one per entry of ``ells``.
    """
    ells = [int(e) for e in ells]
    if n_samples < 2:
        raise ValueError("need at least two samples for a standard error")
    if min(ells) < 1 or max(ells) > L:
        raise InvalidRange(f"block sizes {ells} not within 1..{L}")
    vals = np.empty((n_samples, len(ells)))
    for i in range(n_samples):
        Gamma = sample_pure_gaussian(L, sample_stream(seed, i)).Gamma
        for j, ell in enumerate(ells):
            vals[i, j] = _asymmetry_from_covariance(Gamma[:2 * ell, :2 * ell])
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / np.sqrt(n_samples)
    return [EnsembleEstimate(L, ell, float(m), float(s), n_samples, seed)
            for ell, m, s in zip(ells, mean, se)]


def average_gaussian_asymmetry(L, ell, n_samples=2000, seed=0):
    return asymmetry_profile(L, [ell], n_samples, seed)[0]


def random_gaussian_state(ell, rng, pure=False, mixedness=1.0):
    """Random valid Gaussian state with generic pairing.

    A Haar rotation in Majorana space applied to independent modes whose
    Majorana eigenvalues are ``+-1`` (``pure=True``) or drawn uniformly from
    ``[1 - 2 mixedness, 1]`` with random sign.
    """
    if pure:
        lam = np.ones(ell)
    else:
        lam = rng.uniform(1 - 2 * mixedness, 1.0, size=ell)
    lam = lam * rng.choice([-1.0, 1.0], size=ell)
    O = haar_orthogonal(2 * ell, rng)
    Gamma = O @ (reference_covariance(ell) * np.repeat(lam, 2)[:, None]) @ O.T
    G, F = _majorana_block_to_dirac(0.5 * (Gamma - Gamma.T))
    return DiracCorrelationMatrix(G, F)


def random_symmetric_state(ell, rng, low=0.0, high=1.0):
    """Random ``(U diag(g) U^dag, 0)`` with ``g`` uniform in ``[low, high]``."""
    z = rng.standard_normal((ell, ell)) + 1j * rng.standard_normal((ell, ell))
    q, r = np.linalg.qr(z)
    U = q * (np.diag(r) / np.abs(np.diag(r)))
    g = rng.uniform(low, high, size=ell)
    G = (U * g) @ U.conj().T
    return DiracCorrelationMatrix(0.5 * (G + G.conj().T), np.zeros((ell, ell)))


def random_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
