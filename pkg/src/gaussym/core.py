"""Correlation-matrix representation of fermionic Gaussian states.

A Gaussian state on ``ell`` modes is stored as the pair ``(G, F)`` with

    G[i, j] = <c_i^dag c_j>,      F[i, j] = <c_i^dag c_j^dag>,

and the Nambu correlation matrix

    C = [[G, F], [F^dag, 1 - G^T]],     C[a, b] = <Psi_a^dag Psi_b>,

where ``Psi = (c_1, ..., c_ell, c_1^dag, ..., c_ell^dag)``. Storing the
creation-creation block (rather than ``<c_i c_j> = F^dag``) is what makes the
block layout above an honest expectation-value matrix for complex ``G``;
every quantity computed here depends on ``F`` only through ``F F^dag`` and
unitary-invariant combinations, so the two labelings agree wherever both make
sense.
"""
from __future__ import annotations

import warnings
from dataclasses import InitVar, dataclass, field

import numpy as np
from scipy.special import entr

from .errors import DegenerateMode, DimensionMismatch, InvalidState, NotUnitary, SingularSigma

__all__ = [
    "SpectralTolerances",
    "DiracCorrelationMatrix",
    "EntanglementHamiltonianKernel",
    "assemble_full",
    "entropy",
    "symmetrise",
    "gaussian_asymmetry",
    "relative_entropy_gaussian",
    "entanglement_hamiltonian",
    "correlation_from_kernel",
    "entropy_series",
    "conjugate_number_conserving",
    "direct_sum",
    "dilation_channel",
    "binary_entropy_sum",
]


@dataclass(frozen=True)
class SpectralTolerances:
    tol_herm: float = 1e-10
    tol_spec: float = 1e-8
    clip_eps: float = 1e-12

    def __post_init__(self):
        if min(self.tol_herm, self.tol_spec, self.clip_eps) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.clip_eps >= self.tol_spec:
            raise ValueError("clip_eps must be smaller than tol_spec")


DEFAULT_TOLERANCES = SpectralTolerances()


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiracCorrelationMatrix:
    """Normal and anomalous two-point functions of a Gaussian state.

    Parameters
    ----------
    G : array_like, shape (ell, ell)
        Hermitian normal block ``<c_i^dag c_j>``.
    F : array_like, shape (ell, ell)
        Antisymmetric pairing block ``<c_i^dag c_j^dag>``.
    tolerances : SpectralTolerances, optional
    validate : bool, default True
        Check hermiticity, antisymmetry and physicality on construction.
        Use :meth:`unchecked` in hot loops where inputs are known to be valid.
    """

    G: np.ndarray
    F: np.ndarray
    tolerances: SpectralTolerances = field(default=DEFAULT_TOLERANCES)
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        G, F = _frozen(self.G), _frozen(self.F)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "F", F)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
            raise InvalidState(f"G must be a non-empty square matrix, got shape {G.shape}")
        if F.shape != G.shape:
            raise InvalidState(f"F has shape {F.shape}, expected {G.shape}")
        if validate:
            self.check()

    @classmethod
    def unchecked(cls, G, F, tolerances=DEFAULT_TOLERANCES):
        return cls(G, F, tolerances, validate=False)

    @classmethod
    def from_full(cls, C, tolerances=DEFAULT_TOLERANCES, validate=True):
        """Read ``(G, F)`` off an assembled ``2 ell x 2 ell`` matrix."""
        C = np.asarray(C)
        ell = C.shape[0] // 2
        return cls(C[:ell, :ell], C[:ell, ell:], tolerances, validate=validate)

    @classmethod
    def vacuum(cls, ell):
        z = np.zeros((ell, ell))
        return cls(z, z)

    @property
    def ell(self):
        return self.G.shape[0]

    @property
    def is_symmetric(self):
        return bool(np.linalg.norm(self.F) <= self.tolerances.tol_spec)

    def check(self):
        tol = self.tolerances
        G, F = self.G, self.F
        herm = np.max(np.abs(G - G.conj().T))
        if herm > tol.tol_herm:
            raise InvalidState(f"G is not Hermitian (max deviation {herm:.3e})")
        anti = np.max(np.abs(F + F.T))
        if anti > tol.tol_herm:
            raise InvalidState(f"F is not antisymmetric (max deviation {anti:.3e})")
        w = np.linalg.eigvalsh(assemble_full(self))
        if w[0] < -tol.tol_spec or w[-1] > 1 + tol.tol_spec:
            raise InvalidState(
                f"correlation spectrum [{w[0]:.3e}, {w[-1]:.3e}] leaves [0, 1]")
        Gh = 0.5 * (G + G.conj().T)
        phys = Gh @ (np.eye(self.ell) - Gh) - F @ F.conj().T
        m = np.linalg.eigvalsh(0.5 * (phys + phys.conj().T))[0]
        if m < -tol.tol_spec:
            raise InvalidState(f"G(1-G) - F F^dag has eigenvalue {m:.3e} < 0")

    def restrict(self, sites):
        """Principal submatrix on ``sites`` (any index array or slice)."""
        idx = np.arange(self.ell)[sites]
        return DiracCorrelationMatrix.unchecked(
            self.G[np.ix_(idx, idx)], self.F[np.ix_(idx, idx)], self.tolerances)

    def allclose(self, other, atol=1e-10):
        return (self.ell == other.ell and np.allclose(self.G, other.G, atol=atol, rtol=0)
                and np.allclose(self.F, other.F, atol=atol, rtol=0))


@dataclass(frozen=True, eq=False)
class EntanglementHamiltonianKernel:
    """Single-particle kernel ``W`` of ``log rho``.

    Convention: ``rho = exp(K) / Z`` with
    ``K = 1/2 sum_ab W[a, b] Psi_a^dag Psi_b`` in the Nambu ordering used by
    :func:`assemble_full`. With that convention ``C = fermi(W)^T`` where
    ``fermi(x) = 1 / (1 + exp(-x))``; a single mode of occupation ``n`` has
    particle-block entry ``log(n / (1 - n))``.
    """

    ell: int
    W: np.ndarray
    clipped_modes: int = 0


def assemble_full(C):
    """The Hermitian ``2 ell x 2 ell`` Nambu matrix ``[[G, F], [F^dag, 1 - G^T]]``."""
    ell = C.ell
    return np.block([[C.G, C.F], [C.F.conj().T, np.eye(ell) - C.G.T]])


def binary_entropy_sum(w):
    """``sum_i h(w_i)`` for eigenvalues clipped into [0, 1]."""
    w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    return float(np.sum(entr(w) + entr(1.0 - w)))


def entropy(C):
    """Von Neumann entropy (nats) of the Gaussian state described by ``C``."""
    w = np.linalg.eigvalsh(assemble_full(C))
    return 0.5 * binary_entropy_sum(w)


def _symmetric_entropy(C):
    # assembled spectrum of (G, 0) is spec(G) and its particle-hole mirror
    return binary_entropy_sum(np.linalg.eigvalsh(C.G))


def symmetrise(C):
    """Gaussian symmetrisation: drop the pairing block, keep ``G``."""
    return DiracCorrelationMatrix.unchecked(C.G, np.zeros_like(C.F), C.tolerances)


def gaussian_asymmetry(C):
    """Entropy of the Gaussian symmetrisation minus the entropy of ``C``."""
    return _symmetric_entropy(C) - entropy(C)


def _hermitian_fn(M, fn):
    w, V = np.linalg.eigh(M)
    return (V * fn(w)) @ V.conj().T


def relative_entropy_gaussian(Crho, Csigma):
    """Relative entropy ``S(rho || sigma)`` between two Gaussian states (nats).

    Raises
    ------
    SingularSigma
        If ``sigma`` has a pure mode (beyond clipping) on which ``rho`` has
        weight, so the relative entropy is infinite.
    """
    if Crho.ell != Csigma.ell:
        raise DimensionMismatch(f"ell {Crho.ell} vs {Csigma.ell}")
    eps = Csigma.tolerances.clip_eps
    A = assemble_full(Crho)
    B = assemble_full(Csigma)
    ws, Vs = np.linalg.eigh(B)
    # weight of rho's occupied / empty parts on sigma's pure directions
    occ = np.real(np.einsum("ai,ab,bi->i", Vs.conj(), A, Vs))
    bad = ((ws < eps) & (occ > Crho.tolerances.tol_spec)) | (
        (ws > 1 - eps) & (1 - occ > Crho.tolerances.tol_spec))
    if np.any(bad):
        raise SingularSigma(
            f"sigma has pure eigenvalue(s) {ws[bad]} where rho has weight {occ[bad]}")
    wsc = np.clip(ws, eps, 1 - eps)
    log_b = (Vs * np.log(wsc)) @ Vs.conj().T
    log_1b = (Vs * np.log1p(-wsc)) @ Vs.conj().T
    cross = np.real(np.trace(A @ log_b) + np.trace((np.eye(len(A)) - A) @ log_1b))
    # Tr[A log A + (1-A) log(1-A)] = -2 S(rho)
    return -entropy(Crho) - 0.5 * cross


def entanglement_hamiltonian(C):
    """Kernel ``W`` of the entanglement Hamiltonian, see :class:`EntanglementHamiltonianKernel`.

    Eigenvalues of the assembled matrix are clipped to
    ``[clip_eps, 1 - clip_eps]``; if that happens a :class:`DegenerateMode`
    warning is issued and the number of clipped eigenvalues is recorded.
    """
    eps = C.tolerances.clip_eps
    w, V = np.linalg.eigh(assemble_full(C))
    clipped = int(np.sum((w < eps) | (w > 1 - eps)))
    if clipped:
        warnings.warn(f"{clipped} eigenvalue(s) clipped at {eps:g}", DegenerateMode,
                      stacklevel=2)
    w = np.clip(w, eps, 1 - eps)
    logit = (V * (np.log(w) - np.log1p(-w))) @ V.conj().T
    return EntanglementHamiltonianKernel(C.ell, logit.T, clipped)


def correlation_from_kernel(kernel, tolerances=DEFAULT_TOLERANCES):
    """Inverse of :func:`entanglement_hamiltonian`."""
    W = kernel.W.T
    full = _hermitian_fn(0.5 * (W + W.conj().T), lambda x: 0.5 * (1 + np.tanh(x / 2)))
    return DiracCorrelationMatrix.from_full(full, tolerances, validate=False)


def entropy_series(C, n_max):
    """Truncated power series of the entropy in the shifted matrix ``2C - 1``.

    ``ell log 2 - sum_{n=1}^{n_max} Tr[(2C-1)^{2n}] / (4n(2n-1))``; each term
    is non-negative so the result decreases monotonically in ``n_max``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x2 = (2 * np.linalg.eigvalsh(assemble_full(C)) - 1) ** 2
    n = np.arange(1, n_max + 1)
    powers = x2[None, :] ** n[:, None]
    terms = powers.sum(axis=1) / (4 * n * (2 * n - 1))
    return float(C.ell * np.log(2) - terms.sum())


def _check_unitary(V, tol):
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {V.shape}")
    dev = np.max(np.abs(V @ V.conj().T - np.eye(len(V))))
    if dev > tol:
        raise NotUnitary(f"V V^dag deviates from identity by {dev:.3e}")
    return V


def conjugate_number_conserving(C, V):
    """Apply the number-conserving Gaussian unitary ``c_i^dag -> sum_j V_ij c_j^dag``."""
    V = _check_unitary(V, C.tolerances.tol_herm)
    if len(V) != C.ell:
        raise DimensionMismatch(f"V is {len(V)}x{len(V)} but ell = {C.ell}")
    return DiracCorrelationMatrix.unchecked(
        V @ C.G @ V.conj().T, V @ C.F @ V.T, C.tolerances)


def direct_sum(*states):
    """Tensor product of independent Gaussian states (block-diagonal ``G`` and ``F``)."""
    from scipy.linalg import block_diag

    G = block_diag(*[s.G for s in states])
    F = block_diag(*[s.F for s in states])
    return DiracCorrelationMatrix.unchecked(G, F, states[0].tolerances)


def dilation_channel(C, ancilla, V):
    """Symmetric Gaussian channel: append ``ancilla``, rotate jointly by ``V``, trace the ancilla.

    ``ancilla`` must be symmetric (no pairing) for the channel to commute
    with the charge.
    """
    if not ancilla.is_symmetric:
        raise InvalidState("ancilla state carries pairing correlations")
    joint = conjugate_number_conserving(direct_sum(C, ancilla), V)
    return joint.restrict(slice(0, C.ell))
