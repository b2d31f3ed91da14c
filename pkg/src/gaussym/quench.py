"""Coherent pair states on a ring and their exact dynamics under the hopping chain.

Initial states ``exp(sum_k M(k) c_k^dag c_{-k}^dag)|0>`` evolve under
``H = -1/2 sum_i (c_i^dag c_{i+1} + h.c.)`` with ``eps_k = -cos k``. In
momentum space the occupations are static and the pairing amplitudes pick up
``exp(-2 i t eps_k)``; the subsystem correlation matrices follow from a
Fourier sum over the anti-periodic grid.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import DiracCorrelationMatrix, binary_entropy_sum, entropy
from .errors import DivergentAmplitude, InvalidState, InvalidSubsystem
from .qpp import OccupationProfile, tilted_ferro_occupation

__all__ = [
    "PairStateSpec",
    "QuenchSnapshot",
    "AsymmetryPoint",
    "momentum_grid",
    "hopping_dispersion",
    "hopping_velocity",
    "occupation_from_amplitude",
    "correlation_matrix_at",
    "tilted_ferro_occupation",
    "tilted_ferro_spec",
    "exact_asymmetry_curve",
    "exact_variance_curve",
    "AMPLITUDE_CAP",
]

AMPLITUDE_CAP = 1e8


def hopping_dispersion(k):
    return -np.cos(k)


def hopping_velocity(k):
    return np.sin(k)


def momentum_grid(L):
    """Anti-periodic grid ``pi (2j + 1 - L) / L``; entry ``L-1-j`` is ``-k_j``."""
    j = np.arange(L)
    return np.pi * (2 * j + 1 - L) / L


@dataclass(frozen=True, eq=False)
class PairStateSpec:
    """Pair amplitude table ``M(k)`` on the anti-periodic grid of a ring of ``L`` sites."""

    L: int
    amplitudes: np.ndarray
    dispersion: Callable = hopping_dispersion
    velocity: Callable = hopping_velocity
    label: str = ""

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise InvalidState(f"ring size must be even and positive, got {self.L}")
        M = np.asarray(self.amplitudes, dtype=complex)
        if M.shape != (self.L,):
            raise InvalidState(f"expected {self.L} amplitudes, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise InvalidState("pair amplitudes must be finite")
        scale = max(1.0, float(np.max(np.abs(M))))
        if np.max(np.abs(M + M[::-1])) > 1e-12 * scale:
            raise InvalidState("pair amplitudes must be odd, M(-k) = -M(k)")
        M = 0.5 * (M - M[::-1])
        M.setflags(write=False)
        object.__setattr__(self, "amplitudes", M)

    @classmethod
    def from_function(cls, L, amplitude, **kwargs):
        return cls(L, amplitude(momentum_grid(L)), **kwargs)

    @property
    def k(self):
        return momentum_grid(self.L)

    def occupations(self):
        a2 = np.abs(self.amplitudes) ** 2
        return a2 / (1 + a2)

    def pairing(self, t):
        """``exp(-2 i t eps_k) M(k) / (1 + |M(k)|^2)`` on the grid."""
        M = self.amplitudes
        return np.exp(-2j * t * self.dispersion(self.k)) * M / (1 + np.abs(M) ** 2)


class QuenchSnapshot(NamedTuple):
    t: float
    C: DiracCorrelationMatrix


class AsymmetryPoint(NamedTuple):
    t: float
    dS_gauss: float
    S_rho: float
    S_sym: float


def occupation_from_amplitude(spec):
    """Tabulated occupation profile ``|M|^2 / (1 + |M|^2)`` with the pair state's velocity."""
    return OccupationProfile.from_table(spec.k, spec.occupations(), spec.velocity,
                                        label=spec.label)


class _FourierBlock:
    """Toeplitz real-space blocks from momentum-space data, for one (spec, ell_A)."""

    def __init__(self, spec, ell_A):
        if not 1 <= ell_A <= spec.L:
            raise InvalidSubsystem(f"subsystem size {ell_A} not in 1..{spec.L}")
        self.spec = spec
        self.ell = ell_A
        d = np.arange(-(ell_A - 1), ell_A)
        self.phase = np.exp(1j * np.outer(d, spec.k)) / spec.L
        x = np.arange(ell_A)
        self.index = x[:, None] - x[None, :] + ell_A - 1
        self.G = self.toeplitz(spec.occupations())

    def toeplitz(self, fk):
        return (self.phase @ fk)[self.index]

    def snapshot(self, t):
        F = self.toeplitz(self.spec.pairing(t))
        return QuenchSnapshot(float(t), DiracCorrelationMatrix.unchecked(self.G, F))


def correlation_matrix_at(spec, t, ell_A):
    """Correlation matrix of sites ``0..ell_A-1`` at time ``t``.

    ``G_xy = (1/L) sum_k e^{ik(x-y)} n_k`` and
    ``F_xy = (1/L) sum_k e^{ik(x-y)} f_k(t)``.
    """
    return _FourierBlock(spec, ell_A).snapshot(t)


def tilted_ferro_spec(theta, L):
    """Pair state reproducing the tilted-ferromagnet occupations.

    Uses the odd real amplitude ``M(k) = tan^2(theta/2) cot(k/2)``, which is
    ``sgn(k) sqrt(n_k / (1 - n_k))`` for the tilted-ferromagnet ``n_k``. At
    ``theta = pi`` the amplitude diverges; it is capped at ``AMPLITUDE_CAP``
    with a :class:`DivergentAmplitude` warning.
    """
    if L % 2:
        raise InvalidState(f"ring size must be even, got {L}")
    k = momentum_grid(L)
    c = np.cos(theta)
    with np.errstate(divide="ignore"):
        ratio = (1 - c) / (1 + c) if 1 + c > 0 else np.inf
    M = ratio / np.tan(k / 2)
    if not np.all(np.isfinite(M)) or np.max(np.abs(M)) > AMPLITUDE_CAP:
        warnings.warn(f"pair amplitude capped at {AMPLITUDE_CAP:g} (theta={theta})",
                      DivergentAmplitude, stacklevel=2)
        M = np.where(np.isfinite(M), M, np.sign(k) * AMPLITUDE_CAP)
        M = np.clip(M, -AMPLITUDE_CAP, AMPLITUDE_CAP)
    return PairStateSpec(L, M, label=f"tilted ferro theta={theta:.6g}")


def exact_asymmetry_curve(spec, ell_A, times):
    """Exact Gaussian asymmetry of the first ``ell_A`` sites at each time.

    Returns a list of :class:`AsymmetryPoint` ``(t, dS_gauss, S_rho, S_sym)``.
    """
    block = _FourierBlock(spec, ell_A)
    S_sym = binary_entropy_sum(np.linalg.eigvalsh(block.G))
    out = []
    for t in times:
        S = entropy(block.snapshot(t).C)
        out.append(AsymmetryPoint(float(t), S_sym - S, S, S_sym))
    return out


def exact_variance_curve(spec, ell_A, times):
    """``Tr[F F^dag](t)`` of the first ``ell_A`` sites: excess charge variance."""
    block = _FourierBlock(spec, ell_A)
    out = []
    for t in times:
        F = block.toeplitz(spec.pairing(t))
        out.append((float(t), float(np.real(np.vdot(F, F)))))
    return out
