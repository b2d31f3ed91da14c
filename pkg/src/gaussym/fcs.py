"""Full counting statistics of the subsystem charge on Gaussian states."""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.special import bernoulli

from .core import DiracCorrelationMatrix, assemble_full, entropy, symmetrise
from .errors import DimensionMismatch, DomainError, SingularDeterminant, StencilInstability

__all__ = [
    "FcsCurve",
    "log_fcs",
    "fcs_matrix",
    "fcs_blocks",
    "fcs_asymmetry",
    "fcs_curve",
    "variance_difference",
    "pairing_distance",
    "charge_cumulants",
    "entropy_from_cumulants",
    "MAX_CUMULANT_ORDER",
]

MAX_CUMULANT_ORDER = 8
# contour radius for cumulants; zeros of Z(beta) satisfy |Im beta| >= pi/2
_CONTOUR_RADIUS = 1.0
_CONTOUR_POINTS = 96


@dataclass(frozen=True)
class FcsCurve:
    beta_grid: np.ndarray
    logZ: np.ndarray
    state_label: str = ""


def fcs_matrix(C, beta):
    """``(1 + (2C - 1) Gamma_N) / 2`` with ``Gamma_N = tanh(beta/2) diag(1, .., 1, -1, .., -1)``."""
    ell = C.ell
    tau = np.tanh(np.asarray(beta) / 2)
    sz = np.concatenate([np.ones(ell), -np.ones(ell)])
    X = 2 * assemble_full(C) - np.eye(2 * ell)
    return 0.5 * (np.eye(2 * ell) + X * (tau * sz)[None, :])


def fcs_blocks(C, beta):
    """Blocks ``(A, B, C, D)`` of :func:`fcs_matrix` in terms of ``G`` and ``F``."""
    ell = C.ell
    tau = np.tanh(beta / 2)
    one = np.eye(ell)
    A = 0.5 * one + 0.5 * tau * (2 * C.G - one)
    B = -tau * C.F
    Cb = tau * C.F.conj().T
    D = 0.5 * one + 0.5 * tau * (2 * C.G.T - one)
    return A, B, Cb, D


def log_fcs(C, beta):
    """``log Tr[exp(beta Q_A) rho]`` from the determinant formula.

    Negative ``beta`` is allowed. The determinant is evaluated by a pivoted LU
    log-determinant, which is immune to under/overflow.

    Raises
    ------
    SingularDeterminant
        If the FCS matrix is numerically singular.
    """
    beta = float(beta)
    if beta == 0.0:
        return 0.0
    M = fcs_matrix(C, beta)
    sign, logabs = np.linalg.slogdet(M)
    if sign == 0 or not np.isfinite(logabs):
        w = np.linalg.eigvals(M)
        raise SingularDeterminant(
            f"FCS determinant vanishes at beta={beta}", eigenvalue=w[np.argmin(np.abs(w))])
    if abs(sign - 1) > 1e-6:
        raise SingularDeterminant(f"FCS determinant has phase {sign} at beta={beta}")
    return float(C.ell * np.logaddexp(0.0, beta) + 0.5 * logabs)


def fcs_asymmetry(C, beta):
    """``log Z_C(beta) - log Z_{sym(C)}(beta)`` for ``beta > 0``; non-negative."""
    if not beta > 0:
        raise DomainError(f"FCS asymmetry is defined for beta > 0, got {beta}")
    return log_fcs(C, beta) - log_fcs(symmetrise(C), beta)


def fcs_curve(C, betas, label=""):
    betas = np.asarray(betas, dtype=float)
    return FcsCurve(betas, np.array([log_fcs(C, b) for b in betas]), label)


def variance_difference(C):
    """``Tr[F F^dag]``: excess charge variance over the symmetrised state."""
    return float(np.real(np.vdot(C.F, C.F)))


def pairing_distance(C1, C2):
    """Frobenius distance between pairing blocks; a semi-metric blind to ``G``."""
    if C1.ell != C2.ell:
        raise DimensionMismatch(f"ell {C1.ell} vs {C2.ell}")
    return float(np.linalg.norm(C1.F - C2.F))


def _complex_log_fcs(C, betas):
    # principal logs stay on one branch: for |beta| <= 1 every eigenvalue of
    # the FCS matrix lies in a disc of radius 0.28 around 1/2
    ell = C.ell
    X = 2 * assemble_full(C) - np.eye(2 * ell)
    sz = np.concatenate([np.ones(ell), -np.ones(ell)])
    out = np.empty(len(betas), dtype=complex)
    for i, b in enumerate(betas):
        M = 0.5 * (np.eye(2 * ell) + X * (np.tanh(b / 2) * sz)[None, :])
        out[i] = ell * np.log1p(np.exp(b)) + 0.5 * np.sum(np.log(np.linalg.eigvals(M)))
    return out


def charge_cumulants(C, order):
    """Cumulants ``<Q_A^m>_c`` for ``m = 1..order``.

    Derivatives of ``log Z(beta)`` at zero are taken by the trapezoidal Cauchy
    integral on the circle ``|beta| = 1`` in the complex plane, which converges
    geometrically because ``log Z`` is analytic for ``|beta| < pi/2``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > MAX_CUMULANT_ORDER:
        raise StencilInstability(f"cumulants above order {MAX_CUMULANT_ORDER} are not supported")
    N, r = _CONTOUR_POINTS, _CONTOUR_RADIUS
    phi = 2 * np.pi * np.arange(N) / N
    vals = _complex_log_fcs(C, r * np.exp(1j * phi))
    coeffs = np.fft.fft(vals) / N
    m = np.arange(1, order + 1)
    kappa = coeffs[m].real * np.array([factorial(k) for k in m]) / r ** m
    return [float(x) for x in kappa]


def entropy_from_cumulants(C, k_max):
    """Entropy from even charge cumulants with Bernoulli-number weights.

    ``sum_{k=1}^{k_max} (2 pi)^{2k} |B_{2k}| / (2k)! <Q^{2k}>_c``. This is an
    identity for number-conserving states; with pairing it only estimates the
    entropy.
    """
    if not 1 <= k_max <= MAX_CUMULANT_ORDER // 2:
        raise StencilInstability(f"k_max must be in 1..{MAX_CUMULANT_ORDER // 2}")
    kappa = charge_cumulants(C, 2 * k_max)
    B = bernoulli(2 * k_max)
    total = 0.0
    for k in range(1, k_max + 1):
        total += (2 * np.pi) ** (2 * k) * abs(B[2 * k]) / factorial(2 * k) * kappa[2 * k - 1]
    return float(total)
