"""Quasiparticle-picture predictions as one-dimensional momentum integrals.

Every observable here is ``int dk/2pi K(k, t) f(k)`` on ``[-pi, pi]`` with a
counting kernel ``min(2|v_k| t, ell)`` (pairs shared with the complement) or
``max(ell - 2|v_k| t, 0)`` (pairs fully inside the subsystem). The kernels
have kinks at the zeros of ``v`` and where ``2|v_k| t = ell``; the integrator
splits the range at those points before calling adaptive quadrature.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize
from scipy.special import entr

from .errors import DomainError, InvalidState, QuadratureFailure

__all__ = [
    "OccupationProfile",
    "NeelProfile",
    "MpembaResult",
    "binary_entropy",
    "tilted_ferro_occupation",
    "tilted_ferro_profile",
    "neel_profile",
    "qpp_entropy",
    "qpp_gaussian_asymmetry",
    "qpp_saturation_entropy",
    "qpp_background_asymmetry",
    "qpp_neel_asymmetry",
    "qpp_fcs_asymmetry",
    "qpp_variance_difference",
    "fcs_pair_contribution",
    "find_crossing",
    "mpemba_diagnosis",
]

_EPSABS = 1e-13
_EPSREL = 1e-10
_LIMIT = 200
_ROOT_GRID = 4097


def _s(n):
    n = np.clip(n, 0.0, 1.0)
    return entr(n) + entr(1.0 - n)


def binary_entropy(n):
    """``-n log n - (1-n) log(1-n)`` in nats, with ``s(0) = s(1) = 0``.

    Raises
    ------
    DomainError
        If any ``n`` lies outside ``[0, 1]`` by more than ``1e-12``.
    """
    arr = np.asarray(n, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12) or np.any(np.isnan(arr)):
        raise DomainError(f"occupation outside [0, 1]: {n}")
    out = _s(arr)
    return float(out) if out.ndim == 0 else out


def _sin(k):
    return np.sin(k)


@dataclass(frozen=True, eq=False)
class OccupationProfile:
    """Mode occupations ``n(k)`` and group velocities ``v(k)`` on ``[-pi, pi]``.

    ``n`` and ``v`` are vectorised callables. ``kinks`` lists momenta where
    ``n`` is not smooth; the integrator splits there.
    """

    n: Callable
    v: Callable = _sin
    label: str = ""
    kinks: tuple = ()

    def __post_init__(self):
        k = np.linspace(-np.pi, np.pi, 513)
        nk = np.asarray(self.n(k), dtype=float)
        vk = np.asarray(self.v(k), dtype=float)
        if nk.shape != k.shape or vk.shape != k.shape:
            raise InvalidState("n and v must be vectorised functions of k")
        if not np.all(np.isfinite(nk)) or nk.min() < -1e-12 or nk.max() > 1 + 1e-12:
            raise InvalidState("occupations must lie in [0, 1]")
        if not np.all(np.isfinite(vk)):
            raise InvalidState("velocities must be finite")

    @classmethod
    def from_table(cls, k, n, v=_sin, label=""):
        """Periodic piecewise-linear interpolation of tabulated occupations.

        ``v`` may be a callable or a table on the same momenta.
        """
        k = np.asarray(k, dtype=float)
        order = np.argsort(k)
        k, n = k[order], np.asarray(n, dtype=float)[order]

        def n_of(q):
            return np.interp(q, k, n, period=2 * np.pi)

        if callable(v):
            v_of = v
        else:
            vt = np.asarray(v, dtype=float)[order]

            def v_of(q):
                return np.interp(q, k, vt, period=2 * np.pi)

        return cls(n_of, v_of, label, tuple(k))

    def entropy_density(self, k):
        return _s(self.n(k))

    def max_speed(self):
        k = np.linspace(-np.pi, np.pi, _ROOT_GRID)
        return float(np.max(np.abs(self.v(k))))


def tilted_ferro_occupation(theta, k):
    """Mode occupation after the tilted-ferromagnet quench.

    Written as ``(1 - cos th)^2 (1 + cos k) / (2 D)`` with
    ``D = 1 + cos^2 th - 2 cos th cos k``, algebraically identical to
    ``(1/2)(1 - (2 cos th - (1 + cos^2 th) cos k) / D)`` but accurate when
    ``n_k`` is close to 0 or 1.
    """
    c = math.cos(theta)
    k = np.asarray(k, dtype=float)
    # D vanishes only at |c| = 1, where n_k is identically 0 or 1
    if c == 1.0:
        return np.zeros_like(k)
    if c == -1.0:
        return np.ones_like(k)
    D = 1 + c * c - 2 * c * np.cos(k)
    return (1 - c) ** 2 * (1 + np.cos(k)) / (2 * D)


def tilted_ferro_profile(theta):
    """Occupations of the tilted ferromagnet evolving with ``eps_k = -cos k``."""
    return OccupationProfile(lambda k: tilted_ferro_occupation(theta, k), _sin,
                             f"tilted ferro theta={theta:.6g}")


# --- integration machinery -------------------------------------------------

def _sign_change_roots(g, lo=-np.pi, hi=np.pi):
    k = np.linspace(lo, hi, _ROOT_GRID)
    gk = g(k)
    roots = list(k[gk == 0])
    idx = np.nonzero(np.sign(gk[:-1]) * np.sign(gk[1:]) < 0)[0]
    for i in idx:
        roots.append(optimize.brentq(g, k[i], k[i + 1], xtol=1e-14, rtol=1e-15))
    return roots


def _breakpoints(v, ell, t, extra=()):
    pts = [-np.pi, 0.0, np.pi]
    pts += _sign_change_roots(v)
    if t > 0 and np.isfinite(t):
        pts += _sign_change_roots(lambda k: 2 * np.abs(v(k)) * t - ell)
    pts += [p for p in extra if -np.pi <= p <= np.pi]
    return np.unique(np.clip(pts, -np.pi, np.pi))


def _quad(f, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=_EPSABS, epsrel=_EPSREL, limit=_LIMIT)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(f"quadrature on [{a:.6g}, {b:.6g}] failed: {exc}") from None
    if not np.isfinite(val):
        raise QuadratureFailure(f"non-finite integral on [{a:.6g}, {b:.6g}]")
    return val


def _integrate(f, points):
    return sum(_quad(f, a, b) for a, b in zip(points[:-1], points[1:]) if b > a)


def _kernel_integral(density, v, ell, t, kind, kinks=(), measure=2 * np.pi):
    """``int dk/measure K(k) density(k)`` with ``K`` the min or max counting kernel."""
    if not ell > 0:
        raise DomainError(f"subsystem length must be positive, got {ell}")
    if not t >= 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if math.isinf(t):
        if kind == "max":
            return 0.0
        kern = lambda k: ell
    elif kind == "min":
        kern = lambda k: min(2 * abs(v(k)) * t, ell)
    else:
        kern = lambda k: max(ell - 2 * abs(v(k)) * t, 0.0)
    pts = _breakpoints(v, ell, t, kinks)
    return _integrate(lambda k: kern(k) * float(density(k)), pts) / measure


# --- entropy and Gaussian asymmetry ----------------------------------------

def qpp_saturation_entropy(profile, ell):
    """``ell * int dk/2pi s(n_k)``."""
    return _kernel_integral(profile.entropy_density, profile.v, ell, math.inf, "min",
                            profile.kinks)


def qpp_entropy(profile, ell, t):
    """Entanglement entropy growth ``int dk/2pi min(2|v_k| t, ell) s(n_k)``."""
    if t == 0:
        return 0.0
    return _kernel_integral(profile.entropy_density, profile.v, ell, t, "min", profile.kinks)


def qpp_gaussian_asymmetry(profile, ell, t):
    """Gaussian asymmetry decay ``int dk/2pi max(ell - 2|v_k| t, 0) s(n_k)``.

    ``t = inf`` is accepted and returns exactly 0.
    """
    return _kernel_integral(profile.entropy_density, profile.v, ell, t, "max", profile.kinks)


# --- crossing search --------------------------------------------------------

@dataclass(frozen=True)
class MpembaResult:
    """Outcome of comparing two asymmetry curves.

    ``ordering_at_zero`` is +1 if the first curve starts higher, -1 if the
    second does and 0 if they start level. ``crossing_time`` is ``None`` when
    the initially larger curve never drops strictly below the other.
    """

    ordering_at_zero: int
    crossing_time: Optional[float]
    initial_values: tuple

    @property
    def mpemba(self):
        return self.ordering_at_zero != 0 and self.crossing_time is not None


def find_crossing(f1, f2, t_max, n_grid=400, tol=1e-6, rel_threshold=1e-9):
    """Earliest ``t`` in ``(0, t_max]`` where the initially larger of ``f1, f2`` drops below.

    A coarse scan locates the first strict reversal (difference beyond
    ``rel_threshold`` times the initial scale); bisection then narrows it to
    ``tol``. Returns ``(ordering_at_zero, crossing_time or None)``.
    """
    a0, b0 = f1(0.0), f2(0.0)
    scale = max(abs(a0), abs(b0), 1e-300)
    thr = rel_threshold * scale
    d0 = a0 - b0
    if abs(d0) <= thr:
        return 0, None
    sign = 1 if d0 > 0 else -1

    def diff(t):
        return sign * (f1(t) - f2(t))

    lo = 0.0
    for t in np.linspace(0.0, t_max, n_grid + 1)[1:]:
        d = diff(t)
        if d < -thr:
            hi = float(t)
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if diff(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            return sign, 0.5 * (lo + hi)
        if d > 0:
            lo = float(t)
    return sign, None


def mpemba_diagnosis(p1, p2, ell, t_max=None, n_grid=400, tol=1e-6):
    """Detect a crossing of the Gaussian-asymmetry curves of two profiles.

    The default search window is ``10 ell / (2 max|v|)``, well past the time
    at which the fastest pairs have left the subsystem.
    """
    if t_max is None:
        t_max = 10 * ell / (2 * max(p1.max_speed(), p2.max_speed()))
    order, tc = find_crossing(lambda t: qpp_gaussian_asymmetry(p1, ell, t),
                              lambda t: qpp_gaussian_asymmetry(p2, ell, t),
                              t_max, n_grid=n_grid, tol=tol)
    init = (qpp_gaussian_asymmetry(p1, ell, 0.0), qpp_gaussian_asymmetry(p2, ell, 0.0))
    return MpembaResult(order, tc, init)


# --- tilted Neel --------------------------------------------------------------

def _half_sin(k):
    return np.sin(np.asarray(k) / 2)


@dataclass(frozen=True)
class NeelProfile:
    """Occupations for the tilted-Neel quench at tilt ``theta`` in ``[0, pi/2]``.

    ``n0`` fixes the initial entropy density of the symmetrised state,
    ``ninf`` its late-time density and ``n`` the occupation of the pairs
    propagating on that background. Velocities are ``sin(k/2)``.
    """

    theta: float

    def _denominator(self, k):
        c2 = math.cos(self.theta) ** 2
        return 1 + 2 * np.cos(k) * c2 + c2 * c2

    def _ratio(self, num, k):
        k = np.asarray(k, dtype=float)
        if self.theta == 0.0:
            # numerators carry sin^2 theta; the 0/0 at k = +-pi has limit 0
            return np.zeros_like(k)
        return num / self._denominator(k)

    def g11(self, k):
        c, s2 = math.cos(self.theta), math.sin(self.theta) ** 2
        k = np.asarray(k, dtype=float)
        return -c - self._ratio(c * s2 * (np.cos(k) + c * c), k)

    def g12(self, k):
        c = math.cos(self.theta)
        k = np.asarray(k, dtype=float)
        return -self._ratio(np.cos(k / 2) * (1 - c ** 4), k)

    def f12(self, k):
        c, s2 = math.cos(self.theta), math.sin(self.theta) ** 2
        k = np.asarray(k, dtype=float)
        return -self._ratio(c * s2 * np.cos(k), k)

    def n0(self, k):
        return np.clip((1 + np.hypot(self.g11(k), self.g12(k))) / 2, 0.0, 1.0)

    def ninf(self, k):
        return np.clip((1 + self.g12(k)) / 2, 0.0, 1.0)

    def n(self, k):
        return np.clip((1 + self.g12(k) + self.f12(k)) / 2, 0.0, 1.0)

    @staticmethod
    def v(k):
        return _half_sin(k)


def neel_profile(theta):
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise DomainError(f"tilt angle must lie in [0, pi/2], got {theta}")
    return NeelProfile(float(min(theta, math.pi / 2)))


def qpp_background_asymmetry(n, n0, ninf, v, ell, t, kinks=()):
    """Gaussian asymmetry when pairs propagate on an entropic background.

    ``int dk/2pi min(2|v|t, ell) (s(ninf) - s(n)) + int dk/2pi max(ell - 2|v|t, 0) s(n0)``.
    Reduces to :func:`qpp_gaussian_asymmetry` when the three occupations coincide.
    """
    shared = 0.0 if t == 0 else _kernel_integral(
        lambda k: _s(ninf(k)) - _s(n(k)), v, ell, t, "min", kinks)
    inside = _kernel_integral(lambda k: _s(n0(k)), v, ell, t, "max", kinks)
    return shared + inside


def qpp_neel_asymmetry(profile, ell, t):
    """Tilted-Neel Gaussian asymmetry; ``t = inf`` gives the late-time plateau."""
    return qpp_background_asymmetry(profile.n, profile.n0, profile.ninf, profile.v, ell, t)


# --- counting statistics -----------------------------------------------------

def fcs_pair_contribution(n, beta):
    """``log[(1 - n + n e^{2 beta}) / (1 - n + n e^beta)^2]``, non-negative by convexity."""
    n = np.asarray(n, dtype=float)
    return np.log1p(n * np.expm1(2 * beta)) - 2 * np.log1p(n * np.expm1(beta))


def qpp_fcs_asymmetry(profile, ell, t, beta):
    """``int dk/4pi max(ell - 2|v_k| t, 0) z_beta(k)`` for ``beta > 0``."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    return _kernel_integral(lambda k: fcs_pair_contribution(profile.n(k), beta), profile.v,
                            ell, t, "max", profile.kinks, measure=4 * np.pi)


def qpp_variance_difference(profile, ell, t):
    """``int dk/2pi max(ell - 2|v_k| t, 0) n_k (1 - n_k)``."""
    def density(k):
        nk = np.clip(profile.n(k), 0.0, 1.0)
        return nk * (1 - nk)

    return _kernel_integral(density, profile.v, ell, t, "max", profile.kinks)
