"""Gaussian entanglement asymmetry of fermionic Gaussian states.

The core object is :class:`DiracCorrelationMatrix`, the pair ``(G, F)`` of
normal and pairing two-point functions on a subsystem. Submodules cover
exact quench dynamics (:mod:`gaussym.quench`), quasiparticle predictions
(:mod:`gaussym.qpp`), Haar-random Gaussian ensembles
(:mod:`gaussym.ensemble`), charge counting statistics (:mod:`gaussym.fcs`)
and dense Fock-space cross-checks (:mod:`gaussym.oracle`).
"""
from .core import (DEFAULT_TOLERANCES, DiracCorrelationMatrix, EntanglementHamiltonianKernel,
                   SpectralTolerances, assemble_full, correlation_from_kernel, entanglement_hamiltonian,
                   entropy, gaussian_asymmetry, relative_entropy_gaussian, symmetrise)
from .errors import (ConfigError, DegenerateMode, DimensionMismatch, DivergentAmplitude,
                     DomainError, FormatError, GaussymError, InvalidRange, InvalidState,
                     InvalidSubsystem, NotUnitary, QuadratureFailure, SingularDeterminant,
                     SingularSigma, StencilInstability, ValidationFailure)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCES",
    "DiracCorrelationMatrix",
    "EntanglementHamiltonianKernel",
    "SpectralTolerances",
    "assemble_full",
    "correlation_from_kernel",
    "entanglement_hamiltonian",
    "entropy",
    "gaussian_asymmetry",
    "relative_entropy_gaussian",
    "symmetrise",
    "ConfigError",
    "DegenerateMode",
    "DimensionMismatch",
    "DivergentAmplitude",
    "DomainError",
    "FormatError",
    "GaussymError",
    "InvalidRange",
    "InvalidState",
    "InvalidSubsystem",
    "NotUnitary",
    "QuadratureFailure",
    "SingularDeterminant",
    "SingularSigma",
    "StencilInstability",
    "ValidationFailure",
]
