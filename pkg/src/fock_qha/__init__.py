"""Numerical quantum harmonic analysis on the Bargmann-Fock space.

Truncated monomial bases, Toeplitz operators, the operator heat semigroup,
QHA convolutions and Berezin transforms, with a verification harness for
the identities and inequalities relating them.
"""
from .fock_core import BasisTruncation, FockVector, enumerate_indices, kernel_coefficients, monomial_value
from .operators import (
    DiagonalOperator,
    OperatorMatrix,
    basic_projection,
    displacement_matrix,
    gaussian_toeplitz,
    heat_semigroup,
    toeplitz_quadrature,
    toeplitz_radial,
    translate_operator,
)
from .qha_conv import ConvolutionResult, berezin, convolve_fn_op, convolve_op_op, heat_flow_operator, reconstruct_toeplitz
from .quadrature import QuadratureGrid, build_grid, integrate
from .spectral import SpectralSummary, convergence_table, spectral_summary
from .symbols import SampledFunction, Symbol, heat_kernel, heat_transform
from .verify import RunConfig, SymbolFamily, VerificationReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "BasisTruncation",
    "FockVector",
    "enumerate_indices",
    "kernel_coefficients",
    "monomial_value",
    "DiagonalOperator",
    "OperatorMatrix",
    "basic_projection",
    "displacement_matrix",
    "gaussian_toeplitz",
    "heat_semigroup",
    "toeplitz_quadrature",
    "toeplitz_radial",
    "translate_operator",
    "ConvolutionResult",
    "berezin",
    "convolve_fn_op",
    "convolve_op_op",
    "heat_flow_operator",
    "reconstruct_toeplitz",
    "QuadratureGrid",
    "build_grid",
    "integrate",
    "SpectralSummary",
    "convergence_table",
    "spectral_summary",
    "SampledFunction",
    "Symbol",
    "heat_kernel",
    "heat_transform",
    "RunConfig",
    "SymbolFamily",
    "VerificationReport",
    "run_suite",
]
