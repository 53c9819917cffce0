"""Numerical laboratory for additively deformed Hermitian random matrices.

The package samples Wigner and GUE ensembles, builds the deformed model
M = (W + a*V)/sqrt(N), and probes its local eigenvalue statistics: the
double-contour correlation kernel, its sine-kernel bulk limit, the gap
probability and spacing density of the sine process, and the equivalent
description through conditional densities of non-intersecting Brownian
paths.  Everything is driven by explicit quadrature or Monte Carlo with
seeded, replayable randomness.
"""

__version__ = "0.1.0"

from .ensembles import (
    ElementLaw,
    HermitianMatrix,
    RngSeed,
    WignerSpec,
    assemble_deformed,
    bernoulli_spec,
    convolution_equivalence_check,
    gaussian_spec,
    read_matrix_binary,
    sample_gue,
    sample_wigner,
    uniform_spec,
    write_matrix_binary,
    write_matrix_csv,
)
from .spectral import (
    SaddleData,
    Spectrum,
    hermitian_eigenvalues,
    limit_potential_f,
    log_potential_fN,
    read_spectrum_binary,
    saddle_data,
    semicircle_rho,
    semicircle_sigma,
    write_spectrum_binary,
    write_spectrum_csv,
)
from .kernel import (
    ContourQuadrature,
    KernelContext,
    biorthogonal_kernel,
    build_gamma,
    build_Gamma,
    correlation_det,
    deformed_kernel,
    eval_h_gN,
    fredholm_ratio_check,
    gue_kernel,
    kernel_scan,
    sine_kernel,
)
from .fredholm import (
    NystromGrid,
    fredholm_det,
    fredholm_series,
    gap_probability_H,
    gaudin_density,
    gaudin_moments,
    spacing_cdf,
)
from .paths import (
    PathConfig,
    dyson_ensemble,
    dyson_evolve,
    eigen_density_rhoN,
    heat_kernel,
    km_conditional_density,
    km_limit_density_qS,
)
from .spacing import (
    SpacingWindow,
    bulk_density,
    mc_expected_spacing,
    spacing_statistic,
)

__all__ = [
    "ElementLaw",
    "HermitianMatrix",
    "RngSeed",
    "WignerSpec",
    "assemble_deformed",
    "bernoulli_spec",
    "convolution_equivalence_check",
    "gaussian_spec",
    "read_matrix_binary",
    "sample_gue",
    "sample_wigner",
    "uniform_spec",
    "write_matrix_binary",
    "write_matrix_csv",
    "SaddleData",
    "Spectrum",
    "hermitian_eigenvalues",
    "limit_potential_f",
    "log_potential_fN",
    "read_spectrum_binary",
    "saddle_data",
    "semicircle_rho",
    "semicircle_sigma",
    "write_spectrum_binary",
    "write_spectrum_csv",
    "ContourQuadrature",
    "KernelContext",
    "biorthogonal_kernel",
    "build_gamma",
    "build_Gamma",
    "correlation_det",
    "deformed_kernel",
    "eval_h_gN",
    "fredholm_ratio_check",
    "gue_kernel",
    "kernel_scan",
    "sine_kernel",
    "NystromGrid",
    "fredholm_det",
    "fredholm_series",
    "gap_probability_H",
    "gaudin_density",
    "gaudin_moments",
    "spacing_cdf",
    "PathConfig",
    "dyson_ensemble",
    "dyson_evolve",
    "eigen_density_rhoN",
    "heat_kernel",
    "km_conditional_density",
    "km_limit_density_qS",
    "SpacingWindow",
    "bulk_density",
    "mc_expected_spacing",
    "spacing_statistic",
    "__version__",
]
