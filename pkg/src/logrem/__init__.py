"""Numerical laboratory for a log-correlated Gaussian field on the discrete
circle: exact strip samplers, Gibbs/overlap statistics, Poisson-Dirichlet
partitions, and the closed-form limits they are checked against."""

from .kernels import HeightBand, covariance_matrix, covariance_row, full_band, strip_covariance
from .lattice import LatticeSpec, circle_distance, overlap
from .perturbed import (
    HierarchicalSampler,
    PerturbationSpec,
    TwoScaleSampler,
    ancestor_map,
    sample_hierarchical,
    sample_two_scale,
)
from .sampling import (
    DenseSampler,
    FieldSample,
    KernelNotPSDError,
    SpectralSampler,
    build_spectral_sampler,
    sample_field,
    sample_field_scales,
)

__all__ = [
    "DenseSampler",
    "FieldSample",
    "HeightBand",
    "HierarchicalSampler",
    "KernelNotPSDError",
    "LatticeSpec",
    "PerturbationSpec",
    "SpectralSampler",
    "TwoScaleSampler",
    "ancestor_map",
    "build_spectral_sampler",
    "circle_distance",
    "covariance_matrix",
    "covariance_row",
    "full_band",
    "overlap",
    "sample_field",
    "sample_field_scales",
    "sample_hierarchical",
    "sample_two_scale",
    "strip_covariance",
]

__version__ = "0.1.0"
