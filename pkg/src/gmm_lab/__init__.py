"""Generalized min-max similarity: exact limit theory for bivariate
elliptical data, a matching sampler, and seeded Monte Carlo experiment
tables.

The similarity of a paired sample is the ratio of summed coordinatewise
minima to summed maxima after splitting each value into positive and
negative parts. Under the elliptical model its small-sample mean, its
large-sample limit and its fluctuations all have closed forms; this
package computes them, checks them against brute-force quadrature, and
reproduces the reference simulation tables from the command line.
"""
from .errors import DegenerateInputError, GmmLabError, InputError, RegimeError
from .montecarlo import (
    Experiment,
    ExperimentConfig,
    SimCell,
    SimResult,
    Welford,
    run_experiment,
    run_g1_check,
    run_mean_std,
    run_mse_compare,
    run_var_check,
    welford_accumulate,
)
from .oracle import FUNCTIONALS, quadrature_moment
from .sampling import MixingMatrix, RngState, sample_mixing, sample_pair, sample_uniform_angle
from .similarity import PairedSample, SignedDecomposition, cosine, decompose, gmm
from .theory import (
    EllipticalModel,
    FunctionalMoments,
    Gaussian,
    GeometryParams,
    MixingMoments,
    StudentT,
    UnitT,
    asymptotic_limit,
    asymptotic_limit_unit_scale,
    correlation_from_gmm,
    cosine_correlation_variance,
    geometry,
    gmm_asymptotic_variance,
    gmm_correlation_variance,
    gmm_log_rate_variance,
    minmax_moments,
    minmax_moments_unit_scale,
    mixing_moments,
    mixing_survival,
    single_pair_mean,
    single_pair_mean_unit_scale,
    student_mixing_moments,
    tail_ratio,
    variance_ingredients,
    variance_ingredients_unit_scale,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateInputError",
    "EllipticalModel",
    "Experiment",
    "ExperimentConfig",
    "FUNCTIONALS",
    "FunctionalMoments",
    "Gaussian",
    "GeometryParams",
    "GmmLabError",
    "InputError",
    "MixingMatrix",
    "MixingMoments",
    "PairedSample",
    "RegimeError",
    "RngState",
    "SignedDecomposition",
    "SimCell",
    "SimResult",
    "StudentT",
    "UnitT",
    "Welford",
    "asymptotic_limit",
    "asymptotic_limit_unit_scale",
    "correlation_from_gmm",
    "cosine",
    "cosine_correlation_variance",
    "decompose",
    "geometry",
    "gmm",
    "gmm_asymptotic_variance",
    "gmm_correlation_variance",
    "gmm_log_rate_variance",
    "minmax_moments",
    "minmax_moments_unit_scale",
    "mixing_moments",
    "mixing_survival",
    "quadrature_moment",
    "run_experiment",
    "run_g1_check",
    "run_mean_std",
    "run_mse_compare",
    "run_var_check",
    "sample_mixing",
    "sample_pair",
    "sample_uniform_angle",
    "single_pair_mean",
    "single_pair_mean_unit_scale",
    "student_mixing_moments",
    "tail_ratio",
    "variance_ingredients",
    "variance_ingredients_unit_scale",
    "welford_accumulate",
]
