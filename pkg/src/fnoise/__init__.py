"""Simulation and verification toolkit for the Gumbel limit of the maximum
of Gaussian 1/f^alpha noise (alpha < 1).

The pieces mirror the pipeline: `coeffs` defines the regularly varying
weights; `synth` draws and evaluates the random trigonometric polynomial;
`maxfind` locates its global maximum; `covar` verifies the covariance
conditions behind the limit; `extremes` normalizes maxima and tests them
against the Gumbel law; `cli` fronts it all from the command line.
"""

from .coeffs import (
    CoefficientModel,
    karamata_ratio,
    model_from_kv,
    model_to_kv,
    potter_envelope,
    sigma_sq,
    weight,
    weights,
)
from .covar import (
    ConditionReport,
    CovarianceProfile,
    TailReport,
    c_limit,
    c_n,
    check_condition1,
    check_condition2,
    check_condition3,
    check_tail_bounds,
    dirichlet_kernel,
    envelope_growth,
    modification_bound,
    profile,
    rho,
    rho_table,
)
from .extremes import (
    GumbelNormalization,
    GumbelReport,
    MaxSample,
    gumbel_cdf,
    gumbel_fit,
    gumbel_quantile,
    ks_test,
    normalization,
    report,
    samples,
    threshold,
    to_z,
)
from .maxfind import MaxResult, RefinementError, global_max, global_min
from .synth import GridEvaluation, NoiseDraw, deriv_at, draw, dump_draw, eval_at, eval_grid

__version__ = "0.1.0"

__all__ = [
    "CoefficientModel",
    "ConditionReport",
    "CovarianceProfile",
    "GridEvaluation",
    "GumbelNormalization",
    "GumbelReport",
    "MaxResult",
    "MaxSample",
    "NoiseDraw",
    "RefinementError",
    "TailReport",
    "c_limit",
    "c_n",
    "check_condition1",
    "check_condition2",
    "check_condition3",
    "check_tail_bounds",
    "deriv_at",
    "dirichlet_kernel",
    "draw",
    "dump_draw",
    "envelope_growth",
    "eval_at",
    "eval_grid",
    "global_max",
    "global_min",
    "gumbel_cdf",
    "gumbel_fit",
    "gumbel_quantile",
    "karamata_ratio",
    "ks_test",
    "model_from_kv",
    "model_to_kv",
    "modification_bound",
    "normalization",
    "potter_envelope",
    "profile",
    "report",
    "rho",
    "rho_table",
    "samples",
    "sigma_sq",
    "threshold",
    "to_z",
    "weight",
    "weights",
]
