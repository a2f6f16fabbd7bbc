"""Global-local shrinkage estimation of Poisson rates.

Hierarchical model y_i ~ Po(eta_i * lambda_i), lambda_i ~ Ga(alpha, beta/u_i)
with heavy-tailed local priors on u_i (inverse-gamma and an extremely
heavy-tailed family) whose posterior means leave large counts essentially
unshrunk while strongly shrinking small ones.  The package provides the
exact samplers, Gibbs machinery, an MCMC-free quadrature oracle for the
tail-robustness theory, diagnostics, and a simulation harness.
"""

__version__ = "0.1.0"

from .data import CountDataset, load_count_csv, synthetic_areal_dataset
from .diagnostics import ChainSummary, chain_summary, inefficiency_factor
from .distributions import (
    CrtDraw,
    GigParams,
    crt_exact_pmf,
    sample_crt,
    sample_gig,
    sample_truncated_rw_proposal,
)
from .mcmc import ChainState, HyperPriors, ModelSpec, PosteriorDraws, run_chain
from .oracle import BiasCurve, bias_curve, posterior_mean_quadrature, stabilized_bias
from .priors import (
    GlobalParams,
    PriorFamily,
    cdf_u_eh,
    log_density_u,
    marginal_posterior_lambda,
    marginal_prior_lambda,
    tail_index,
)
from .simstudy import compute_metrics, generate_scenario, run_study
from .streams import spawn_stream

__all__ = [
    "BiasCurve",
    "ChainState",
    "ChainSummary",
    "CountDataset",
    "CrtDraw",
    "GigParams",
    "GlobalParams",
    "HyperPriors",
    "ModelSpec",
    "PosteriorDraws",
    "PriorFamily",
    "bias_curve",
    "cdf_u_eh",
    "chain_summary",
    "compute_metrics",
    "crt_exact_pmf",
    "generate_scenario",
    "inefficiency_factor",
    "load_count_csv",
    "log_density_u",
    "marginal_posterior_lambda",
    "marginal_prior_lambda",
    "posterior_mean_quadrature",
    "run_chain",
    "run_study",
    "sample_crt",
    "sample_gig",
    "sample_truncated_rw_proposal",
    "spawn_stream",
    "stabilized_bias",
    "synthetic_areal_dataset",
    "tail_index",
]
