"""Norms on finite sections of Banach sequence spaces, with certified bounds.

The package computes scalar norms for several sequence-space families, their
Kothe duals, strong/weak/mid norms of finite vector systems, summing-type
operator norms, and projective-flavoured tensor norms.  Quantities defined by
a supremum are reported as witness-backed lower bounds; quantities defined by
an infimum as witness-backed upper bounds.  Closed-form cases are exact.
"""

__version__ = "0.1.0"

from .optim import Ball, InfeasibleSeedError, OptBudget, Witnessed
from .spaces import (
    NipReport,
    OrliczFunction,
    SpaceSpec,
    SpecValidationError,
    WeightSeq,
    c0,
    dual_norm,
    evaluate_norm,
    garling_mu,
    garling_nu,
    kothe_dual_spec,
    lorentz,
    lp,
    nip_check,
    orlicz,
    sargent_m,
    sargent_n,
)
from .vector_norms import (
    BoundProfile,
    ChainReport,
    NormOracle,
    VectorSequence,
    chain_check,
    limited_bound_profile,
    lp_oracle,
    mid_norm,
    mid_norm_functional,
    oracle_from_label,
    strong_norm,
    weak_norm,
    weak_star_norm,
)
from .summing import (
    IdealReport,
    OperatorMatrix,
    WitnessCheck,
    ideal_witness_check,
    mid_weak_witness_check,
    operator_norm,
    pi_lambda,
    pi_lambda_mid,
    rank_one_operator,
    strong_mid_witness_check,
    w_lambda_mid,
)
from .tensor import (
    Representation,
    Tensor,
    TraceReport,
    gamma_lambda,
    gamma_lambda_c,
    injective_norm,
    trace_duality_check,
)

__all__ = [
    "Ball",
    "BoundProfile",
    "ChainReport",
    "IdealReport",
    "InfeasibleSeedError",
    "NipReport",
    "NormOracle",
    "OperatorMatrix",
    "OptBudget",
    "OrliczFunction",
    "Representation",
    "SpaceSpec",
    "SpecValidationError",
    "Tensor",
    "TraceReport",
    "VectorSequence",
    "WeightSeq",
    "WitnessCheck",
    "Witnessed",
    "c0",
    "chain_check",
    "dual_norm",
    "evaluate_norm",
    "gamma_lambda",
    "gamma_lambda_c",
    "garling_mu",
    "garling_nu",
    "ideal_witness_check",
    "injective_norm",
    "kothe_dual_spec",
    "limited_bound_profile",
    "lorentz",
    "lp",
    "lp_oracle",
    "mid_norm",
    "mid_norm_functional",
    "mid_weak_witness_check",
    "nip_check",
    "operator_norm",
    "oracle_from_label",
    "orlicz",
    "pi_lambda",
    "pi_lambda_mid",
    "rank_one_operator",
    "sargent_m",
    "sargent_n",
    "strong_mid_witness_check",
    "strong_norm",
    "trace_duality_check",
    "w_lambda_mid",
    "weak_norm",
    "weak_star_norm",
]
