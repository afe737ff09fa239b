"""Locally decodable compression of Bernoulli bit strings.

Bit strings are passed as '0'/'1' text, index 0 first. The Bernoulli
parameter p may be a float or an exact "num/den" string.
"""

from ._core import (
    CapacityError,
    Container,
    DomainError,
    FormatError,
    LdscError,
    LosslessPlan,
    LossyPlan,
    PlanningError,
    best_2local_success,
    binary_entropy,
    compress,
    compress_lossy,
    error_exponent,
    kl_divergence,
    ldlsc_rate_bound,
    linear_decoder_error,
    make_lossless_plan,
    plan_lossless,
    plan_lossy,
    rate_distortion,
    succinct_rate_bound,
    verify_subspace_bounds,
)

__all__ = [
    "CapacityError",
    "Container",
    "DomainError",
    "FormatError",
    "LdscError",
    "LosslessPlan",
    "LossyPlan",
    "PlanningError",
    "best_2local_success",
    "binary_entropy",
    "compress",
    "compress_lossy",
    "error_exponent",
    "kl_divergence",
    "ldlsc_rate_bound",
    "linear_decoder_error",
    "make_lossless_plan",
    "plan_lossless",
    "plan_lossy",
    "rate_distortion",
    "succinct_rate_bound",
    "verify_subspace_bounds",
]
