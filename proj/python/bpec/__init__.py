"""Coded caching over broadcast packet erasure channels with state feedback.

Thin python surface over the C++ core: closed-form rate/completion-time
formulas, GF(256) coding primitives, and the Monte Carlo delivery simulator.
"""

from ._core import (
    cache_rate_composed,
    completion_time,
    completion_time_no_feedback,
    consume_prob,
    gf_add,
    gf_combine,
    gf_inv,
    gf_mul,
    gf_solve,
    is_achievable,
    length_decomposition_residual,
    order1_rate_composed,
    order_rate_bound,
    phase_plan,
    simulate,
    simulate_csv,
    subfile_fractions,
    symmetric_rate,
    upgrade_prob,
    PhasePlan,
)

__all__ = [
    "cache_rate_composed",
    "completion_time",
    "completion_time_no_feedback",
    "consume_prob",
    "gf_add",
    "gf_combine",
    "gf_inv",
    "gf_mul",
    "gf_solve",
    "is_achievable",
    "length_decomposition_residual",
    "order1_rate_composed",
    "order_rate_bound",
    "phase_plan",
    "simulate",
    "simulate_csv",
    "subfile_fractions",
    "symmetric_rate",
    "upgrade_prob",
    "PhasePlan",
]
