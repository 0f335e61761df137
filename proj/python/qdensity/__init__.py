"""Exact densities of congruences in the cumulative valuation functions.

The heavy lifting lives in the compiled extension; this package re-exports
its operations. Densities come back as ``fractions.Fraction``.
"""

from ._qdensity import (
    StateBudgetError,
    ValuationStream,
    __version__,
    apply_shift,
    chain_dot,
    chain_json,
    check_block_identities,
    check_recurrence,
    class_exponents,
    closed_form,
    digit_sum,
    empirical_density,
    euler_phi,
    evaluate_form,
    exact_density,
    existence_guaranteed,
    gamma,
    gamma_parallel,
    is_q_additive_sample,
    iterate_density,
    liminf_bound,
    polya_report,
    shift_matrix,
    u,
    valuation,
    w,
)

__all__ = [
    "StateBudgetError",
    "ValuationStream",
    "__version__",
    "apply_shift",
    "chain_dot",
    "chain_json",
    "check_block_identities",
    "check_recurrence",
    "class_exponents",
    "closed_form",
    "digit_sum",
    "empirical_density",
    "euler_phi",
    "evaluate_form",
    "exact_density",
    "existence_guaranteed",
    "gamma",
    "gamma_parallel",
    "is_q_additive_sample",
    "iterate_density",
    "liminf_bound",
    "polya_report",
    "shift_matrix",
    "u",
    "valuation",
    "w",
]
