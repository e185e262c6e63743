"""Exact and characteristic-function computation of the expectation gap,
closed-form lower bounds, and checkers for the supporting inequalities."""

from closeness.gap_oracle.bounds import (
    BINOMIAL_CONSTANTS,
    POISSON_CONSTANTS,
    PER_SYMBOL_CONSTANTS,
    GapBound,
    Regime,
    PerSymbolBound,
    expectation_gap_floor,
    lower_bound_binomial,
    lower_bound_poisson,
    section4_gap_bound,
)
from closeness.gap_oracle.cf import CfPolar, cf_binomial, cf_poisson, cf_polar_binomial
from closeness.gap_oracle.checks import ClaimCheck, claim_inequality_check, csum_inequality_check
from closeness.gap_oracle.exact import (
    binomial_pmf,
    exact_gap_binomial,
    exact_gap_poisson,
    expected_abs_difference,
    poisson_cutoff,
    poisson_pmf,
)
from closeness.gap_oracle.quadrature import (
    PanelRule,
    QuadratureConfig,
    folded_kernel,
    zolotarev_abs_mean,
    zolotarev_gap,
)

__all__ = [
    "BINOMIAL_CONSTANTS",
    "POISSON_CONSTANTS",
    "PER_SYMBOL_CONSTANTS",
    "CfPolar",
    "ClaimCheck",
    "GapBound",
    "PanelRule",
    "QuadratureConfig",
    "Regime",
    "PerSymbolBound",
    "binomial_pmf",
    "cf_binomial",
    "cf_poisson",
    "cf_polar_binomial",
    "claim_inequality_check",
    "csum_inequality_check",
    "exact_gap_binomial",
    "exact_gap_poisson",
    "expectation_gap_floor",
    "expected_abs_difference",
    "folded_kernel",
    "lower_bound_binomial",
    "lower_bound_poisson",
    "poisson_cutoff",
    "poisson_pmf",
    "section4_gap_bound",
    "zolotarev_abs_mean",
    "zolotarev_gap",
]
