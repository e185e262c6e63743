"""Two-sample closeness testing with an exact expectation-gap oracle."""

from closeness.distributions import (
    DiscreteDistribution,
    RngStream,
    SampleBatch,
    flatten_distribution,
    flatten_samples,
    sample_binomial,
    sample_categorical,
    sample_poisson,
    tv_distance,
)
from closeness.errors import (
    ClosenessError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    QuadratureError,
    SymbolRangeError,
)
from closeness.statistic import (
    Batch,
    CountTable,
    FourWaySplit,
    bounded_difference_audit,
    compute_z,
    histogram,
    split_samples,
)
from closeness.tester import (
    Decision,
    TestParams,
    TestPlan,
    Verdict,
    delta_star,
    make_plan,
    required_samples,
    run_test,
    rate_terms,
)

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "ClosenessError",
    "CountTable",
    "Decision",
    "DegenerateInputError",
    "DimensionError",
    "DiscreteDistribution",
    "DomainError",
    "FourWaySplit",
    "QuadratureError",
    "RngStream",
    "SampleBatch",
    "SymbolRangeError",
    "TestParams",
    "TestPlan",
    "Verdict",
    "bounded_difference_audit",
    "compute_z",
    "delta_star",
    "flatten_distribution",
    "flatten_samples",
    "histogram",
    "make_plan",
    "required_samples",
    "run_test",
    "sample_binomial",
    "sample_categorical",
    "sample_poisson",
    "split_samples",
    "rate_terms",
    "tv_distance",
]
