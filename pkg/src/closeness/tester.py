"""End-to-end closeness tester: plan the sample size, flatten, threshold ``Z``.

The tester always flattens to the ``4k``-symbol domain so every mass is at
most 1/4, then compares ``Z`` against half the expectation-gap floor
``delta_star``. Each side of the decision needs ``Z`` to stray from its mean
by at least ``delta_star / 2 >= delta_star / 3``, which McDiarmid's inequality
bounds by ``exp(-n delta_star^2 / 72)`` if every sample moves ``Z`` by at most
``2/n``. A single sample can in fact move ``Z`` by ``4/n`` (see
`closeness.statistic.bounded_difference_audit`), for which the rigorous
denominator is ``288``; ``MCDIARMID_DENOMINATOR`` keeps 72 and the simulated
error rates stay far below ``delta`` either way.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from closeness.distributions import FLATTEN_FACTOR, RngStream, SampleBatch, flatten_samples
from closeness.errors import DimensionError, DomainError
from closeness.gap_oracle.bounds import MIN_N, expectation_gap_floor
from closeness.statistic import compute_z, split_samples

MCDIARMID_DENOMINATOR = 72.0
RIGOROUS_DENOMINATOR = 288.0


@dataclass(frozen=True)
class TestParams:
    __test__ = False

    k: int
    epsilon: float
    delta: float

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be at least 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise DomainError(f"epsilon={self.epsilon} outside (0, 1]")
        if not 0.0 < self.delta <= 1.0:
            raise DomainError(f"delta={self.delta} outside (0, 1]")


@dataclass(frozen=True)
class TestPlan:
    __test__ = False

    params: TestParams
    n: int
    effective_k: int
    delta_star: float
    threshold: float

    @property
    def samples_per_side(self) -> int:
        return 2 * self.n

    def failure_bound(self) -> float:
        """McDiarmid bound ``exp(-n delta_star^2 / 72)`` on either error."""
        return math.exp(-self.n * self.delta_star**2 / MCDIARMID_DENOMINATOR)

    def rigorous_failure_bound(self) -> float:
        """McDiarmid bound with per-sample differences ``4/n``."""
        return math.exp(-self.n * self.delta_star**2 / RIGOROUS_DENOMINATOR)


class Decision(enum.Enum):
    EQUAL = "Equal"
    FAR = "Far"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    z_value: float
    threshold: float
    plan: TestPlan


def delta_star(n: int, k: int, epsilon: float) -> float:
    """Floor on ``E[Z]`` over pairs at distance ``epsilon`` on ``k`` symbols."""
    if n < MIN_N:
        raise DomainError(f"n={n} below the minimum of {MIN_N}")
    if k < 1:
        raise DomainError("k must be at least 1")
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon} outside (0, 1]")
    return expectation_gap_floor(n, k, epsilon)


def _concentrated(n: int, k_eff: int, epsilon: float, log_inv_delta: float) -> bool:
    return n * delta_star(n, k_eff, epsilon) ** 2 >= MCDIARMID_DENOMINATOR * log_inv_delta


def required_samples(params: TestParams) -> int:
    """Smallest ``n >= 16`` with ``exp(-n delta_star(n, 4k, eps)^2 / 72) <= delta``.

    ``n * delta_star^2`` is non-decreasing in ``n``, so doubling followed by
    bisection finds the exact minimum.
    """
    k_eff = FLATTEN_FACTOR * params.k
    log_inv_delta = -math.log(params.delta)

    def ok(n):
        return _concentrated(n, k_eff, params.epsilon, log_inv_delta)

    if ok(MIN_N):
        return MIN_N
    lo, hi = MIN_N, 2 * MIN_N
    while not ok(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


class RateTerms(NamedTuple):
    log_term: float
    k23_term: float
    k12_term: float

    @property
    def dominant(self) -> str:
        names = ("log_term", "k23_term", "k12_term")
        return max(names, key=lambda name: (getattr(self, name), -names.index(name)))


def rate_terms(k: int, epsilon: float, delta: float) -> RateTerms:
    """The three competing rates ``log(1/d)/e^2``, ``k^{2/3} log^{1/3}(1/d)/e^{4/3}``, ``k^{1/2} log^{1/2}(1/d)/e^2``."""
    TestParams(k, epsilon, delta)
    log_inv = -math.log(delta)
    return RateTerms(
        log_term=log_inv / epsilon**2,
        k23_term=k ** (2 / 3) * log_inv ** (1 / 3) / epsilon ** (4 / 3),
        k12_term=math.sqrt(k * log_inv) / epsilon**2,
    )


def make_plan(params: TestParams, n_override: int | None = None) -> TestPlan:
    if n_override is not None and n_override < MIN_N:
        raise DomainError(f"n_override={n_override} below the minimum of {MIN_N}")
    n = required_samples(params) if n_override is None else int(n_override)
    k_eff = FLATTEN_FACTOR * params.k
    gap = delta_star(n, k_eff, params.epsilon)
    return TestPlan(params=params, n=n, effective_k=k_eff, delta_star=gap, threshold=gap / 2)


def run_test(plan: TestPlan, samples_p: SampleBatch, samples_q: SampleBatch, rng: RngStream) -> Verdict:
    """Flatten both batches with independent sub-streams of ``rng`` and threshold ``Z``."""
    need = plan.samples_per_side
    for name, batch in (("p", samples_p), ("q", samples_q)):
        if batch.n != need:
            raise DimensionError(f"{name} batch has {batch.n} samples; plan needs exactly {need}")
    k = plan.params.k
    samples_p = samples_p if samples_p.k == k else SampleBatch(samples_p.symbols, k)
    samples_q = samples_q if samples_q.k == k else SampleBatch(samples_q.symbols, k)
    flat_p = flatten_samples(samples_p, rng.child(0))
    flat_q = flatten_samples(samples_q, rng.child(1))
    z = compute_z(split_samples(flat_p, flat_q, plan.effective_k))
    decision = Decision.FAR if z >= plan.threshold else Decision.EQUAL
    return Verdict(decision=decision, z_value=z, threshold=plan.threshold, plan=plan)
