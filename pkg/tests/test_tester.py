import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from closeness.distributions import DiscreteDistribution, RngStream, SampleBatch, sample_categorical
from closeness.errors import DimensionError, DomainError
from closeness.statistic import compute_z, split_samples
from closeness.tester import (
    Decision,
    TestParams,
    delta_star,
    make_plan,
    required_samples,
    run_test,
    rate_terms,
)


def concentrated(n, k, eps, delta):
    return math.exp(-n * delta_star(n, 4 * k, eps) ** 2 / 72) <= delta


class TestDeltaStar:
    def test_hand_value(self):
        assert delta_star(900, 400, 0.3) == pytest.approx(0.0010227, abs=5e-8)

    def test_large_sample_limit(self):
        assert delta_star(10**15, 4, 0.5) == pytest.approx(0.5 / 12)

    @pytest.mark.parametrize("n,k,eps", [(15, 4, 0.5), (16, 0, 0.5), (16, 4, 0.0), (16, 4, 1.5)])
    def test_domain(self, n, k, eps):
        with pytest.raises(DomainError):
            delta_star(n, k, eps)

    @given(st.integers(16, 10**6), st.integers(1, 1000), st.floats(0.01, 1.0))
    def test_n_delta_star_squared_is_monotone(self, n, k, eps):
        assert (n + 1) * delta_star(n + 1, k, eps) ** 2 >= n * delta_star(n, k, eps) ** 2


class TestRequiredSamples:
    def test_small_instance(self):
        # delta_star saturates at eps/12 here, so n = ceil(72 * 144 * ln 2)
        n = required_samples(TestParams(1, 1.0, 0.5))
        assert n == math.ceil(72 * 144 * math.log(2)) == 7187
        assert concentrated(n, 1, 1.0, 0.5)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 500), st.floats(0.05, 1.0), st.floats(1e-6, 0.9))
    def test_is_minimal(self, k, eps, delta):
        n = required_samples(TestParams(k, eps, delta))
        assert concentrated(n, k, eps, delta)
        if n > 16:
            assert not concentrated(n - 1, k, eps, delta)

    @pytest.mark.parametrize("k,eps,delta", [(10, 0.5, 0.1), (100, 0.3, 0.01), (1000, 0.1, 0.2)])
    def test_monotone(self, k, eps, delta):
        base = required_samples(TestParams(k, eps, delta))
        assert required_samples(TestParams(k, eps / 2, delta)) > base
        assert required_samples(TestParams(k, eps, delta / 10)) > base
        assert required_samples(TestParams(2 * k, eps, delta)) >= base

    def test_monotone_on_grid(self):
        ks, epss, deltas = (5, 50, 500), (0.1, 0.3, 0.9), (0.01, 0.1, 0.5)
        n = np.array([[[required_samples(TestParams(k, e, d)) for d in deltas] for e in epss] for k in ks])
        assert np.all(np.diff(n, axis=0) >= 0)
        assert np.all(np.diff(n, axis=1) <= 0)
        assert np.all(np.diff(n, axis=2) <= 0)

    def test_params_validation(self):
        for args in [(0, 0.5, 0.1), (10, 0.0, 0.1), (10, 0.5, 0.0), (10, 0.5, 1.5)]:
            with pytest.raises(DomainError):
                TestParams(*args)


class TestRateTerms:
    def test_k_two_thirds_branch(self):
        assert rate_terms(10**6, 0.5, 0.5).dominant == "k23_term"

    def test_small_k_large_delta(self):
        # log(1/delta) = 0.69 < k = 10, so the sqrt(k) branch wins
        terms = rate_terms(10, 0.01, 0.5)
        assert terms.dominant == "k12_term"
        assert terms.log_term == pytest.approx(math.log(2) / 1e-4)

    def test_log_branch(self):
        assert rate_terms(10, 0.01, 1e-6).dominant == "log_term"


class TestPlan:
    def test_plan_satisfies_criterion(self):
        plan = make_plan(TestParams(400, 0.3, 0.1))
        assert plan.failure_bound() <= 0.1
        assert plan.effective_k == 1600
        assert plan.threshold == plan.delta_star / 2
        assert plan.samples_per_side == 2 * plan.n
        assert plan.rigorous_failure_bound() >= plan.failure_bound()

    def test_override(self):
        plan = make_plan(TestParams(10, 0.5, 0.1), n_override=64)
        assert plan.n == 64 and plan.delta_star == delta_star(64, 40, 0.5)
        with pytest.raises(DomainError):
            make_plan(TestParams(10, 0.5, 0.1), n_override=15)


class TestRunTest:
    def test_identical_batches_single_symbol(self):
        plan = make_plan(TestParams(1, 0.5, 0.1))
        batch = SampleBatch(np.ones(plan.samples_per_side, dtype=int), 1)
        assert compute_z(split_samples(batch, batch)) == 0.0
        verdict = run_test(plan, batch, batch, RngStream(0))
        assert verdict.decision is Decision.EQUAL
        assert verdict.threshold == plan.threshold

    def test_disjoint_supports_are_far(self):
        plan = make_plan(TestParams(10, 0.5, 0.1))
        p, q = DiscreteDistribution.point_mass(10, 1), DiscreteDistribution.point_mass(10, 2)
        stream = RngStream(1)
        sp = sample_categorical(p, plan.samples_per_side, stream.child(0))
        sq = sample_categorical(q, plan.samples_per_side, stream.child(1))
        verdict = run_test(plan, sp, sq, stream.child(2))
        assert verdict.decision is Decision.FAR and verdict.z_value > plan.threshold

    def test_reproducible(self):
        plan = make_plan(TestParams(20, 0.5, 0.1), n_override=200)
        u = DiscreteDistribution.uniform(20)
        sp = sample_categorical(u, 400, RngStream(2, 0))
        sq = sample_categorical(u, 400, RngStream(2, 1))
        a = run_test(plan, sp, sq, RngStream(9))
        b = run_test(plan, sp, sq, RngStream(9))
        assert a == b

    def test_size_mismatch(self):
        plan = make_plan(TestParams(5, 0.5, 0.1), n_override=16)
        good = SampleBatch(np.ones(32, dtype=int), 5)
        with pytest.raises(DimensionError):
            run_test(plan, good, good.head(30), RngStream(0))
