"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL summary that is printed at the end of
the pytest run (see ``conftest.pytest_terminal_summary``) and also to stdout.
"""

import math

import numpy as np
import pytest

from closeness.distributions import (
    DiscreteDistribution,
    RngStream,
    flatten_distribution,
    paired_perturbation,
    sample_categorical,
    tv_distance,
)
from closeness.gap_oracle import (
    cf_binomial,
    cf_poisson,
    claim_inequality_check,
    exact_gap_binomial,
    exact_gap_poisson,
    expectation_gap_floor,
    lower_bound_binomial,
    lower_bound_poisson,
    section4_gap_bound,
    zolotarev_gap,
)
from closeness.harness import ExperimentSpec, binomial_rate_check, poisson_means, run_experiment
from closeness.statistic import Batch, bounded_difference_audit, split_samples
from closeness.tester import TestParams, make_plan, required_samples, rate_terms

from conftest import ACCEPTANCE_LINES

PROB_GRID = [j / 100 for j in range(26)]


def report(number, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def test_1_binomial_lemma_grid():
    worst = math.inf
    points = 0
    for n in (16, 24, 32, 64, 128):
        for p in PROB_GRID:
            for q in PROB_GRID:
                margin = exact_gap_binomial(n, p, q) - lower_bound_binomial(n, p, q).value
                worst = min(worst, margin)
                points += 1
    ok = worst >= -1e-10
    assert report(1, ok, f"binomial gap >= bound on {points} points, min margin {worst:.3g} (need >= -1e-10)")


def test_2_poisson_lemma_grid():
    means = poisson_means((16, 32, 64, 128), PROB_GRID)
    worst = math.inf
    for mu in means:
        for lam in means:
            worst = min(worst, exact_gap_poisson(mu, lam) - lower_bound_poisson(mu, lam).value)
    ok = worst >= -1e-9
    assert report(2, ok, f"poisson gap >= bound on {len(means) ** 2} points, min margin {worst:.3g} (need >= -1e-9)")


def test_3_zolotarev_cross_validation():
    gen = RngStream(2024).generator()
    errors = []
    for _ in range(100):
        n = int(gen.integers(1, 129))
        p, q = gen.uniform(0, 0.25, size=2)
        z = zolotarev_gap(lambda t: cf_binomial(n, p, t), lambda t: cf_binomial(n, q, t))
        errors.append(abs(z - exact_gap_binomial(n, p, q)))
    for _ in range(100):
        mu, lam = gen.uniform(0, 32, size=2)
        z = zolotarev_gap(lambda t: cf_poisson(mu, t), lambda t: cf_poisson(lam, t))
        errors.append(abs(z - exact_gap_poisson(mu, lam)))
    worst = max(errors)
    assert report(3, worst <= 1e-6, f"200 pairs, max |zolotarev - exact| = {worst:.3g} (need <= 1e-6)")


def test_4_claim_grid():
    probs = [j / 100 for j in range(0, 26, 5)]
    lower_margin, upper_margin, bad, points = math.inf, math.inf, 0, 0
    for n in (16, 64):
        for p in probs:
            for q in probs:
                if p == q:
                    continue
                for j in range(1, 201):
                    c = claim_inequality_check(n, p, q, math.pi * j / 200)
                    points += 1
                    bad += not c.ok
                    lower_margin = min(lower_margin, c.lower_margin)
                    upper_margin = min(upper_margin, c.upper_margin)
    ok = bad == 0 and lower_margin > 0
    assert report(4, ok, f"{points} points, {bad} violations, min strict margin {lower_margin:.3g}, "
                         f"min upper margin {upper_margin:.3g}")


def test_5_assembled_gap_floor():
    gen = RngStream(77).generator()
    worst, checked = math.inf, 0
    for eps in (0.1, 0.3, 0.5):
        pairs = 0
        while pairs < 50:
            k0 = int(gen.integers(2, 6))
            p = flatten_distribution(DiscreteDistribution(gen.dirichlet(np.full(k0, 0.5))))
            q = flatten_distribution(DiscreteDistribution(gen.dirichlet(np.full(k0, 0.5))))
            if tv_distance(p, q) <= eps:
                continue
            pairs += 1
            for n in (64, 256):
                exact = math.fsum(exact_gap_binomial(n, a, b) for a, b in zip(p.probs, q.probs)) / n
                floor = section4_gap_bound(p, q, n, epsilon=eps).floor
                assert floor == expectation_gap_floor(n, p.k, eps)
                worst = min(worst, exact / floor)
                checked += 1
    assert report(5, worst >= 1.0, f"{checked} (pair, n) cases on k <= 20, min exact/floor ratio {worst:.3g} (need >= 1)")


def _error_rate_experiment(q, seed):
    params = TestParams(100, 0.5, 0.1)
    plan = make_plan(params)
    u = DiscreteDistribution.uniform(100)
    return plan, run_experiment(ExperimentSpec(u, q, plan, trials=200, seed=seed))


def test_6_null_calibration():
    plan, result = _error_rate_experiment(DiscreteDistribution.uniform(100), seed=1)
    passed, p_value = binomial_rate_check(result.far_count, result.trials, 0.1, level=0.999)
    assert report(6, passed, f"n={plan.n}, far rate {result.far_rate:.3f} over 200 trials, "
                             f"exact binomial p-value {p_value:.3g} (need >= 0.001)")


def test_7_power():
    q = paired_perturbation(100, 0.5)
    assert tv_distance(DiscreteDistribution.uniform(100), q) == pytest.approx(0.5)
    plan, result = _error_rate_experiment(q, seed=2)
    misses = result.trials - result.far_count
    passed, p_value = binomial_rate_check(misses, result.trials, 0.1, level=0.999)
    assert report(7, passed, f"n={plan.n}, equal rate {result.equal_rate:.3f} over 200 trials, "
                             f"exact binomial p-value {p_value:.3g} (need >= 0.001)")


def test_8_bounded_differences():
    gen = RngStream(8).generator()
    worst, over = 0.0, 0
    for _ in range(1000):
        k = int(gen.integers(2, 21))
        n = int(gen.integers(16, 201))
        p = DiscreteDistribution(gen.dirichlet(np.ones(k)))
        q = DiscreteDistribution(gen.dirichlet(np.ones(k)))
        split = split_samples(sample_categorical(p, 2 * n, gen), sample_categorical(q, 2 * n, gen), k)
        which = list(Batch)[int(gen.integers(4))]
        old = int(gen.choice(np.flatnonzero(split.table(which).counts))) + 1
        new = int(gen.integers(1, k + 1))
        scaled = bounded_difference_audit(split, which, old, new) * n
        worst = max(worst, scaled)
        over += scaled > 2
    ok = worst <= 2
    assert report(8, ok, f"1000 mutations, max n|dZ| = {worst:g} (need <= 2), {over} exceed 2/n; "
                         f"the true per-sample bound is 4/n")


# (k, eps, delta) bases where the dominant rate term and the active
# branch of delta_star agree; exponents are those of the dominant term
REGIMES = {
    "log_term": dict(base=(1, 0.5, 1e-3), k_exp=0.0, eps_exp=2.0, log_exp=1.0),
    "k23_term": dict(base=(10**10, 1.0, 0.5), k_exp=2 / 3, eps_exp=4 / 3, log_exp=1 / 3),
    "k12_term": dict(base=(1000, 0.125, 0.1), k_exp=0.5, eps_exp=2.0, log_exp=0.5),
}


def _active_branch(k, eps, delta):
    n = required_samples(TestParams(k, eps, delta))
    ratio = n / (4 * k)
    terms = (eps, eps**2 / 3 * ratio, eps**2 / 11 * math.sqrt(ratio))
    return n, ("log_term", "k23_term", "k12_term")[int(np.argmin(terms))]


def test_9_regime_scaling():
    lines, ok = [], True
    for name, r in REGIMES.items():
        k, eps, delta = r["base"]
        n0, branch = _active_branch(k, eps, delta)
        moves = {
            "1/eps x2": ((k, eps / 2, delta), 2 ** r["eps_exp"]),
            "k x2": ((2 * k, eps, delta), 2 ** r["k_exp"]),
            "log(1/delta) x2": ((k, eps, delta**2), 2 ** r["log_exp"]),
        }
        for label, (args, predicted) in moves.items():
            n1, branch1 = _active_branch(*args)
            dominant = {rate_terms(k, eps, delta).dominant, rate_terms(*args).dominant}
            within = abs(n1 / n0 / predicted - 1) <= 0.15
            consistent = dominant == {name} and branch == branch1 == name
            ok &= within and consistent
            lines.append(f"{name} {label}: n {n0} -> {n1}, ratio {n1 / n0:.3f} vs {predicted:.3f}")
    assert report(9, ok, "; ".join(lines))
