"""Monte Carlo experiments and batch verification grids.

Trial ``i`` of an experiment draws everything from ``RngStream(seed, i)``,
and aggregation only uses counts and exactly rounded sums, so results are
independent of thread count and scheduling order.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from closeness.distributions import (
    DiscreteDistribution,
    RngStream,
    sample_categorical,
)
from closeness.errors import DimensionError, DomainError
from closeness.gap_oracle import checks as ineq
from closeness.gap_oracle.bounds import (
    BINOMIAL_CONSTANTS,
    POISSON_CONSTANTS,
    lower_bound_binomial,
    lower_bound_poisson,
)
from closeness.gap_oracle.cf import cf_binomial, cf_poisson
from closeness.gap_oracle.exact import exact_gap_binomial, exact_gap_poisson
from closeness.gap_oracle.quadrature import QuadratureConfig, zolotarev_gap
from closeness.tester import Decision, TestPlan, run_test

NUMBER_FORMAT = ".12g"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), NUMBER_FORMAT)
    return "" if x is None else str(x)


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExperimentSpec:
    p: DiscreteDistribution
    q: DiscreteDistribution
    plan: TestPlan
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        k = self.plan.params.k
        if self.p.k != k or self.q.k != k:
            raise DimensionError(f"p and q must live on the plan's {k} symbols (got {self.p.k}, {self.q.k})")


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    trials: int
    far_count: int
    z_mean: float
    z_stddev: float
    wall_time: float
    z_values: np.ndarray | None = None
    far: np.ndarray | None = None

    @property
    def far_rate(self) -> float:
        return self.far_count / self.trials

    @property
    def equal_rate(self) -> float:
        return 1.0 - self.far_rate

    @property
    def z_stderr(self) -> float:
        return self.z_stddev / math.sqrt(self.trials)

    def same_statistics(self, other: "ExperimentResult") -> bool:
        """Equality of every reported statistic (wall time excluded)."""
        same = (self.trials, self.far_count, self.z_mean, self.z_stddev) == (
            other.trials, other.far_count, other.z_mean, other.z_stddev)
        if self.z_values is not None and other.z_values is not None:
            same = same and bool(np.array_equal(self.z_values, other.z_values))
        return same


def run_trial(spec: ExperimentSpec, index: int) -> tuple[float, bool]:
    stream = RngStream(spec.seed, index)
    n2 = spec.plan.samples_per_side
    samples_p = sample_categorical(spec.p, n2, stream.child(0))
    samples_q = sample_categorical(spec.q, n2, stream.child(1))
    verdict = run_test(spec.plan, samples_p, samples_q, stream.child(2))
    return verdict.z_value, verdict.decision is Decision.FAR


def _moments(z: np.ndarray) -> tuple[float, float]:
    mean = math.fsum(z) / z.size
    if z.size < 2:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((z - mean) ** 2) / (z.size - 1))


def run_experiment(spec: ExperimentSpec, threads: int | None = None, keep_values: bool = True) -> ExperimentResult:
    threads = threads or default_threads()
    start = time.perf_counter()
    z = np.empty(spec.trials)
    far = np.empty(spec.trials, dtype=bool)
    if threads == 1:
        outcomes = map(lambda i: run_trial(spec, i), range(spec.trials))
        for i, (zi, fi) in enumerate(outcomes):
            z[i], far[i] = zi, fi
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, (zi, fi) in enumerate(pool.map(lambda i: run_trial(spec, i), range(spec.trials))):
                z[i], far[i] = zi, fi
    mean, std = _moments(z)
    return ExperimentResult(
        trials=spec.trials,
        far_count=int(far.sum()),
        z_mean=mean,
        z_stddev=std,
        wall_time=time.perf_counter() - start,
        z_values=z if keep_values else None,
        far=far if keep_values else None,
    )


def binomial_rate_check(count: int, trials: int, rate: float, level: float = 0.999) -> tuple[bool, float]:
    """One-sided exact test of ``H0: true rate <= rate`` from ``count`` events.

    Returns ``(passed, p_value)``; the check fails only when the p-value of
    seeing ``count`` or more events drops below ``1 - level``.
    """
    p_value = float(stats.binom.sf(count - 1, trials, rate)) if count > 0 else 1.0
    return p_value >= 1.0 - level, p_value


@dataclass(frozen=True, eq=False)
class ConcentrationProfile:
    counts: np.ndarray
    edges: np.ndarray
    z_mean: float
    z_stderr: float
    deviation: float
    tail_probability: float
    tail_stderr: float
    mcdiarmid_bound: float
    result: ExperimentResult


def concentration_profile(spec: ExperimentSpec, bins: int = 40, threads: int | None = None) -> ConcentrationProfile:
    """Histogram of ``Z`` and the empirical ``P[|Z - mean| > delta_star/3]``."""
    result = run_experiment(spec, threads=threads)
    z = result.z_values
    deviation = spec.plan.delta_star / 3
    tail = float(np.mean(np.abs(z - result.z_mean) > deviation))
    counts, edges = np.histogram(z, bins=bins)
    return ConcentrationProfile(
        counts=counts,
        edges=edges,
        z_mean=result.z_mean,
        z_stderr=result.z_stderr,
        deviation=deviation,
        tail_probability=tail,
        tail_stderr=math.sqrt(max(tail * (1 - tail), 1.0 / spec.trials) / spec.trials),
        mcdiarmid_bound=spec.plan.failure_bound(),
        result=result,
    )


def write_trials_csv(path, result: ExperimentResult) -> None:
    if result.z_values is None:
        raise ValueError("experiment was run without keep_values")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "z", "decision"])
        for i, (z, far) in enumerate(zip(result.z_values, result.far)):
            w.writerow([i, fmt(z), (Decision.FAR if far else Decision.EQUAL).value])


# --------------------------------------------------------------------------
# verification grids
# --------------------------------------------------------------------------

GRID_CHECKS = ("lemma_binomial", "lemma_poisson", "zolotarev", "claim", "modulus", "arcsin_range",
               "monotonicity", "csum")


def _percent_grid(hi: int, step: int = 1) -> tuple[float, ...]:
    return tuple(j / 100 for j in range(0, hi + 1, step))


@dataclass(frozen=True)
class GridConfig:
    checks: tuple[str, ...] = GRID_CHECKS
    binomial_ns: tuple[int, ...] = (16, 24, 32, 64, 128)
    probs: tuple[float, ...] = _percent_grid(25)
    poisson_ns: tuple[int, ...] = (16, 32, 64, 128)
    binomial_constants: tuple[float, float, float] = BINOMIAL_CONSTANTS
    poisson_constants: tuple[float, float, float] = POISSON_CONSTANTS
    binomial_margin: float = -1e-10
    poisson_margin: float = -1e-9
    zolotarev_pairs: int = 100
    zolotarev_max_n: int = 128
    zolotarev_max_mean: float = 32.0
    zolotarev_tolerance: float = 1e-6
    zolotarev_seed: int = 0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    claim_ns: tuple[int, ...] = (16, 64)
    claim_probs: tuple[float, ...] = _percent_grid(25, 5)
    claim_t_steps: int = 200
    claim_slope: float = ineq.CLAIM_SLOPE
    modulus_floor: float = 0.5
    fact_probs: tuple[float, ...] = _percent_grid(25)
    monotonicity_probs: tuple[float, ...] = _percent_grid(50)
    fact_t_steps: int = 200
    csum_vectors: int = 1000
    csum_seed: int = 0

    def __post_init__(self):
        unknown = set(self.checks) - set(GRID_CHECKS)
        if unknown:
            raise DomainError(f"unknown grid checks: {sorted(unknown)}")


@dataclass(frozen=True)
class GridRow:
    check: str
    index: int
    inputs: dict
    lhs: float
    rhs: float
    margin: float
    ok: bool


@dataclass
class GridReport:
    rows: list[GridRow]

    @property
    def violations(self) -> list[GridRow]:
        return [r for r in self.rows if not r.ok]

    def count(self, check: str) -> int:
        return sum(1 for r in self.rows if r.check == check)

    def summary(self) -> dict[str, tuple[int, int, float]]:
        """``check -> (rows, violations, smallest margin)``."""
        out = {}
        for r in self.rows:
            n, v, m = out.get(r.check, (0, 0, math.inf))
            out[r.check] = (n + 1, v + (not r.ok), min(m, r.margin))
        return out


def poisson_means(ns, probs) -> tuple[float, ...]:
    return tuple(sorted({round(n * p, 12) for n in ns for p in probs}))


def _grid_lemma_binomial(cfg: GridConfig):
    for n in cfg.binomial_ns:
        for p in cfg.probs:
            for q in cfg.probs:
                exact = exact_gap_binomial(n, p, q)
                bound = lower_bound_binomial(n, p, q, cfg.binomial_constants)
                margin = exact - bound.value
                yield {"n": n, "p": p, "q": q, "regime": bound.regime.value}, exact, bound.value, margin, \
                    margin >= cfg.binomial_margin


def _grid_lemma_poisson(cfg: GridConfig):
    means = poisson_means(cfg.poisson_ns, cfg.probs)
    for mu in means:
        for lam in means:
            exact = exact_gap_poisson(mu, lam)
            bound = lower_bound_poisson(mu, lam, cfg.poisson_constants)
            margin = exact - bound.value
            yield {"mu": mu, "lambda": lam, "regime": bound.regime.value}, exact, bound.value, margin, \
                margin >= cfg.poisson_margin


def zolotarev_cases(cfg: GridConfig):
    """Random binomial then Poisson parameter pairs, fixed by ``zolotarev_seed``."""
    rng = np.random.default_rng(cfg.zolotarev_seed)
    cases = []
    for _ in range(cfg.zolotarev_pairs):
        n = int(rng.integers(1, cfg.zolotarev_max_n + 1))
        p, q = (float(x) for x in rng.uniform(0.0, 0.25, size=2))
        cases.append(("binomial", {"n": n, "p": p, "q": q}))
    for _ in range(cfg.zolotarev_pairs):
        mu, lam = (float(x) for x in rng.uniform(0.0, cfg.zolotarev_max_mean, size=2))
        cases.append(("poisson", {"mu": mu, "lambda": lam}))
    return cases


def _grid_zolotarev(cfg: GridConfig):
    for family, prm in zolotarev_cases(cfg):
        if family == "binomial":
            n, p, q = prm["n"], prm["p"], prm["q"]
            exact = exact_gap_binomial(n, p, q)
            z = zolotarev_gap(lambda t: cf_binomial(n, p, t), lambda t: cf_binomial(n, q, t), cfg.quadrature)
        else:
            mu, lam = prm["mu"], prm["lambda"]
            exact = exact_gap_poisson(mu, lam)
            z = zolotarev_gap(lambda t: cf_poisson(mu, t), lambda t: cf_poisson(lam, t), cfg.quadrature)
        err = abs(z - exact)
        yield {"family": family, **prm}, z, exact, cfg.zolotarev_tolerance - err, err <= cfg.zolotarev_tolerance


def _grid_claim(cfg: GridConfig):
    for n in cfg.claim_ns:
        for p in cfg.claim_probs:
            for q in cfg.claim_probs:
                if p == q:
                    continue
                for j in range(1, cfg.claim_t_steps + 1):
                    t = math.pi * j / cfg.claim_t_steps
                    c = ineq.claim_inequality_check(n, p, q, t, cfg.claim_slope)
                    yield {"n": n, "p": p, "q": q, "t": t}, c.lhs, c.lower, \
                        min(c.lower_margin, c.upper_margin), c.ok


def _t_grid(steps: int) -> np.ndarray:
    return np.pi * np.arange(steps + 1) / steps


def _grid_modulus(cfg: GridConfig):
    for p in cfg.fact_probs:
        for t in _t_grid(cfg.fact_t_steps):
            margin = float(ineq.modulus_margin(p, t, cfg.modulus_floor))
            yield {"p": p, "t": float(t)}, margin + cfg.modulus_floor, cfg.modulus_floor, margin, margin >= 0


def _grid_arcsin_range(cfg: GridConfig):
    for p in cfg.fact_probs:
        for t in _t_grid(cfg.fact_t_steps):
            ratio = float(ineq.arcsin_ratio(p, t))
            margin = min(ratio, 0.5 - ratio)
            yield {"p": p, "t": float(t)}, ratio, 0.5, margin, margin >= 0


def _grid_monotonicity(cfg: GridConfig):
    for t in _t_grid(cfg.fact_t_steps)[1:-1]:
        v = ineq.monotonicity_violations(float(t), cfg.monotonicity_probs)
        bad = v["p_sin_t"] + v["modulus"]
        yield {"t": float(t)}, float(bad), 0.0, -float(bad), bad == 0


def _grid_csum(cfg: GridConfig):
    rng = np.random.default_rng(cfg.csum_seed)
    for _ in range(cfg.csum_vectors):
        size = int(rng.integers(1, 20))
        a = rng.normal(size=size)
        b = rng.uniform(0.01, 5.0, size=size)
        lhs = math.fsum(a * a / b)
        rhs = math.fsum(np.abs(a)) ** 2 / math.fsum(b)
        yield {"size": size}, lhs, rhs, lhs - rhs, ineq.csum_inequality_check(a, b)


_GRID_RUNNERS = {
    "lemma_binomial": _grid_lemma_binomial,
    "lemma_poisson": _grid_lemma_poisson,
    "zolotarev": _grid_zolotarev,
    "claim": _grid_claim,
    "modulus": _grid_modulus,
    "arcsin_range": _grid_arcsin_range,
    "monotonicity": _grid_monotonicity,
    "csum": _grid_csum,
}


def verify_grids(config: GridConfig | None = None) -> GridReport:
    """Run every configured grid; violations are reported as rows, never raised."""
    config = config or GridConfig()
    rows = []
    for name in GRID_CHECKS:
        if name not in config.checks:
            continue
        for index, (inputs, lhs, rhs, margin, ok) in enumerate(_GRID_RUNNERS[name](config)):
            rows.append(GridRow(name, index, inputs, float(lhs), float(rhs), float(margin), bool(ok)))
    return GridReport(rows)


GRID_INPUT_COLUMNS = ("family", "n", "p", "q", "t", "mu", "lambda", "size", "regime")


def write_grid_csv(path, report: GridReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "index", *GRID_INPUT_COLUMNS, "lhs", "rhs", "margin", "ok"])
        for r in report.rows:
            w.writerow([r.check, r.index, *(fmt(r.inputs.get(c)) for c in GRID_INPUT_COLUMNS),
                        fmt(r.lhs), fmt(r.rhs), fmt(r.margin), fmt(r.ok)])
