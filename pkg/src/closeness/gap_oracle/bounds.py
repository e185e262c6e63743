"""Closed-form lower bounds on the expectation gap.

Per symbol, the gap is at least a three-way minimum whose active term names
the regime:

* ``SMALL_MASS``: quadratic in the mean difference (few expected samples),
* ``LARGE_SEPARATION``: linear in the mean difference,
* ``CLT_REGIME``: quadratic, normalised by the standard deviation scale.

Ties go to the earlier regime in that order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from closeness.distributions import DiscreteDistribution, tv_distance
from closeness.errors import DimensionError, DomainError

BINOMIAL_CONSTANTS = (1 / 8, 1 / 16, 1 / 40)
POISSON_CONSTANTS = (1 / 20, 1 / 5, 1 / 7)
# weights on (|n d|, (n d)^2, (n d)^2 / sqrt(n (p+q))) in the per-symbol sum
PER_SYMBOL_CONSTANTS = (1 / 8, 1 / 16, 1 / 40)
MIN_N = 16
MAX_MASS = 0.25


class Regime(enum.Enum):
    SMALL_MASS = "SmallMass"
    LARGE_SEPARATION = "LargeSeparation"
    CLT_REGIME = "CltRegime"


_REGIMES = tuple(Regime)


@dataclass(frozen=True)
class GapBound:
    value: float
    regime: Regime
    terms: tuple[float, float, float]


def _three_way_min(terms) -> GapBound:
    terms = tuple(float(x) for x in terms)
    idx = min(range(3), key=lambda i: (terms[i], i))
    return GapBound(terms[idx], _REGIMES[idx], terms)


def _clt_term(c: float, sq: float, total: float) -> float:
    return c * sq / math.sqrt(total) if total > 0 else math.inf


def lower_bound_binomial(n: int, p: float, q: float, constants=BINOMIAL_CONSTANTS) -> GapBound:
    """``min(c1 n^2 (p-q)^2, c2 n |p-q|, c3 n^2 (p-q)^2 / sqrt(n (p+q)))``.

    Requires ``p, q in [0, 1/4]`` and ``n >= 16``; the third term is ``+inf``
    when ``p + q = 0``.
    """
    if n < MIN_N:
        raise DomainError(f"n={n} below the minimum of {MIN_N}")
    for name, value in (("p", p), ("q", q)):
        if not 0.0 <= value <= MAX_MASS:
            raise DomainError(f"{name}={value} outside [0, 1/4]")
    c1, c2, c3 = constants
    d = abs(p - q)
    sq = (n * d) ** 2
    return _three_way_min((c1 * sq, c2 * n * d, _clt_term(c3, sq, n * (p + q))))


def lower_bound_poisson(mu: float, lam: float, constants=POISSON_CONSTANTS) -> GapBound:
    """``min(c1 (mu-lam)^2, c2 |mu-lam|, c3 (mu-lam)^2 / sqrt(mu+lam))``."""
    for name, value in (("mu", mu), ("lambda", lam)):
        if not (math.isfinite(value) and value >= 0):
            raise DomainError(f"{name}={value} must be finite and non-negative")
    c1, c2, c3 = constants
    d = abs(mu - lam)
    sq = d * d
    return _three_way_min((c1 * sq, c2 * d, _clt_term(c3, sq, mu + lam)))


def expectation_gap_floor(n: int, k: int, epsilon: float) -> float:
    """``(1/12) min(eps, (eps^2/3)(n/k), (eps^2/11) sqrt(n/k))``."""
    ratio = n / k
    return min(epsilon, epsilon**2 / 3 * ratio, epsilon**2 / 11 * math.sqrt(ratio)) / 12


@dataclass(frozen=True, eq=False)
class PerSymbolBound:
    """Per-symbol lower bound on ``E[Z]`` and the closed-form floor beneath it.

    ``s1``, ``s2``, ``s3`` hold the 1-based symbols whose per-symbol minimum
    is attained by the linear, quadratic and normalised-quadratic term.
    """

    value: float
    floor: float
    epsilon: float
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray


def section4_terms(p: DiscreteDistribution, q: DiscreteDistribution, n: int, constants=PER_SYMBOL_CONSTANTS):
    """The ``k x 3`` array of weighted per-symbol terms (before the min)."""
    c1, c2, c3 = constants
    nd = n * np.abs(p.probs - q.probs)
    mass = n * (p.probs + q.probs)
    sq = nd**2
    with np.errstate(divide="ignore", invalid="ignore"):
        third = np.where(mass > 0, c3 * sq / np.sqrt(mass), np.inf)
    return np.column_stack([c1 * nd, c2 * sq, third])


def section4_gap_bound(p: DiscreteDistribution, q: DiscreteDistribution, n: int, epsilon: float | None = None,
                       constants=PER_SYMBOL_CONSTANTS) -> PerSymbolBound:
    """Lower-bound ``E[Z]`` by summing the per-symbol gap bounds over ``[k]``.

    ``floor`` evaluates `expectation_gap_floor` at ``epsilon`` (default: the
    actual total variation distance), which lower-bounds ``value`` whenever
    ``TV(p, q) >= epsilon``.
    """
    if p.k != q.k:
        raise DimensionError(f"domain sizes differ: {p.k} vs {q.k}")
    if n < MIN_N:
        raise DomainError(f"n={n} below the minimum of {MIN_N}")
    if max(p.max_mass(), q.max_mass()) > MAX_MASS:
        raise DomainError("every probability must be at most 1/4 (flatten first)")
    if epsilon is None:
        epsilon = tv_distance(p, q)
    elif not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon={epsilon} outside (0, 1]")
    terms = section4_terms(p, q, n, constants)
    which = np.argmin(terms, axis=1)
    per_symbol = terms[np.arange(p.k), which]
    symbols = np.arange(1, p.k + 1)
    return PerSymbolBound(
        value=math.fsum(per_symbol) / n,
        floor=expectation_gap_floor(n, p.k, epsilon) if epsilon > 0 else 0.0,
        epsilon=epsilon,
        s1=symbols[which == 0],
        s2=symbols[which == 1],
        s3=symbols[which == 2],
    )
