"""Pointwise checkers for the technical inequalities behind the gap bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from closeness.errors import DimensionError, DomainError
from closeness.gap_oracle.cf import MAX_POLAR_P, binomial_argument, binomial_modulus, cf_polar_binomial

CLAIM_SLOPE = 14.0


@dataclass(frozen=True)
class ClaimCheck:
    lhs: float
    lower: float
    upper: float
    ok: bool

    @property
    def lower_margin(self) -> float:
        return self.lhs - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.lhs


def claim_inequality_check(n: int, p: float, q: float, t: float, slope: float = CLAIM_SLOPE) -> ClaimCheck:
    """Check ``2n|p-q| sin t < 2n|theta(t) - eta(t)| <= slope * n|p-q| t``.

    ``theta`` and ``eta`` are the arguments of ``1 - p + p e^{it}`` and
    ``1 - q + q e^{it}``. At ``p == q`` all three quantities vanish and the
    strict lower inequality is relaxed to ``>=``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if not 0.0 < t <= math.pi:
        raise DomainError(f"t={t} outside (0, pi]")
    theta = cf_polar_binomial(p, t).argument
    eta = cf_polar_binomial(q, t).argument
    lhs = 2 * n * abs(theta - eta)
    lower = 2 * n * abs(p - q) * math.sin(t)
    upper = slope * n * abs(p - q) * t
    lower_ok = lhs >= lower if p == q else lhs > lower
    return ClaimCheck(lhs, lower, upper, bool(lower_ok and lhs <= upper))


def csum_inequality_check(a, b, rtol: float = 1e-12) -> bool:
    """``sum a_i^2 / b_i >= (sum |a_i|)^2 / sum b_i`` for positive ``b``.

    ``rtol`` absorbs rounding in the equality case ``a`` proportional to ``b``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    if np.any(b <= 0):
        raise DomainError("every b_i must be positive")
    lhs = math.fsum(a * a / b)
    rhs = math.fsum(np.abs(a)) ** 2 / math.fsum(b)
    return lhs >= rhs - rtol * max(1.0, abs(rhs))


def modulus_margin(p, t, floor: float = 0.5):
    """``r(t) - floor``; non-negative for ``p <= 1/4`` when ``floor = 1/2``.

    ``r(pi) = 1 - 2p`` reaches 1/2 at ``p = 1/4``, so ``floor = sqrt(2)/2``
    only holds for ``p <= (1 - sqrt(1/2)) / 2``.
    """
    return binomial_modulus(p, t) - floor


def arcsin_ratio(p, t):
    """``p sin t / r(t)``, which stays in ``[0, 1/2]`` for ``p <= 1/4``."""
    p = np.asarray(p, dtype=float)
    return p * np.sin(t) / binomial_modulus(p, t)


def monotonicity_violations(t: float, p_grid) -> dict[str, int]:
    """Count breaks of ``p sin t`` non-decreasing and ``r(t)`` decreasing in ``p``."""
    p_grid = np.sort(np.asarray(p_grid, dtype=float))
    if p_grid.size and (p_grid[0] < 0 or p_grid[-1] > 0.5):
        raise DomainError("monotonicity holds on p in [0, 1/2] only")
    ps = p_grid * math.sin(t)
    r = binomial_modulus(p_grid, t)
    return {
        "p_sin_t": int(np.sum(np.diff(ps) < 0)),
        "modulus": int(np.sum(np.diff(r) >= 0)),
    }


def polar_consistency_error(p: float, t: float) -> float:
    """``|r e^{i theta} - (1 - p + p e^{it})|``."""
    if not 0.0 <= p <= MAX_POLAR_P:
        raise DomainError(f"p={p} outside [0, 1/4]")
    z = complex(binomial_modulus(p, t) * np.exp(1j * binomial_argument(p, t)))
    return abs(z - (1 - p + p * complex(math.cos(t), math.sin(t))))
