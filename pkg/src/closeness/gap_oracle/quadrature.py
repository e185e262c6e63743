"""Expectations of absolute values through characteristic functions.

For any real random variable with a finite mean,

    E|X| = (2/pi) * int_0^inf (1 - Re E[e^{itX}]) / t^2 dt,

and for independent ``X, X' ~ u`` and ``Y, Y' ~ v`` the four-term gap is

    Delta = (2/pi) * int_0^inf |u(t) - v(t)|^2 / t^2 dt.

Integer-valued variables have 2*pi-periodic characteristic functions, so the
half-line integral folds onto one period::

    int_0^inf f(t)/t^2 dt = int_0^{2 pi} f(t) K(t) dt,
    K(t) = sum_{j >= 0} (t + 2 pi j)^{-2}.

``K`` is summed for the first ``fold_terms`` shifts and the remainder is
closed with an Euler-Maclaurin tail. The ``j = 0`` term carries the
removable ``t -> 0`` singularity; ``f(t)/t^2`` is evaluated at ``t_floor``
below that point (its leading series term).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from closeness.errors import DomainError, QuadratureError

TWO_PI = 2.0 * math.pi
SERIES_CUTOFF = 1e-6


class PanelRule(enum.Enum):
    ADAPTIVE_SIMPSON = "adaptive-simpson"
    GAUSS_KRONROD = "gauss-kronrod"


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tolerance: float = 1e-8
    fold_terms: int = 64
    panel_rule: PanelRule = PanelRule.GAUSS_KRONROD
    max_subdivisions: int = 400

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise DomainError("abs_tolerance must be positive")
        if self.fold_terms < 1:
            raise DomainError("fold_terms must be at least 1")
        object.__setattr__(self, "panel_rule", PanelRule(self.panel_rule))


def shifted_kernel(t, fold_terms: int = 64):
    """``sum_{j >= 1} (t + 2 pi j)^{-2}`` for ``t`` in ``[0, 2 pi]``."""
    a = np.asarray(t, dtype=float) / TWO_PI
    j = np.arange(1, fold_terms)
    head = np.sum((a[..., None] + j) ** -2.0, axis=-1)
    x = a + fold_terms
    # Euler-Maclaurin remainder of sum_{j >= J} (a + j)^{-2}
    tail = 1.0 / x + 0.5 / x**2 + 1.0 / (6.0 * x**3) - 1.0 / (30.0 * x**5) + 1.0 / (42.0 * x**7)
    return (head + tail) / TWO_PI**2


def folded_kernel(t, fold_terms: int = 64):
    """``K(t) = sum_{j >= 0} (t + 2 pi j)^{-2}``, singular at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    return t**-2.0 + shifted_kernel(t, fold_terms)


def _folded_integrand(f: Callable[[float], float], fold_terms: int) -> Callable[[float], float]:
    def g(t: float) -> float:
        ts = max(t, SERIES_CUTOFF)
        ft = f(ts)
        return ft / (ts * ts) + f(t) * float(shifted_kernel(t, fold_terms))

    return g


def _adaptive_simpson(g, a: float, b: float, tol: float, max_depth: int = 30, max_panels: int = 200_000):
    """Adaptive Simpson with Richardson correction; returns ``(value, error)``.

    Panels stop splitting at ``max_depth`` (width ``(b - a) / 2**30`` by
    default) and their residual counts toward the error. This keeps rounding
    noise, such as ``1 - Re cf(t)`` cancelling near ``t = 0``, from driving the
    recursion; the call fails only if the accumulated residual exceeds ``tol``.
    """

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb, fm = g(a), g(b), g(0.5 * (a + b))
    whole = simpson(fa, fm, fb, b - a)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = []
    err_total = 0.0
    panels = 0
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = g(0.5 * (lo + mid))
        fr = g(0.5 * (mid + hi))
        left = simpson(flo, fl, fmid, mid - lo)
        right = simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - s
        panels += 1
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                err_total += abs(delta) / 15.0
            total.append(left + right + delta / 15.0)
            continue
        if panels > max_panels:
            raise QuadratureError(
                "adaptive Simpson exceeded its panel budget",
                estimate=math.fsum(total) + s,
                intervals=panels,
            )
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
    value = math.fsum(total)
    if err_total > tol:
        raise QuadratureError(
            f"adaptive Simpson hit max depth; residual error {err_total:.3g} > {tol:.3g}",
            estimate=value,
            error=err_total,
            intervals=panels,
        )
    return value, err_total


def _integrate_period(g, config: QuadratureConfig) -> float:
    # tolerance on the integral so that (2/pi) * integral meets abs_tolerance
    tol = 0.5 * math.pi * config.abs_tolerance
    if config.panel_rule is PanelRule.ADAPTIVE_SIMPSON:
        value, _ = _adaptive_simpson(g, 0.0, TWO_PI, tol)
        return value
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, err, info = quad(
            g, 0.0, TWO_PI, epsabs=tol, epsrel=0.0, limit=config.max_subdivisions, full_output=1
        )[:3]
    if err > tol:
        raise QuadratureError(
            f"Gauss-Kronrod error estimate {err:.3g} exceeds {tol:.3g} after {info['last']} subintervals",
            estimate=value,
            error=err,
            intervals=info["last"],
        )
    return value


def zolotarev_abs_mean(cf: Callable, config: QuadratureConfig | None = None) -> float:
    """``E|X|`` of an integer-valued ``X`` from its characteristic function."""
    config = config or QuadratureConfig()
    g = _folded_integrand(lambda t: 1.0 - complex(cf(t)).real, config.fold_terms)
    return 2.0 / math.pi * _integrate_period(g, config)


def zolotarev_gap(cf_u: Callable, cf_v: Callable, config: QuadratureConfig | None = None) -> float:
    """Gap ``2E|X-Y| - E|X-X'| - E|Y-Y'|`` from the characteristic functions."""
    config = config or QuadratureConfig()
    g = _folded_integrand(lambda t: abs(complex(cf_u(t)) - complex(cf_v(t))) ** 2, config.fold_terms)
    return 2.0 / math.pi * _integrate_period(g, config)
