"""Characteristic functions of lattice laws and the binomial polar form."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from closeness.errors import DomainError

MAX_POLAR_P = 0.25


def _check_probability(p):
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p} outside [0, 1]")


def cf_binomial(n: int, p: float, t):
    """``E[exp(itX)]`` for ``X ~ Bin(n, p)``, i.e. ``(1 - p + p e^{it})^n``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    _check_probability(p)
    return (1.0 - p + p * np.exp(1j * np.asarray(t, dtype=float))) ** n


def cf_poisson(lam: float, t):
    """``E[exp(itX)]`` for ``X ~ Poisson(lam)``, i.e. ``exp(lam (e^{it} - 1))``."""
    if not (math.isfinite(lam) and lam >= 0):
        raise DomainError(f"lambda={lam} must be finite and non-negative")
    return np.exp(lam * (np.exp(1j * np.asarray(t, dtype=float)) - 1.0))


def binomial_modulus(p, t):
    """``|1 - p + p e^{it}|`` computed from the real/imaginary split.

    Vectorized and unrestricted in ``p``; `cf_polar_binomial` adds the range
    checks.
    """
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.sqrt((1.0 - p * (1.0 - np.cos(t))) ** 2 + (p * np.sin(t)) ** 2)


def binomial_argument(p, t):
    """Argument of ``1 - p + p e^{it}`` as ``arcsin(p sin t / r(t))``.

    Valid while the real part stays positive, which holds for ``p <= 1/2``.
    """
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.arcsin(p * np.sin(t) / binomial_modulus(p, t))


@dataclass(frozen=True)
class CfPolar:
    modulus: float
    argument: float

    def to_complex(self) -> complex:
        return complex(self.modulus * math.cos(self.argument), self.modulus * math.sin(self.argument))


def cf_polar_binomial(p: float, t: float) -> CfPolar:
    """Polar form ``r(t) e^{i theta(t)}`` of ``1 - p + p e^{it}``.

    Restricted to ``p in [0, 1/4]`` and ``t in [0, pi]``, where the
    arcsine ratio stays in ``[0, 1/2]``.
    """
    if not 0.0 <= p <= MAX_POLAR_P:
        raise DomainError(f"p={p} outside [0, 1/4]")
    if not 0.0 <= t <= math.pi:
        raise DomainError(f"t={t} outside [0, pi]")
    return CfPolar(float(binomial_modulus(p, t)), float(binomial_argument(p, t)))
