"""Discrete distributions over ``[k] = {1, ..., k}``, samplers and file formats.

Symbols are 1-based everywhere in the public API; arrays indexed by symbol
use position ``i - 1`` for symbol ``i``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from closeness.errors import DimensionError, DomainError, SymbolRangeError

NORMALIZATION_TOL = 1e-12
FLATTEN_FACTOR = 4


class FormatError(ValueError):
    """A distribution or sample file could not be parsed."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class RngStream:
    """Reproducible, independent random stream keyed by ``(seed, stream)``.

    Streams with distinct ``(seed, stream, path)`` keys are statistically
    independent (numpy ``SeedSequence`` spawn keys feeding a counter-based
    Philox generator). ``child(i)`` derives a sub-stream for nested tasks.
    """

    seed: int
    stream: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0 or any(i < 0 for i in self.path):
            raise DomainError("seed, stream and path entries must be non-negative")

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *self.path))
        return np.random.Generator(np.random.Philox(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """A fresh generator for an `RngStream`, or the generator itself."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Dense probability vector over ``[k]``.

    Construction renormalizes when the total mass is within
    ``NORMALIZATION_TOL`` of one and raises `DomainError` otherwise.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64).reshape(-1)
        if probs.size == 0:
            raise DomainError("distribution needs at least one symbol")
        if not np.all(np.isfinite(probs)):
            raise DomainError("probabilities must be finite")
        if np.any(probs < 0):
            raise DomainError("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        if total != 1.0:
            probs = probs / total
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def _from_valid(cls, probs: np.ndarray) -> "DiscreteDistribution":
        # skips renormalization for vectors derived exactly from a valid one
        obj = object.__new__(cls)
        probs = np.array(probs, dtype=np.float64)
        probs.setflags(write=False)
        object.__setattr__(obj, "probs", probs)
        return obj

    @classmethod
    def uniform(cls, k: int) -> "DiscreteDistribution":
        if k < 1:
            raise DomainError("k must be at least 1")
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, k: int, symbol: int) -> "DiscreteDistribution":
        if not 1 <= symbol <= k:
            raise SymbolRangeError(f"symbol {symbol} outside 1..{k}")
        probs = np.zeros(k)
        probs[symbol - 1] = 1.0
        return cls(probs)

    @property
    def k(self) -> int:
        return int(self.probs.size)

    def __len__(self):
        return self.k

    def __getitem__(self, symbol: int) -> float:
        if not 1 <= symbol <= self.k:
            raise SymbolRangeError(f"symbol {symbol} outside 1..{self.k}")
        return float(self.probs[symbol - 1])

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.k == other.k and bool(np.array_equal(self.probs, other.probs))

    __hash__ = None

    def max_mass(self) -> float:
        return float(self.probs.max())

    def __repr__(self):
        if self.k <= 8:
            body = ", ".join(f"{x:.6g}" for x in self.probs)
        else:
            body = f"k={self.k}, max={self.max_mass():.6g}"
        return f"DiscreteDistribution({body})"


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """A sequence of 1-based symbols drawn from a distribution over ``[k]``."""

    symbols: np.ndarray
    k: int

    def __post_init__(self):
        symbols = np.asarray(self.symbols)
        if symbols.size and not np.issubdtype(symbols.dtype, np.integer):
            as_int = symbols.astype(np.int64)
            if not np.array_equal(as_int, symbols):
                raise DomainError("sample symbols must be integers")
            symbols = as_int
        symbols = np.array(symbols, dtype=np.int64).reshape(-1)
        if self.k < 1:
            raise DomainError("k must be at least 1")
        if symbols.size:
            lo, hi = int(symbols.min()), int(symbols.max())
            if lo < 1 or hi > self.k:
                bad = lo if lo < 1 else hi
                raise SymbolRangeError(f"symbol {bad} outside 1..{self.k}")
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    @property
    def n(self) -> int:
        return int(self.symbols.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return self.k == other.k and bool(np.array_equal(self.symbols, other.symbols))

    __hash__ = None

    def head(self, count: int) -> "SampleBatch":
        return SampleBatch(self.symbols[:count], self.k)


def paired_perturbation(k: int, tv: float) -> DiscreteDistribution:
    """Uniform over ``[k]`` with masses ``(1 + 2 tv)/k`` and ``(1 - 2 tv)/k`` alternating.

    Its total variation distance to ``uniform(k)`` is exactly ``tv``.
    """
    if k < 2 or k % 2:
        raise DomainError("paired perturbation needs an even k >= 2")
    if not 0.0 <= tv <= 0.5:
        raise DomainError(f"tv={tv} outside [0, 1/2]")
    signs = np.tile([1.0, -1.0], k // 2)
    return DiscreteDistribution((1.0 + 2.0 * tv * signs) / k)


def tv_distance(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Total variation distance ``(1/2) * sum_i |p_i - q_i|``."""
    if p.k != q.k:
        raise DimensionError(f"domain sizes differ: {p.k} vs {q.k}")
    tv = 0.5 * math.fsum(np.abs(p.probs - q.probs))
    return min(max(tv, 0.0), 1.0)


def flatten_distribution(p: DiscreteDistribution) -> DiscreteDistribution:
    """Split every symbol ``i`` into ``4i-3, ..., 4i``, each carrying ``p_i / 4``.

    Division by 4 is exact in binary floating point, so the new masses are
    exactly a quarter of the old ones and are not renormalized.
    """
    return DiscreteDistribution._from_valid(np.repeat(p.probs / FLATTEN_FACTOR, FLATTEN_FACTOR))


def flatten_samples(batch: SampleBatch, rng: RngLike) -> SampleBatch:
    """Map each sample ``i`` independently and uniformly onto ``{4i-3, ..., 4i}``."""
    gen = as_generator(rng)
    offsets = gen.integers(0, FLATTEN_FACTOR, size=batch.n)
    symbols = FLATTEN_FACTOR * batch.symbols - (FLATTEN_FACTOR - 1) + offsets
    return SampleBatch(symbols, FLATTEN_FACTOR * batch.k)


def sample_categorical(p: DiscreteDistribution, n: int, rng: RngLike) -> SampleBatch:
    """Draw ``n`` i.i.d. symbols from ``p`` by CDF inversion."""
    if n < 0:
        raise DomainError("n must be non-negative")
    gen = as_generator(rng)
    if n == 0:
        return SampleBatch(np.empty(0, dtype=np.int64), p.k)
    cdf = np.cumsum(p.probs)
    # close the float gap below 1 at the last positive mass so that
    # zero-mass symbols are never returned
    cdf[np.flatnonzero(p.probs)[-1]:] = 1.0
    idx = np.searchsorted(cdf, gen.random(n), side="right")
    return SampleBatch(idx + 1, p.k)


def sample_binomial(n: int, p: float, rng: RngLike, size=None):
    """Exact ``Bin(n, p)`` draws (numpy's inversion/BTPE sampler)."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p} outside [0, 1]")
    out = as_generator(rng).binomial(n, p, size=size)
    return int(out) if size is None else out


def sample_poisson(lam: float, rng: RngLike, size=None):
    """Exact ``Poisson(lam)`` draws."""
    if not (math.isfinite(lam) and lam >= 0):
        raise DomainError(f"lambda={lam} must be finite and non-negative")
    out = as_generator(rng).poisson(lam, size=size)
    return int(out) if size is None else out


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield lineno, text


def read_distribution(path: str | os.PathLike) -> DiscreteDistribution:
    """Parse one probability per line; ``#`` starts a comment."""
    values = []
    for lineno, text in _data_lines(path):
        try:
            values.append(float(text))
        except ValueError:
            raise FormatError(path, lineno, f"not a number: {text!r}") from None
    if not values:
        raise FormatError(path, 0, "no probabilities found")
    return DiscreteDistribution(np.array(values))


def read_samples(path: str | os.PathLike, k: int | None = None) -> SampleBatch:
    """Parse one 1-based integer symbol per line.

    If ``k`` is omitted the domain is taken to be ``[max symbol]``.
    """
    symbols = []
    for lineno, text in _data_lines(path):
        try:
            value = int(text)
        except ValueError:
            raise FormatError(path, lineno, f"not an integer symbol: {text!r}") from None
        if value < 1 or (k is not None and value > k):
            bound = "" if k is None else f"..{k}"
            raise FormatError(path, lineno, f"symbol {value} outside 1{bound}")
        symbols.append(value)
    if k is None:
        k = max(symbols, default=1)
    return SampleBatch(np.array(symbols, dtype=np.int64), k)


def write_samples(path: str | os.PathLike, batch: SampleBatch) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {batch.n} samples over 1..{batch.k}\n")
        fh.writelines(f"{s}\n" for s in batch.symbols.tolist())


def write_distribution(path: str | os.PathLike, p: DiscreteDistribution) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# k={p.k}\n")
        fh.writelines(f"{x!r}\n" for x in p.probs.tolist())
