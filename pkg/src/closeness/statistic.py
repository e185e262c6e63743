"""The four-table statistic ``Z`` and its bounded-difference structure.

Given count tables ``X, X'`` (from ``p``) and ``Y, Y'`` (from ``q``), each
built from ``n`` samples over ``[k]``::

    Z = (1/n) * sum_i (|X_i - Y_i| + |X'_i - Y'_i| - |X_i - X'_i| - |Y_i - Y'_i|)

``E[Z] = 0`` when ``p == q``, and ``E[Z]`` is bounded away from zero when
the distributions are far in total variation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from closeness.distributions import SampleBatch
from closeness.errors import DegenerateInputError, DimensionError, SymbolRangeError


@dataclass(frozen=True, eq=False)
class CountTable:
    """Per-symbol occurrence counts of ``n`` samples over ``[k]``."""

    counts: np.ndarray
    n: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64).reshape(-1)
        if np.any(counts < 0):
            raise DimensionError("counts must be non-negative")
        if int(counts.sum()) != self.n:
            raise DimensionError(f"counts sum to {int(counts.sum())}, expected n={self.n}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def k(self) -> int:
        return int(self.counts.size)

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.counts, other.counts))

    __hash__ = None

    def moved(self, old_symbol: int, new_symbol: int) -> "CountTable":
        """Copy with one sample relabelled from ``old_symbol`` to ``new_symbol``."""
        for s in (old_symbol, new_symbol):
            if not 1 <= s <= self.k:
                raise SymbolRangeError(f"symbol {s} outside 1..{self.k}")
        if self.counts[old_symbol - 1] == 0:
            raise SymbolRangeError(f"no sample at symbol {old_symbol} to move")
        counts = self.counts.copy()
        counts[old_symbol - 1] -= 1
        counts[new_symbol - 1] += 1
        return CountTable(counts, self.n)


class Batch(enum.Enum):
    X = "x"
    XPRIME = "xprime"
    Y = "y"
    YPRIME = "yprime"


@dataclass(frozen=True)
class FourWaySplit:
    """Count tables ``x, x'`` from ``p``'s samples and ``y, y'`` from ``q``'s."""

    x: CountTable
    xprime: CountTable
    y: CountTable
    yprime: CountTable

    def __post_init__(self):
        tables = (self.x, self.xprime, self.y, self.yprime)
        if len({t.n for t in tables}) != 1 or len({t.k for t in tables}) != 1:
            raise DimensionError("all four count tables must share n and k")

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def k(self) -> int:
        return self.x.k

    def table(self, which: Batch) -> CountTable:
        return getattr(self, Batch(which).value)

    def replace(self, which: Batch, table: CountTable) -> "FourWaySplit":
        fields = {b.value: self.table(b) for b in Batch}
        fields[Batch(which).value] = table
        return FourWaySplit(**fields)


def histogram(batch: SampleBatch, k: int) -> CountTable:
    """Count occurrences of each symbol ``1..k`` in ``batch``."""
    symbols = batch.symbols
    if symbols.size and (symbols.min() < 1 or symbols.max() > k):
        bad = int(symbols.min()) if symbols.min() < 1 else int(symbols.max())
        raise SymbolRangeError(f"symbol {bad} outside 1..{k}")
    counts = np.bincount(symbols - 1, minlength=k) if symbols.size else np.zeros(k, dtype=np.int64)
    return CountTable(counts, batch.n)


def split_samples(from_p: SampleBatch, from_q: SampleBatch, k: int | None = None) -> FourWaySplit:
    """First half of each ``2n`` batch forms ``X`` (``Y``), second half ``X'`` (``Y'``)."""
    if from_p.n % 2 or from_q.n % 2:
        raise DimensionError("sample batches must have even length 2n")
    if from_p.n != from_q.n:
        raise DimensionError(f"batch lengths differ: {from_p.n} vs {from_q.n}")
    if k is None:
        k = max(from_p.k, from_q.k)
    n = from_p.n // 2
    sp, sq = from_p.symbols, from_q.symbols
    return FourWaySplit(
        x=histogram(SampleBatch(sp[:n], k), k),
        xprime=histogram(SampleBatch(sp[n:], k), k),
        y=histogram(SampleBatch(sq[:n], k), k),
        yprime=histogram(SampleBatch(sq[n:], k), k),
    )


def z_numerator(split: FourWaySplit) -> int:
    """The integer sum ``n * Z``."""
    x, xp = split.x.counts, split.xprime.counts
    y, yp = split.y.counts, split.yprime.counts
    total = np.abs(x - y).sum() + np.abs(xp - yp).sum() - np.abs(x - xp).sum() - np.abs(y - yp).sum()
    return int(total)


def compute_z(split: FourWaySplit) -> float:
    if split.n == 0:
        raise DegenerateInputError("Z is undefined for n = 0")
    return z_numerator(split) / split.n


def bounded_difference_audit(split: FourWaySplit, which_batch: Batch, index: int, new_symbol: int) -> float:
    """``|Z(modified) - Z(original)|`` after moving one sample of ``which_batch``.

    The moved sample is one of those currently at symbol ``index`` (1-based);
    it is relabelled to ``new_symbol``. Counts are all the statistic sees, so
    which of the samples at ``index`` moves is immaterial.

    The result is at most ``4/n``: the move changes two counts of one table
    by one, and each changed count enters two of the four absolute values.
    ``4/n`` is attained, e.g. when ``y_i <= x_i < x'_i`` at the new symbol.
    """
    table = split.table(which_batch)
    modified = split.replace(which_batch, table.moved(index, new_symbol))
    return abs(z_numerator(modified) - z_numerator(split)) / split.n
