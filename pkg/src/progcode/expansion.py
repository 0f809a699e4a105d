"""Forward and inverse progressive (factorial-step mixed radix) expansion.

A value x in [0, 1) is expanded into digit blocks of length S.  Within block
k the radix is k+1, so the digit at position (k, s) has weight
1/((k!)^S (k+1)^s) and ranges over {0, ..., k}.  Digits are extracted
greedily: multiply the residual by the block radix and take the floor.
Positions are ordered block-major: (k, s) precedes (l, t) iff k < l, or
k == l and s < t.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator

import numpy as np

__all__ = [
    "ProgressiveDigits",
    "expand",
    "reconstruct",
    "leading_digits_vanish",
    "DigitStatistics",
    "digit_statistics",
    "uniformity_statistic",
    "independence_statistic",
]


@dataclass(frozen=True)
class ProgressiveDigits:
    """Digit array of a truncated progressive expansion.

    ``rows[k-1][s-1]`` is the digit at position (k, s), for blocks
    1 <= k <= depth and in-block positions 1 <= s <= block_len.
    """

    block_len: int
    depth: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.block_len < 1 or self.depth < 1:
            raise ValueError("block_len and depth must be positive")
        if len(self.rows) != self.depth:
            raise ValueError(f"expected {self.depth} digit rows, got {len(self.rows)}")
        for k, row in enumerate(self.rows, start=1):
            if len(row) != self.block_len:
                raise ValueError(f"row {k} has {len(row)} digits, expected {self.block_len}")
            for s, digit in enumerate(row, start=1):
                if not 0 <= digit <= k:
                    raise ValueError(f"digit {digit} at position ({k},{s}) outside 0..{k}")

    def digit(self, k: int, s: int) -> int:
        return self.rows[k - 1][s - 1]

    def positions(self) -> Iterator[tuple[tuple[int, int], int]]:
        """Yield ((k, s), digit) in canonical block-major order."""
        for k, row in enumerate(self.rows, start=1):
            for s, digit in enumerate(row, start=1):
                yield (k, s), digit

    def flat(self) -> tuple[int, ...]:
        return tuple(d for row in self.rows for d in row)


def _expand_digits(num: int, den: int, block_len: int, depth: int) -> list[list[int]]:
    # Greedy digit extraction over a fixed denominator: the residual num/den
    # stays in [0, 1) throughout, so every digit lands in {0, ..., k}.
    rows = []
    for k in range(1, depth + 1):
        radix = k + 1
        row = []
        for _ in range(block_len):
            num *= radix
            digit, num = divmod(num, den)
            row.append(digit)
        rows.append(row)
    return rows


def expand(x, block_len: int, depth: int) -> ProgressiveDigits:
    """Expand x in [0, 1) to ``depth`` blocks of ``block_len`` digits.

    The returned digits reconstruct to a value r with
    0 <= x - r <= 1/((depth+1)!)^block_len; the expansion of an exactly
    representable value is recovered verbatim (finite expansions win ties).
    """
    if block_len < 1 or depth < 1:
        raise ValueError("block_len and depth must be positive")
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"expansion input must lie in [0, 1), got {x}")
    rows = _expand_digits(x.numerator, x.denominator, block_len, depth)
    return ProgressiveDigits(block_len, depth, tuple(tuple(r) for r in rows))


def reconstruct(digits: ProgressiveDigits) -> Fraction:
    """Exact finite sum of digit/weight terms for a digit array."""
    s = digits.block_len
    den = factorial(digits.depth) ** s * (digits.depth + 1) ** s
    total = 0
    for k, row in enumerate(digits.rows, start=1):
        block_unit = den // (factorial(k) ** s)
        for d in row:
            block_unit //= k + 1
            total += d * block_unit
    return Fraction(total, den)


def leading_digits_vanish(x, block_len: int, k: int, s: int) -> bool:
    """True iff every digit of x at a position up to and including (k, s) is zero.

    Guaranteed whenever x < 1/((k!)^block_len (k+1)^s).
    """
    if not 1 <= s <= block_len:
        raise ValueError(f"in-block index {s} outside 1..{block_len}")
    digits = expand(x, block_len, k)
    for (pk, ps), d in digits.positions():
        if (pk, ps) > (k, s):
            break
        if d != 0:
            return False
    return True


@dataclass(frozen=True)
class DigitStatistics:
    """Empirical digit counts from expanding uniform random samples.

    ``marginal[(k, s)][v]`` counts samples whose digit at (k, s) equals v;
    ``joint[((k, s), (l, t))]`` is the contingency table of the digit pair.
    """

    sample_count: int
    block_len: int
    depth: int
    marginal: dict[tuple[int, int], np.ndarray]
    joint: dict[tuple[tuple[int, int], tuple[int, int]], np.ndarray]


def digit_statistics(sample_count: int, block_len: int, depth: int, seed: int) -> DigitStatistics:
    """Expand ``sample_count`` uniform [0,1) samples and tabulate digit counts.

    Sampling is binary64 (the samples are exact multiples of 2**-53, so the
    integer digit extraction is exact) and deterministic for a given seed.
    Joint tables are produced for every unordered pair of positions.
    """
    from . import kernels

    if sample_count < 0:
        raise ValueError("sample_count must be >= 0")
    positions = [(k, s) for k in range(1, depth + 1) for s in range(1, block_len + 1)]
    if sample_count == 0:
        matrix = np.zeros((0, len(positions)), dtype=np.int8)
    else:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        mantissas = (rng.random(sample_count) * (1 << 53)).astype(np.int64)
        matrix = kernels.digit_matrix(mantissas, block_len, depth)

    marginal = {}
    for j, (k, s) in enumerate(positions):
        marginal[(k, s)] = np.bincount(matrix[:, j], minlength=k + 1).astype(np.int64)
    joint = {}
    for a, (k, s) in enumerate(positions):
        for b in range(a + 1, len(positions)):
            l, t = positions[b]
            fused = matrix[:, a].astype(np.int64) * (l + 1) + matrix[:, b]
            counts = np.bincount(fused, minlength=(k + 1) * (l + 1))
            joint[((k, s), (l, t))] = counts.reshape(k + 1, l + 1).astype(np.int64)
    return DigitStatistics(sample_count, block_len, depth, marginal, joint)


def uniformity_statistic(counts: np.ndarray) -> tuple[float, int]:
    """Pearson chi-square statistic of counts against the uniform law."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        return 0.0, len(counts) - 1
    expected = total / len(counts)
    stat = float(((counts - expected) ** 2 / expected).sum())
    return stat, len(counts) - 1


def independence_statistic(table: np.ndarray) -> tuple[float, int]:
    """Pearson chi-square statistic of a contingency table against independence."""
    table = np.asarray(table, dtype=np.float64)
    total = table.sum()
    if total == 0:
        return 0.0, (table.shape[0] - 1) * (table.shape[1] - 1)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    stat = float((np.where(expected > 0, (table - expected) ** 2 / np.where(expected > 0, expected, 1), 0.0)).sum())
    dof = (table.shape[0] - 1) * (table.shape[1] - 1)
    return stat, dof
