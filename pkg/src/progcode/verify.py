"""Exact property suites behind the ``verify-lemmas`` CLI command.

Each check raises VerificationError on the first counterexample and
otherwise returns the number of cases it examined.  Everything here is
zero-tolerance: the identities are rational, so they either hold exactly
or they do not.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import factorial

from .exact import factorial_log_ratio_bound_holds, tail_sum_k_over_factorial
from .expansion import ProgressiveDigits, expand, leading_digits_vanish, reconstruct

__all__ = ["VerificationError", "run_all"]


class VerificationError(AssertionError):
    pass


def check_telescoping_identity(depth: int) -> int:
    """tail_sum(l, K) + 1/(K+1)! == 1/l! for every l <= depth and K in [l, l+10]."""
    cases = 0
    for lower in range(1, depth + 1):
        target = Fraction(1, factorial(lower))
        if tail_sum_k_over_factorial(lower) != target:
            raise VerificationError(f"infinite tail sum failed at l={lower}")
        for upper in range(lower, min(lower + 10, depth + 10) + 1):
            got = tail_sum_k_over_factorial(lower, upper) + Fraction(1, factorial(upper + 1))
            if got != target:
                raise VerificationError(f"telescoping failed at l={lower}, K={upper}")
            cases += 1
    return cases


def check_small_value_digits(samples: int, rng: random.Random) -> int:
    """Values below 1/((l!)^S (l+1)^t) have all-zero digits through (l, t)."""
    for _ in range(samples):
        block_len = rng.randint(1, 3)
        level = rng.randint(1, 8)
        inblock = rng.randint(1, block_len)
        threshold = Fraction(1, factorial(level) ** block_len * (level + 1) ** inblock)
        x = threshold * Fraction(rng.randrange(1 << 53), 1 << 53)
        if not leading_digits_vanish(x, block_len, level, inblock):
            raise VerificationError(
                f"nonzero digit before ({level},{inblock}) for x={x}, S={block_len}"
            )
    return samples


def check_finite_expansion_roundtrip(samples: int, rng: random.Random) -> int:
    """expand(reconstruct(d)) == d for arbitrary valid digit arrays d."""
    for _ in range(samples):
        block_len = rng.randint(1, 3)
        depth = rng.randint(1, 8)
        rows = tuple(
            tuple(rng.randint(0, k) for _ in range(block_len)) for k in range(1, depth + 1)
        )
        digits = ProgressiveDigits(block_len, depth, rows)
        back = expand(reconstruct(digits), block_len, depth)
        if back != digits:
            raise VerificationError(f"round trip changed digits: {rows} -> {back.rows}")
    return samples


def check_expansion_gap(samples: int, rng: random.Random) -> int:
    """0 <= x - reconstruct(expand(x)) <= 1/((K+1)!)^S on random rationals."""
    for _ in range(samples):
        block_len = rng.randint(1, 3)
        depth = rng.choice((4, 8))
        den = rng.randint(1, 10**6)
        x = Fraction(rng.randrange(den), den)
        gap = x - reconstruct(expand(x, block_len, depth))
        if not 0 <= gap <= Fraction(1, factorial(depth + 1) ** block_len):
            raise VerificationError(f"residual {gap} out of range for x={x}")
    return samples


def check_factorial_log_bound() -> int:
    """n-1 >= log2(w)/log2(log2(w)) on the grid w = u * n!, u in {.5, .9, 1}."""
    cases = 0
    for n in range(6, 21):
        for u in (Fraction(1, 2), Fraction(9, 10), Fraction(1)):
            omega = u * factorial(n)
            if not factorial_log_ratio_bound_holds(omega, n):
                raise VerificationError(f"log-ratio bound failed at n={n}, u={u}")
            cases += 1
    return cases


def run_all(depth: int = 50, samples: int = 10_000, seed: int = 20240811) -> list[tuple[str, int]]:
    """Run every suite; returns (name, cases) pairs or raises VerificationError."""
    rng = random.Random(seed)
    return [
        ("telescoping tail-sum identity", check_telescoping_identity(depth)),
        ("small values expand to leading zeros", check_small_value_digits(samples, rng)),
        ("finite expansions round-trip exactly", check_finite_expansion_roundtrip(samples, rng)),
        ("expansion residual stays in its cell", check_expansion_gap(samples, rng)),
        ("factorial log-ratio bound grid", check_factorial_log_bound()),
    ]
