"""Exact rational arithmetic helpers shared by every other module.

All codec-side values (source symbol, codewords, embedded noise, decoded
estimate, squared error) live in ``fractions.Fraction``, which keeps a
canonical reduced numerator/denominator pair, so equality is structural and
no floating-point rounding ever enters the codec path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import factorial

# The universal exact value type.  Immutable, canonical (gcd-reduced,
# positive denominator), closed under +, -, *, /, floor and comparison.
ExactReal = Fraction

__all__ = [
    "ExactReal",
    "factorial",
    "tail_sum_k_over_factorial",
    "embed_float",
    "factorial_log_ratio_bound_holds",
]


def tail_sum_k_over_factorial(lower: int, upper: int | None = None) -> Fraction:
    """Exact value of sum_{k=lower..upper} k/(k+1)!.

    The sum telescopes: each term k/(k+1)! equals 1/k! - 1/(k+1)!, so the
    result is 1/lower! - 1/(upper+1)!, and 1/lower! for the infinite sum
    (``upper=None``).
    """
    if lower < 1:
        raise ValueError(f"lower index must be >= 1, got {lower}")
    full = Fraction(1, factorial(lower))
    if upper is None:
        return full
    if upper < lower:
        raise ValueError(f"upper index {upper} below lower index {lower}")
    return full - Fraction(1, factorial(upper + 1))


def embed_float(value: float) -> Fraction:
    """Exact dyadic rational equal bit-for-bit to a finite binary64 value."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot embed non-finite value {value!r}")
    return Fraction(value)


def factorial_log_ratio_bound_holds(omega: float, n: int) -> bool:
    """Check n - 1 >= log2(omega) / log2(log2(omega)) for 4 <= omega <= n!.

    Sanity oracle for the noise-tail bound chain.  The logs are evaluated in
    binary64 (exactness is not needed: at every tested point the inequality
    holds with slack far above one ulp).
    """
    omega_exact = Fraction(omega)
    if omega_exact < 4:
        raise ValueError(f"omega must be >= 4, got {omega}")
    if n < 6:
        raise ValueError(f"n must be >= 6, got {n}")
    if omega_exact > factorial(n):
        raise ValueError(f"omega={omega} exceeds {n}!")
    log_w = math.log2(float(omega_exact))
    return n - 1 >= log_w / math.log2(log_w)
