"""Channel codec: progressive-expansion encoder and shielded decoder.

Encoding a source symbol u in [-1/2, 1/2) over N channel uses:

1. expand u + 1/2 with block length N to ``depth`` blocks, so each block k
   contributes one digit U_kn in {0, ..., k} to every channel use n;
2. for channel use n, re-expand the digits of that use with block length 1,
   placing U_kn + 1 at weight 1/(k+3)!.  The +1 shift keeps the smallest and
   largest values at each level unused, so an additive perturbation entering
   at some level can neither borrow from nor carry into the levels above it;
3. scale by the power normalizer gamma = 1/sqrt(E[|unscaled symbol|^2]).

The encoder truncates the data digits at ``depth`` but keeps the +1 guard
offsets for two further levels, so the noiseless codeword sits strictly
inside its decoding cell and arbitrarily small noise of either sign leaves
all data digits intact.

Decoding clips each received value to the exact codeword range, re-expands
it with block length 1, undoes the +1 shift (digits may now reach -1 and
k+1, never further), and reassembles the source-domain expansion.

All arithmetic is exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial, isqrt
from types import SimpleNamespace

from .expansion import _expand_digits

__all__ = [
    "EncoderParams",
    "ChannelFrame",
    "alpha_series",
    "second_moment",
    "compute_gamma",
    "encode",
    "decode",
    "codeword_unscaled",
    "codeword_range",
    "codeword_gap_edges",
    "analytic_mean",
    "analytic_power",
    "first_corrupted_levels",
    "decoded_digit_rows",
]

_HALF = Fraction(1, 2)
_GAMMA_SCALE_BITS = 64
_MIN_DEPTH = 8  # below this the moment series has not converged to tolerance


def alpha_series(depth: int) -> Fraction:
    """Truncated series sum_{k<=depth} k(k+2) / (12 ((k+3)!)^2).

    This is the variance of sum_k (U_k+1)/(k+3)! for independent digits U_k
    uniform on {0..k}; the tail beyond depth 8 is below 1e-15.
    """
    if depth < _MIN_DEPTH:
        raise ValueError(f"depth must be >= {_MIN_DEPTH}, got {depth}")
    return sum(
        Fraction(k * (k + 2), 12 * factorial(k + 3) ** 2) for k in range(1, depth + 1)
    )


def second_moment(depth: int) -> Fraction:
    """Exact second moment of the unscaled channel symbol, 36 * alpha_series."""
    return 36 * alpha_series(depth)


def compute_gamma(depth: int) -> Fraction:
    """Power normalizer 1/sqrt(second_moment), rounded down at 2**-64.

    Rounding down makes gamma^2 * second_moment(depth) land in [1 - 1e-9, 1]
    exactly (the actual defect is below 1e-19), so the unit power constraint
    is met with exact-arithmetic certainty.
    """
    m = second_moment(depth)
    scaled = (m.denominator << (2 * _GAMMA_SCALE_BITS)) * m.numerator
    return Fraction(isqrt(scaled) // m.numerator, 1 << _GAMMA_SCALE_BITS)


@dataclass(frozen=True)
class EncoderParams:
    """Immutable codec parameters: channel uses, truncation depth, gamma.

    The default depth 16 keeps the truncation error 1/((17)!)^N below 1e-30
    even for N = 1, far under any simulated noise floor.
    """

    n_uses: int
    depth: int
    gamma: Fraction

    def __post_init__(self) -> None:
        if self.n_uses < 1:
            raise ValueError(f"n_uses must be >= 1, got {self.n_uses}")
        if self.depth < _MIN_DEPTH:
            raise ValueError(f"depth must be >= {_MIN_DEPTH}, got {self.depth}")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        calibration = self.gamma * self.gamma * second_moment(self.depth)
        if not 1 - Fraction(1, 10**9) <= calibration <= 1:
            raise ValueError(f"gamma is not power-calibrated: gamma^2*moment = {float(calibration)}")

    @classmethod
    def create(cls, n_uses: int, depth: int = 16) -> "EncoderParams":
        return cls(n_uses, depth, compute_gamma(depth))

    @cached_property
    def _tables(self) -> SimpleNamespace:
        n, k_max = self.n_uses, self.depth
        lattice = factorial(k_max + 5)
        weights = [lattice // factorial(k + 3) for k in range(1, k_max + 1)]
        # Guard offsets continue for two levels past the data digits, with the
        # last one doubled: that rounds the (irrational) full guard tail UP to
        # the nearest lattice point, so the codeword set stays strictly inside
        # the closed-form range +/-(33/2 - 6e) on both sides.
        tail = lattice // factorial(k_max + 4) + 2 * (lattice // factorial(k_max + 5))
        sum_min = sum(weights) + tail
        sum_max = sum((k + 1) * w for k, w in enumerate(weights, start=1)) + tail
        two_lattice = 2 * lattice
        recon_den = factorial(k_max) ** n * (k_max + 1) ** n
        recon_w = []
        for k in range(1, k_max + 1):
            base = recon_den // factorial(k) ** n
            row = []
            for _ in range(n):
                base //= k + 1
                row.append(base)
            recon_w.append(row)
        return SimpleNamespace(
            lattice=lattice,
            two_lattice=two_lattice,
            weights=weights,
            tail=tail,
            xt_min=Fraction(12 * sum_min - lattice, two_lattice),
            xt_max=Fraction(12 * sum_max - lattice, two_lattice),
            gap_neg=Fraction(12 * (sum_max - weights[0]) - lattice, two_lattice),
            gap_pos=Fraction(12 * (sum_min + weights[0]) - lattice, two_lattice),
            recon_den=recon_den,
            recon_w=recon_w,
        )


@dataclass(frozen=True)
class ChannelFrame:
    """The exact transmit values X(1..N) for one source symbol."""

    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)


def _as_exact(value) -> Fraction:
    if isinstance(value, float):
        from .exact import embed_float

        return embed_float(value)
    return Fraction(value)


def _encode_core(u: Fraction, params: EncoderParams):
    """Source digits and unscaled codeword numerators (over 2*lattice)."""
    x = u + _HALF
    rows = _expand_digits(x.numerator, x.denominator, params.n_uses, params.depth)
    tab = params._tables
    nums = []
    for n in range(params.n_uses):
        acc = tab.tail
        for k in range(params.depth):
            acc += (rows[k][n] + 1) * tab.weights[k]
        nums.append(12 * acc - tab.lattice)
    return rows, nums


def _check_source(u) -> Fraction:
    u = _as_exact(u)
    if not -_HALF <= u < _HALF:
        raise ValueError(f"source symbol must lie in [-1/2, 1/2), got {u}")
    return u


def encode(u, params: EncoderParams) -> ChannelFrame:
    """Map a source symbol in [-1/2, 1/2) to N exact channel values."""
    u = _check_source(u)
    _, nums = _encode_core(u, params)
    tab = params._tables
    return ChannelFrame(tuple(params.gamma * Fraction(num, tab.two_lattice) for num in nums))


def codeword_unscaled(u, params: EncoderParams) -> tuple[Fraction, ...]:
    """The pre-scaling channel symbols (channel values divided by gamma)."""
    u = _check_source(u)
    _, nums = _encode_core(u, params)
    tab = params._tables
    return tuple(Fraction(num, tab.two_lattice) for num in nums)


def _decode_core(y_exact: list[Fraction], params: EncoderParams):
    tab = params._tables
    vrows = []
    for yn in y_exact:
        ty = yn / params.gamma
        if ty < tab.xt_min:
            ty = tab.xt_min
        elif ty > tab.xt_max:
            ty = tab.xt_max
        w = (ty + _HALF) / 6
        rows = _expand_digits(w.numerator, w.denominator, 1, params.depth + 2)
        if rows[0][0] or rows[1][0]:  # impossible after the range clip
            raise AssertionError("clipped value expanded outside the codeword band")
        # the digit with weight 1/(k+3)! is expansion digit number k+2
        vrows.append([rows[k + 2][0] for k in range(params.depth)])
    num = 0
    for k in range(params.depth):
        wrow = params._tables.recon_w[k]
        for n in range(params.n_uses):
            num += (vrows[n][k] - 1) * wrow[n]
    u_hat = Fraction(2 * num - tab.recon_den, 2 * tab.recon_den)
    if u_hat > _HALF:
        u_hat = _HALF
    elif u_hat < -_HALF:
        u_hat = -_HALF
    return u_hat, vrows


def _check_received(y, params: EncoderParams) -> list[Fraction]:
    y = [_as_exact(v) for v in y]
    if len(y) != params.n_uses:
        raise ValueError(f"expected {params.n_uses} received values, got {len(y)}")
    return y


def decode(y, params: EncoderParams) -> Fraction:
    """Estimate the source symbol from N received values (exact arithmetic).

    Accepts floats (embedded bit-exactly) or rationals.  The estimate is
    clamped to [-1/2, 1/2]; clamping never increases the squared error.
    """
    u_hat, _ = _decode_core(_check_received(y, params), params)
    return u_hat


def decoded_digit_rows(y, params: EncoderParams) -> list[list[int]]:
    """Per-channel reverse-expansion digits before the -1 shift (diagnostic)."""
    _, vrows = _decode_core(_check_received(y, params), params)
    return vrows


def first_corrupted_levels(u, z, params: EncoderParams) -> list[int | None]:
    """For each channel use, the smallest digit level the noise corrupted.

    Encodes u, adds the noise values z, decodes, and reports per channel use
    the first block k at which the decoded digit differs from the source
    digit (None if all ``depth`` digits survived).
    """
    u = _check_source(u)
    z = _check_received(z, params)
    src_rows, nums = _encode_core(u, params)
    tab = params._tables
    y = [params.gamma * Fraction(num, tab.two_lattice) + zn for num, zn in zip(nums, z)]
    _, vrows = _decode_core(y, params)
    report: list[int | None] = []
    for n in range(params.n_uses):
        hit = None
        for k in range(params.depth):
            if vrows[n][k] - 1 != src_rows[k][n]:
                hit = k + 1
                break
        report.append(hit)
    return report


def codeword_range(params: EncoderParams) -> tuple[Fraction, Fraction]:
    """Exact [min, max] of the unscaled channel symbol."""
    tab = params._tables
    return tab.xt_min, tab.xt_max


def codeword_gap_edges(params: EncoderParams) -> tuple[Fraction, Fraction]:
    """Exact edges of the empty band around zero in the codeword set.

    No unscaled symbol lies strictly between the two returned values: the
    lower one is the largest negative codeword (first digit at its low guard
    value, everything below maximal), the upper one the smallest positive
    codeword (first digit one step up, everything below minimal).
    """
    tab = params._tables
    return tab.gap_neg, tab.gap_pos


def analytic_mean(params: EncoderParams) -> Fraction:
    """Exact E[X(n)] under a uniform source (zero up to truncation residue)."""
    k_max = params.depth
    guard = 6 * (Fraction(1, factorial(k_max + 4)) + Fraction(2, factorial(k_max + 5)))
    truncated = 3 * Fraction(1, factorial(k_max + 3))
    return params.gamma * (guard - truncated)


def analytic_power(params: EncoderParams) -> Fraction:
    """Exact E[X(n)^2] under a uniform source; equals 1 up to ~1e-19."""
    mean_unscaled = analytic_mean(params) / params.gamma
    return params.gamma**2 * (second_moment(params.depth) + mean_unscaled**2)
