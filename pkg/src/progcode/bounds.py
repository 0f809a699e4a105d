"""Closed-form converse and achievability expressions.

Conventions: SNR is the power ratio P/sigma^2 with P = 1, logs written
``log2`` are base 2 (matching the bound derivations) while ``exp`` is the
natural exponential (it enters through the Gaussian tail bound
Q(u) <= exp(-u^2/2)/2).  The noise-regime level ell is the unique integer
with (ell+3)! <= 6*gamma/sigma < (ell+4)!, located on the exact factorial
ladder so boundary cases are decided without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exact import embed_float

__all__ = [
    "RegimeError",
    "BoundReport",
    "opta_sdr",
    "opta_mse",
    "noise_regime_level",
    "regime_escape_bound",
    "achievable_mse_bound",
    "distortion_constants",
    "sdr_log2_bracket",
    "bound_report",
]

_SOURCE_VARIANCE = 1.0 / 12.0  # uniform on an interval of length 1


class RegimeError(ValueError):
    """The noise level is too large for any regime level ell >= 1."""


def opta_sdr(snr: float, n_uses: int) -> float:
    """Separation-based SDR ceiling (pi*e/6) * (1 + snr)**n_uses."""
    if snr < 0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    if n_uses < 1:
        raise ValueError(f"n_uses must be >= 1, got {n_uses}")
    return (math.pi * math.e / 6.0) * (1.0 + snr) ** n_uses


def opta_mse(snr: float, n_uses: int) -> float:
    """Distortion floor implied by the SDR ceiling, for source variance 1/12."""
    return _SOURCE_VARIANCE / opta_sdr(snr, n_uses)


def _exact_ratio(sigma, gamma: Fraction) -> Fraction:
    sigma = embed_float(sigma) if isinstance(sigma, float) else Fraction(sigma)
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return 6 * gamma / sigma


def noise_regime_level(sigma, gamma: Fraction) -> int | None:
    """The unique ell >= 1 with (ell+3)! <= 6*gamma/sigma < (ell+4)!.

    Returns None when 6*gamma/sigma < 4!, i.e. the noise is too strong for
    the regime ladder to start.  The comparison is exact, so a ratio landing
    precisely on a factorial belongs to the higher level (left-closed).
    """
    ratio = _exact_ratio(sigma, gamma)
    if ratio < 24:
        return None
    level = 1
    while ratio >= factorial(level + 4):
        level += 1
    return level


def regime_escape_bound(sigma, gamma: Fraction) -> float:
    """Tail bound exp(-(log2 r)^2 / (2 (log2 log2 r)^2)) with r = 6*gamma/sigma.

    Bounds the per-channel probability that the noise magnitude reaches the
    regime threshold; requires r > 2 so the inner log is positive.
    """
    ratio = float(_exact_ratio(sigma, gamma))
    if ratio <= 2:
        raise ValueError(f"6*gamma/sigma must exceed 2, got {ratio}")
    log_r = math.log2(ratio)
    log_log_r = math.log2(log_r)
    return math.exp(-(log_r**2) / (2.0 * log_log_r**2))


def achievable_mse_bound(sigma, n_uses: int, gamma: Fraction) -> float:
    """Distortion guarantee 4*((sigma/6g)(log2(6g/sigma))^5)^(2N) + N*tail.

    Only defined inside the regime ladder; raises RegimeError otherwise.
    """
    if n_uses < 1:
        raise ValueError(f"n_uses must be >= 1, got {n_uses}")
    if noise_regime_level(sigma, gamma) is None:
        raise RegimeError(f"no regime level for sigma={sigma}")
    six_gamma = 6.0 * float(gamma)
    sigma_f = float(sigma)
    ratio = six_gamma / sigma_f
    first = 4.0 * ((sigma_f / six_gamma) * math.log2(ratio) ** 5) ** (2 * n_uses)
    return first + n_uses * regime_escape_bound(sigma, gamma)


def distortion_constants(n_uses: int, gamma: Fraction) -> tuple[float, float]:
    """SNR-independent constants (c1, c2) of the high-SNR distortion form

    D <= c1 * (log2 SNR)^(10N) / SNR^N + c2 / SNR^N + (tail term).
    """
    if n_uses < 1:
        raise ValueError(f"n_uses must be >= 1, got {n_uses}")
    six_gamma = 6.0 * float(gamma)
    c1 = 4.0 / (six_gamma ** (2 * n_uses) * 2.0 ** (2 * n_uses))
    c2 = c1 * (2.0 * math.log2(six_gamma)) ** (10 * n_uses)
    return c1, c2


def sdr_log2_bracket(snr: float, n_uses: int) -> tuple[float, float]:
    """Bracket for log2 of the optimum SDR at high SNR.

    Lower: N log2(snr) - 10N log2(log2(snr)) (the vanishing correction term
    is dropped, a one-sided slack).  Upper: N log2(1+snr) + log2(pi*e/6).
    Valid, with lower <= upper, for every snr > 2.
    """
    if snr <= 2:
        raise ValueError(f"snr must exceed 2, got {snr}")
    if n_uses < 1:
        raise ValueError(f"n_uses must be >= 1, got {n_uses}")
    log_snr = math.log2(snr)
    lower = n_uses * log_snr - 10.0 * n_uses * math.log2(log_snr)
    upper = n_uses * math.log2(1.0 + snr) + math.log2(math.pi * math.e / 6.0)
    return lower, upper


@dataclass(frozen=True)
class BoundReport:
    """All analytic bound values at one operating point."""

    snr: float
    n_uses: int
    opta_sdr: float
    opta_mse: float
    ell: int | None
    achievable_mse: float | None
    c1: float
    c2: float
    sdr_log2_lower: float | None
    sdr_log2_upper: float | None


def bound_report(snr: float, n_uses: int, gamma: Fraction) -> BoundReport:
    """Evaluate every bound at the given power-ratio SNR (P = 1)."""
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")
    sigma = math.sqrt(1.0 / snr)
    ell = noise_regime_level(sigma, gamma)
    achievable = achievable_mse_bound(sigma, n_uses, gamma) if ell is not None else None
    c1, c2 = distortion_constants(n_uses, gamma)
    if snr > 2:
        lower, upper = sdr_log2_bracket(snr, n_uses)
    else:
        lower = upper = None
    return BoundReport(
        snr=snr,
        n_uses=n_uses,
        opta_sdr=opta_sdr(snr, n_uses),
        opta_mse=opta_mse(snr, n_uses),
        ell=ell,
        achievable_mse=achievable,
        c1=c1,
        c2=c2,
        sdr_log2_lower=lower,
        sdr_log2_upper=upper,
    )
