"""Progressive-expansion analog joint source-channel codec.

A single uniform source symbol is expanded in a mixed-radix (factorial-step)
number system, the digits are distributed round-robin over N AWGN channel
uses, and each channel symbol is built by a reverse expansion that leaves
guard values free at every level so that additive noise cannot carry over
into more significant digits.  All codec arithmetic is exact rational, so
squared errors far below binary64 resolution are measured faithfully.
"""

from .exact import (
    ExactReal,
    embed_float,
    factorial,
    factorial_log_ratio_bound_holds,
    tail_sum_k_over_factorial,
)
from .expansion import (
    DigitStatistics,
    ProgressiveDigits,
    digit_statistics,
    expand,
    leading_digits_vanish,
    reconstruct,
)
from .codec import (
    ChannelFrame,
    EncoderParams,
    alpha_series,
    compute_gamma,
    codeword_gap_edges,
    codeword_range,
    codeword_unscaled,
    decode,
    encode,
    first_corrupted_levels,
    second_moment,
)
from .bounds import (
    BoundReport,
    RegimeError,
    achievable_mse_bound,
    bound_report,
    distortion_constants,
    noise_regime_level,
    opta_mse,
    opta_sdr,
    regime_escape_bound,
    sdr_log2_bracket,
)
from .sim import (
    SimConfig,
    SweepPoint,
    TrialRecord,
    baseline_linear,
    run_sweep,
    run_trial,
    sample_noise,
    trial_rng,
)

__version__ = "0.1.0"

__all__ = [
    "ExactReal",
    "embed_float",
    "factorial",
    "factorial_log_ratio_bound_holds",
    "tail_sum_k_over_factorial",
    "ProgressiveDigits",
    "DigitStatistics",
    "expand",
    "reconstruct",
    "leading_digits_vanish",
    "digit_statistics",
    "EncoderParams",
    "ChannelFrame",
    "compute_gamma",
    "second_moment",
    "alpha_series",
    "encode",
    "decode",
    "codeword_unscaled",
    "codeword_range",
    "codeword_gap_edges",
    "first_corrupted_levels",
    "BoundReport",
    "RegimeError",
    "opta_sdr",
    "opta_mse",
    "noise_regime_level",
    "regime_escape_bound",
    "achievable_mse_bound",
    "distortion_constants",
    "sdr_log2_bracket",
    "bound_report",
    "SimConfig",
    "TrialRecord",
    "SweepPoint",
    "sample_noise",
    "run_trial",
    "run_sweep",
    "baseline_linear",
    "trial_rng",
    "__version__",
]
