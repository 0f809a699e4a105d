"""Codec: calibration constants, codeword geometry, shielded decoding."""

import math
import random
from fractions import Fraction
from math import factorial

import pytest

from progcode import (
    ChannelFrame,
    EncoderParams,
    alpha_series,
    codeword_gap_edges,
    codeword_range,
    codeword_unscaled,
    compute_gamma,
    decode,
    encode,
    first_corrupted_levels,
    noise_regime_level,
    second_moment,
)
from progcode.codec import analytic_mean, analytic_power, decoded_digit_rows

HALF = Fraction(1, 2)


def euler_e_bracket(terms: int = 30) -> tuple[Fraction, Fraction]:
    """Rational enclosure of e: partial sum and partial sum + 2/(terms+1)!."""
    partial = sum((Fraction(1, factorial(j)) for j in range(terms + 1)), Fraction(0))
    return partial, partial + Fraction(2, factorial(terms + 1))


def random_source(rng: random.Random) -> Fraction:
    return Fraction(rng.randrange(1 << 53), 1 << 53) - HALF


class TestCalibration:
    def test_second_moment_matches_reported_value(self):
        # printed figure 0.0173814 (6 significant digits)
        assert abs(float(second_moment(16)) - 0.0173814) < 1e-7

    def test_alpha_matches_reported_value(self):
        assert abs(float(alpha_series(16)) - 0.000482816) < 1e-8

    def test_gamma_matches_reported_value(self):
        assert abs(float(compute_gamma(16)) - 7.585) < 1e-3

    def test_gamma_is_exactly_power_calibrated(self):
        gamma = compute_gamma(16)
        product = gamma * gamma * second_moment(16)
        assert 1 - Fraction(1, 10**9) <= product <= 1

    def test_moment_series_is_depth_stable(self):
        # converged to far below the acceptance tolerances by depth 8
        assert abs(float(second_moment(8) - second_moment(24))) < 1e-12

    def test_rejects_shallow_depth(self):
        with pytest.raises(ValueError):
            compute_gamma(7)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            EncoderParams(0, 16, compute_gamma(16))
        with pytest.raises(ValueError):
            EncoderParams(1, 16, Fraction(-1))
        with pytest.raises(ValueError):
            EncoderParams(1, 16, Fraction(7))  # not calibrated

    def test_analytic_power_is_unit(self, params2):
        assert abs(analytic_power(params2) - 1) <= Fraction(1, 10**9)

    def test_analytic_mean_is_negligible(self, params2):
        assert abs(analytic_mean(params2)) < Fraction(1, 10**15)


class TestCodewordGeometry:
    def test_extreme_source_hits_lower_range_edge(self, params1):
        # all-zero digits: value approaches 6e - 33/2 from above
        xt = codeword_unscaled(Fraction(-1, 2), params1)[0]
        lo, _hi = codeword_range(params1)
        assert xt == lo
        assert abs(float(xt) - (6 * math.e - 16.5)) < 1.0 / factorial(18)

    def test_zero_source_sits_on_gap_edge(self, params1):
        # exact series oracle: 6*(2/4! + sum_{k>=2} 1/(k+3)!) - 1/2, built term by term
        depth = params1.depth
        series = Fraction(2, factorial(4))
        for k in range(2, depth + 1):
            series += Fraction(1, factorial(k + 3))
        series += Fraction(1, factorial(depth + 4)) + Fraction(2, factorial(depth + 5))
        expected = 6 * series - HALF
        xt = codeword_unscaled(Fraction(0), params1)[0]
        assert xt == expected
        assert xt == codeword_gap_edges(params1)[1]
        assert abs(float(xt) - 0.05969) < 1e-5

    def test_range_certificate_against_closed_form(self, params3):
        # sup |unscaled codeword| < 33/2 - 6e, proven with a rational e-bracket
        e_lo, e_hi = euler_e_bracket()
        lo, hi = codeword_range(params3)
        assert hi < Fraction(33, 2) - 6 * e_lo
        assert lo > 6 * e_hi - Fraction(33, 2)
        assert -lo <= Fraction(33, 2) - 6 * e_lo and hi <= Fraction(33, 2) - 6 * e_lo

    def test_gap_edges_match_closed_form(self, params2):
        # edges are +/-(6e - 65/4) up to the truncation tail
        e_lo, e_hi = euler_e_bracket()
        gneg, gpos = codeword_gap_edges(params2)
        for edge, sign in ((gpos, 1), (gneg, -1)):
            lo_diff = sign * edge - (6 * e_lo - Fraction(65, 4))
            hi_diff = sign * edge - (6 * e_hi - Fraction(65, 4))
            assert max(abs(lo_diff), abs(hi_diff)) < Fraction(1, 10**15)

    def test_emitted_codewords_respect_range_and_gap(self, params2):
        rng = random.Random(42)
        lo, hi = codeword_range(params2)
        gneg, gpos = codeword_gap_edges(params2)
        for _ in range(400):
            for xt in codeword_unscaled(random_source(rng), params2):
                assert lo <= xt <= hi
                assert not (gneg < xt < gpos)
                assert xt != 0

    def test_frame_is_gamma_scaled(self, params2):
        u = Fraction(3, 7) - HALF
        frame = encode(u, params2)
        assert isinstance(frame, ChannelFrame) and len(frame) == 2
        for x, xt in zip(frame.values, codeword_unscaled(u, params2)):
            assert x == params2.gamma * xt

    def test_encode_rejects_out_of_domain(self, params1):
        for bad in (HALF, Fraction(3, 4), Fraction(-2, 3)):
            with pytest.raises(ValueError):
                encode(bad, params1)


class TestNoiselessRoundTrip:
    @pytest.mark.parametrize("n_uses", [1, 2, 3])
    def test_recovers_within_truncation_cell(self, n_uses):
        params = EncoderParams.create(n_uses)
        cell = Fraction(1, factorial(params.depth + 1) ** n_uses)
        rng = random.Random(n_uses)
        for _ in range(150):
            u = random_source(rng)
            u_hat = decode(encode(u, params).values, params)
            assert abs(u_hat - u) <= cell

    def test_exactly_expandable_source_is_exact(self, params2):
        u = Fraction(1, 3) - HALF  # terminates at block 2
        assert decode(encode(u, params2).values, params2) == u

    def test_boundary_source(self, params3):
        u = Fraction(-1, 2)
        u_hat = decode(encode(u, params3).values, params3)
        assert abs(u_hat - u) <= Fraction(1, factorial(17) ** 3)


class TestDecode:
    def test_all_zero_input_is_legal(self, params1):
        u_hat = decode([0.0], params1)
        assert -HALF <= u_hat <= HALF

    def test_extreme_inputs_clip_into_domain(self, params2):
        for y in ([1e6, -1e6], [123.0, 0.25], [-0.7, 0.9]):
            assert -HALF <= decode(y, params2) <= HALF

    def test_rejects_wrong_arity_and_non_finite(self, params2):
        with pytest.raises(ValueError):
            decode([0.1], params2)
        with pytest.raises(ValueError):
            decode([0.1, math.nan], params2)

    def test_decoded_digits_are_shielded(self, params2):
        # whatever hits the decoder, the shifted digits stay in {-1..k+1}
        rng = random.Random(7)
        for _ in range(200):
            y = [rng.uniform(-3, 3) for _ in range(2)]
            rows = decoded_digit_rows(y, params2)
            for digits in rows:
                for k, v in enumerate(digits, start=1):
                    assert -1 <= v - 1 <= k + 1


class TestNoisyGuarantees:
    def noise_below(self, threshold: Fraction, rng: random.Random) -> Fraction:
        sign = 1 if rng.random() < 0.5 else -1
        return sign * threshold * Fraction(rng.randrange(1 << 40), 1 << 40)

    @pytest.mark.parametrize("level", [1, 2, 3, 5])
    def test_error_bound_under_threshold_noise(self, params2, level):
        # noise below 6*gamma/(level+2)! on every use keeps the error within
        # 2/((level-1)!)^N -- checked exactly, trial by trial
        threshold = 6 * params2.gamma / factorial(level + 2)
        bound = Fraction(2, factorial(level - 1) ** 2)
        rng = random.Random(level)
        for _ in range(100):
            u = random_source(rng)
            frame = encode(u, params2)
            y = [x + self.noise_below(threshold, rng) for x in frame.values]
            u_hat = decode(y, params2)
            assert abs(u_hat - u) <= bound

    @pytest.mark.parametrize("level", [3, 4, 6])
    def test_digits_survive_up_to_level_minus_two(self, params2, level):
        threshold = 6 * params2.gamma / factorial(level + 2)
        rng = random.Random(level + 100)
        for _ in range(100):
            u = random_source(rng)
            z = [self.noise_below(threshold, rng) for _ in range(2)]
            for first_bad in first_corrupted_levels(u, z, params2):
                assert first_bad is None or first_bad >= level - 1

    def test_zero_noise_corrupts_nothing(self, params3):
        report = first_corrupted_levels(Fraction(1, 5), [0, 0, 0], params3)
        assert report == [None, None, None]

    def test_huge_noise_report_is_well_formed(self, params2):
        z = [Fraction(20), Fraction(-20)]
        report = first_corrupted_levels(Fraction(1, 5), z, params2)
        assert len(report) == 2
        for hit in report:
            assert hit is None or 1 <= hit <= params2.depth

    def test_regime_level_consistency(self, params2):
        # the targeted-noise construction above matches the ladder definition
        sigma = 6 * params2.gamma / 1000
        assert noise_regime_level(sigma, params2.gamma) == 3
