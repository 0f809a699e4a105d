"""int64 statistics kernels: correctness against the exact path, backend parity."""

from fractions import Fraction

import numpy as np
import pytest

from progcode import EncoderParams, codeword_unscaled, expand
from progcode import kernels


@pytest.fixture(scope="module")
def mantissas() -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(321)))
    return (rng.random(4000) * (1 << 53)).astype(np.int64)


def test_digits_match_exact_expansion(mantissas):
    matrix = kernels.digit_matrix(mantissas, 3, 5)
    for i in range(0, 200):
        x = Fraction(int(mantissas[i]), 1 << 53)
        assert tuple(matrix[i]) == expand(x, 3, 5).flat()


def test_codewords_match_exact_encoder(mantissas):
    params = EncoderParams.create(3)
    values = kernels.codeword_values(mantissas, 3, 16)
    for i in range(100):
        u = Fraction(int(mantissas[i]), 1 << 53) - Fraction(1, 2)
        exact = codeword_unscaled(u, params)
        for n in range(3):
            assert values[i, n] == pytest.approx(float(exact[n]), abs=1e-15)


def test_backends_agree_bitwise(mantissas):
    if not kernels.numba_enabled():
        pytest.skip("numba backend unavailable")
    d_nb = kernels.digit_matrix(mantissas, 2, 6)
    c_nb = kernels.codeword_values(mantissas, 2, 16)
    kernels._reset_backend("numpy")
    try:
        assert kernels.implementation_name() == "numpy"
        assert (kernels.digit_matrix(mantissas, 2, 6) == d_nb).all()
        assert (kernels.codeword_values(mantissas, 2, 16) == c_nb).all()
    finally:
        kernels._reset_backend()


def test_rejects_bad_mantissas():
    with pytest.raises(ValueError):
        kernels.digit_matrix(np.array([-1], dtype=np.int64), 1, 4)
    with pytest.raises(ValueError):
        kernels.digit_matrix(np.array([1 << 53], dtype=np.int64), 1, 4)
    with pytest.raises(ValueError):
        kernels.digit_matrix(np.array([0], dtype=np.int64), 0, 4)


def test_empty_input():
    out = kernels.digit_matrix(np.empty(0, dtype=np.int64), 2, 3)
    assert out.shape == (0, 6)
