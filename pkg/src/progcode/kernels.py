"""Bulk int64 digit-extraction kernels for statistics over many samples.

Binary64 uniform samples are exact multiples of 2**-53, so their expansion
digits can be extracted with pure int64 shift/mask arithmetic: for a
residual mantissa p < 2**53 the next digit of block k is (p*(k+1)) >> 53.
This stays within int64 as long as the block radix is <= 1024.

The per-sample loops are JIT-compiled with numba when it is importable;
setting the environment variable ``PROGCODE_NO_NUMBA`` (to any non-empty
value) forces the pure-numpy fallback.  Both paths produce bit-identical
output; ``benchmarks/bench_kernels.py`` compares their throughput.

These kernels serve the bulk Monte Carlo statistics only.  The per-trial
codec path needs arbitrary-precision rationals (lattice denominators far
beyond 64 bits) and stays in exact Python integers.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "digit_matrix",
    "codeword_values",
    "numba_enabled",
    "implementation_name",
]

_MANTISSA_BITS = 53
_MANTISSA_MASK = (1 << _MANTISSA_BITS) - 1
_MAX_RADIX = 1 << (63 - _MANTISSA_BITS)

_backend = None  # resolved lazily: "numba" or "numpy"
_numba_funcs = None


def numba_enabled() -> bool:
    return _resolve_backend() == "numba"


def implementation_name() -> str:
    return _resolve_backend()


def _resolve_backend() -> str:
    global _backend, _numba_funcs
    if _backend is not None:
        return _backend
    if os.environ.get("PROGCODE_NO_NUMBA"):
        _backend = "numpy"
        return _backend
    try:
        _numba_funcs = _compile_numba()
        _backend = "numba"
    except ImportError:
        _backend = "numpy"
    return _backend


def _reset_backend(force: str | None = None) -> None:
    """Re-select the implementation (tests and benchmarks only)."""
    global _backend, _numba_funcs
    _backend = None
    _numba_funcs = None
    if force == "numpy":
        _backend = "numpy"
    elif force == "numba":
        _numba_funcs = _compile_numba()
        _backend = "numba"
    elif force is not None:
        raise ValueError(f"unknown backend {force!r}")


def _compile_numba():
    from numba import njit

    @njit(cache=True)
    def digits_nb(mantissas, block_len, depth, out):
        mask = np.int64(_MANTISSA_MASK)
        for i in range(mantissas.shape[0]):
            p = mantissas[i]
            col = 0
            for k in range(1, depth + 1):
                radix = np.int64(k + 1)
                for _ in range(block_len):
                    p = p * radix
                    out[i, col] = np.int8(p >> _MANTISSA_BITS)
                    p = p & mask
                    col += 1
        return out

    @njit(cache=True)
    def codewords_nb(mantissas, n_uses, depth, weights, tail, lattice, out):
        mask = np.int64(_MANTISSA_MASK)
        scale = 6.0 / lattice
        for i in range(mantissas.shape[0]):
            p = mantissas[i]
            acc = np.zeros(n_uses, dtype=np.int64)
            for k in range(1, depth + 1):
                radix = np.int64(k + 1)
                w = weights[k - 1]
                for n in range(n_uses):
                    p = p * radix
                    acc[n] += (np.int64(p >> _MANTISSA_BITS) + 1) * w
                    p = p & mask
            for n in range(n_uses):
                out[i, n] = (acc[n] + tail) * scale - 0.5
        return out

    return digits_nb, codewords_nb


def _check_args(mantissas: np.ndarray, block_len: int, depth: int) -> np.ndarray:
    if block_len < 1 or depth < 1:
        raise ValueError("block_len and depth must be positive")
    if depth + 1 > _MAX_RADIX:
        raise ValueError(f"depth {depth} too large for int64 digit extraction")
    mantissas = np.ascontiguousarray(mantissas, dtype=np.int64)
    if mantissas.ndim != 1:
        raise ValueError("mantissas must be a 1-d array")
    if mantissas.size and (mantissas.min() < 0 or mantissas.max() > _MANTISSA_MASK):
        raise ValueError("mantissas must lie in [0, 2**53)")
    return mantissas


def digit_matrix(mantissas: np.ndarray, block_len: int, depth: int) -> np.ndarray:
    """Expansion digits of p/2**53 for each mantissa p, as an int8 matrix.

    Column order is block-major: (k, s) maps to column (k-1)*block_len + s-1.
    """
    mantissas = _check_args(mantissas, block_len, depth)
    out = np.empty((mantissas.size, block_len * depth), dtype=np.int8)
    if _resolve_backend() == "numba":
        return _numba_funcs[0](mantissas, block_len, depth, out)
    p = mantissas.copy()
    col = 0
    for k in range(1, depth + 1):
        for _ in range(block_len):
            p *= k + 1
            out[:, col] = (p >> _MANTISSA_BITS).astype(np.int8)
            p &= _MANTISSA_MASK
            col += 1
    return out


def codeword_values(mantissas: np.ndarray, n_uses: int, depth: int) -> np.ndarray:
    """Unscaled channel symbols for each sample, as float64 [n_samples, n_uses].

    The digit-weight accumulation runs exactly in int64 (the largest possible
    sum is ~0.12*(depth+5)!, inside int64 for depth 16); only the final
    division by the lattice denominator rounds to float64, so values are
    accurate to one ulp — ample for distribution-level statistics.  The guard
    offsets beyond the truncation depth match the exact encoder.
    """
    from math import factorial

    mantissas = _check_args(mantissas, n_uses, depth)
    lattice = factorial(depth + 5)
    if 0.12 * lattice * 1.05 > 2**63:
        raise ValueError(f"depth {depth} overflows the int64 accumulation")
    weights = np.array([lattice // factorial(k + 3) for k in range(1, depth + 1)], dtype=np.int64)
    tail = np.int64(lattice // factorial(depth + 4) + 2 * (lattice // factorial(depth + 5)))
    out = np.empty((mantissas.size, n_uses), dtype=np.float64)
    if _resolve_backend() == "numba":
        return _numba_funcs[1](mantissas, n_uses, depth, weights, tail, float(lattice), out)
    acc = np.zeros((mantissas.size, n_uses), dtype=np.int64)
    p = mantissas.copy()
    for k in range(1, depth + 1):
        for n in range(n_uses):
            p *= k + 1
            acc[:, n] += ((p >> _MANTISSA_BITS) + 1) * weights[k - 1]
            p &= _MANTISSA_MASK
    scale = 6.0 / float(lattice)
    for n in range(n_uses):
        out[:, n] = (acc[:, n] + tail) * scale - 0.5
    return out
