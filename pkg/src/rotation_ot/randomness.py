"""Randomness battery Bob runs on a revealed key before decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import stats

from .bits import Bits, BitsLike, as_bits

DEFAULT_ALPHA = 0.01
DEFAULT_SYMBOL_WIDTH = 4
MIN_SERIAL_BITS = 100
MIN_EXPECTED_PER_BIN = 5


@dataclass(frozen=True)
class RandomnessVerdict:
    chi_square_statistic: float
    chi_square_pass: bool
    serial_correlation: float
    serial_pass: bool
    alpha: float
    symbol_width: int = DEFAULT_SYMBOL_WIDTH

    @property
    def overall_pass(self) -> bool:
        return self.chi_square_pass and self.serial_pass


def key_to_bits(values: Sequence[int], n: int) -> Bits:
    """Concatenate each key entry as an n-bit big-endian number."""
    v = np.asarray(values, dtype=np.int64).reshape(-1)
    if v.size and (v.min() < 0 or v.max() >= 2**n):
        raise ValueError(f"key entries do not fit in {n} bits")
    bits = (v[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return tuple(bits.reshape(-1).tolist())


def bits_to_key(bits: BitsLike, n: int) -> tuple[int, ...]:
    bits = as_bits(bits)
    if len(bits) % n:
        raise ValueError(f"bit length {len(bits)} is not a multiple of n={n}")
    return tuple(
        int("".join(map(str, bits[i : i + n])), 2) for i in range(0, len(bits), n)
    )


@lru_cache(maxsize=None)
def _chi2_critical(df: int, alpha: float) -> float:
    return float(stats.chi2.isf(alpha, df))


@lru_cache(maxsize=None)
def _z_critical(alpha: float) -> float:
    return float(stats.norm.isf(alpha / 2))


def _symbol_counts(bits: Bits, width: int) -> np.ndarray:
    n_symbols = len(bits) // width
    x = np.array(bits[: n_symbols * width], dtype=np.int64).reshape(n_symbols, width)
    symbols = x @ (1 << np.arange(width - 1, -1, -1))
    return np.bincount(symbols, minlength=2**width)


def chi_square_test(
    bits: BitsLike, symbol_width: int = DEFAULT_SYMBOL_WIDTH, alpha: float = DEFAULT_ALPHA
) -> tuple[float, bool]:
    """Goodness of fit of non-overlapping ``symbol_width``-bit symbols to uniform.

    Trailing bits that do not fill a symbol are dropped.
    """
    bits = as_bits(bits)
    if symbol_width < 1:
        raise ValueError("symbol width must be >= 1")
    bins = 2**symbol_width
    n_symbols = len(bits) // symbol_width
    expected = n_symbols / bins
    if expected < MIN_EXPECTED_PER_BIN:
        raise ValueError(
            f"{len(bits)} bits give {expected:.2f} expected counts per bin; "
            f"need >= {MIN_EXPECTED_PER_BIN}"
        )
    counts = _symbol_counts(bits, symbol_width)
    statistic = float(((counts - expected) ** 2).sum() / expected)
    return statistic, statistic <= _chi2_critical(bins - 1, alpha)


def serial_correlation_test(
    bits: BitsLike, alpha: float = DEFAULT_ALPHA, min_length: int = MIN_SERIAL_BITS
) -> tuple[float, bool]:
    """Lag-1 correlation; passes iff ``|r| <= z_{alpha/2} / sqrt(N)``.

    A sequence with no variance gives ``nan`` and fails.
    """
    bits = as_bits(bits)
    if len(bits) < min_length:
        raise ValueError(f"serial correlation needs >= {min_length} bits, got {len(bits)}")
    x = np.array(bits, dtype=float)
    a, b = x[:-1], x[1:]
    if a.std() == 0 or b.std() == 0:
        return math.nan, False
    r = float(np.corrcoef(a, b)[0, 1])
    return r, abs(r) <= _z_critical(alpha) / math.sqrt(len(bits))


def widest_symbol(n_bits: int, max_width: int = DEFAULT_SYMBOL_WIDTH) -> int:
    """Largest width <= max_width that keeps >= 5 expected counts per bin."""
    for width in range(max_width, 0, -1):
        if (n_bits // width) / 2**width >= MIN_EXPECTED_PER_BIN:
            return width
    raise ValueError(f"{n_bits} bits are too few for a chi-square test")


def run_battery(
    bits: BitsLike,
    alpha: float = DEFAULT_ALPHA,
    max_symbol_width: int = DEFAULT_SYMBOL_WIDTH,
    min_serial_length: int = MIN_SERIAL_BITS,
) -> RandomnessVerdict:
    bits = as_bits(bits)
    width = widest_symbol(len(bits), max_symbol_width)
    chi, chi_ok = chi_square_test(bits, width, alpha)
    r, serial_ok = serial_correlation_test(bits, alpha, min_serial_length)
    return RandomnessVerdict(chi, chi_ok, r, serial_ok, alpha, width)
