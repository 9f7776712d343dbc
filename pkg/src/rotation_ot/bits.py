"""Bit-string helpers.  Bit strings are tuples of 0/1 ints."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

Bits = tuple[int, ...]
BitsLike = Union[str, Sequence[int], np.ndarray]


def as_bits(value: BitsLike) -> Bits:
    if isinstance(value, str):
        if set(value) - {"0", "1"}:
            raise ValueError(f"not a bit string: {value!r}")
        return tuple(int(c) for c in value)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    out = value if type(value) is tuple else tuple(value)
    if not set(out) <= {0, 1}:
        raise ValueError("bit values must be 0 or 1")
    return tuple(int(b) for b in out) if any(type(b) is not int for b in out) else out


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def parity(bits: Sequence[int]) -> int:
    return sum(bits) & 1


def random_bits(length: int, rng: np.random.Generator) -> Bits:
    return tuple(int(b) for b in rng.integers(0, 2, size=length))


def bits_to_hex(bits: Sequence[int]) -> str:
    """MSB-first hex, zero-padded to ceil(len/4) digits."""
    width = (len(bits) + 3) // 4
    value = int(bits_to_str(bits), 2) if bits else 0
    return format(value, f"0{width}x") if width else ""


def hex_to_bits(text: str, length: int) -> Bits:
    value = int(text, 16) if text else 0
    if value >> length:
        raise ValueError(f"hex value {text!r} does not fit in {length} bits")
    return tuple((value >> (length - 1 - i)) & 1 for i in range(length))
