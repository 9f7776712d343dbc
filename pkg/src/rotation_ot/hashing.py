"""Affine GF(2) universal hashing ``h(x) = A x + c`` from k bits to k/2 bits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import Bits, BitsLike, as_bits, bits_to_hex, hex_to_bits


def _check_k(k: int) -> None:
    if k < 2 or k % 2:
        raise ValueError(f"hash input length must be even and >= 2, got {k}")


@dataclass(frozen=True, eq=False)
class HashFunctionGF2:
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.uint8)
        offset = np.array(self.offset, dtype=np.uint8).reshape(-1)
        if matrix.ndim != 2:
            raise ValueError("hash matrix must be 2-D")
        rows, k = matrix.shape
        _check_k(k)
        if rows != k // 2 or offset.shape != (rows,):
            raise ValueError(f"hash matrix must be {k // 2}x{k} with a {k // 2}-bit offset")
        if matrix.max(initial=0) > 1 or offset.max(initial=0) > 1:
            raise ValueError("hash entries must be bits")
        matrix.setflags(write=False)
        offset.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", offset)

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def digest_length(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other):
        if not isinstance(other, HashFunctionGF2):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix) and np.array_equal(self.offset, other.offset)

    def __hash__(self):
        return hash((self.matrix.tobytes(), self.offset.tobytes(), self.k))

    def __call__(self, m: BitsLike) -> Bits:
        return eval_hash(self, m)

    def rank(self) -> int:
        """Rank of the matrix over GF(2)."""
        rows = [int("".join(map(str, r)), 2) for r in self.matrix]
        rank = 0
        for bit in reversed(range(self.k)):
            pivot = next((i for i in range(rank, len(rows)) if rows[i] >> bit & 1), None)
            if pivot is None:
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            for i in range(len(rows)):
                if i != rank and rows[i] >> bit & 1:
                    rows[i] ^= rows[rank]
            rank += 1
        return rank

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "matrix": [bits_to_hex(row.tolist()) for row in self.matrix],
            "offset": bits_to_hex(self.offset.tolist()),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HashFunctionGF2":
        k = int(data["k"])
        _check_k(k)
        rows = data["matrix"]
        if len(rows) != k // 2:
            raise ValueError("wrong number of hash matrix rows")
        return cls(
            np.array([hex_to_bits(r, k) for r in rows], dtype=np.uint8),
            np.array(hex_to_bits(data["offset"], k // 2), dtype=np.uint8),
        )


def sample_hash(k: int, rng: np.random.Generator) -> HashFunctionGF2:
    _check_k(k)
    matrix = rng.integers(0, 2, size=(k // 2, k), dtype=np.uint8)
    offset = rng.integers(0, 2, size=k // 2, dtype=np.uint8)
    return HashFunctionGF2(matrix, offset)


def eval_hash(h: HashFunctionGF2, m: BitsLike) -> Bits:
    bits = as_bits(m)
    if len(bits) != h.k:
        raise ValueError(f"hash expects {h.k} input bits, got {len(bits)}")
    x = np.array(bits, dtype=np.uint8)
    digest = (h.matrix.astype(np.int64) @ x + h.offset) & 1
    return tuple(int(b) for b in digest)


def digest_table(h: HashFunctionGF2) -> np.ndarray:
    """Digest of every input, as integers indexed by the input's integer value.

    Input bit 0 is the most significant bit of the index.
    """
    k = h.k
    inputs = (np.arange(2**k)[:, None] >> np.arange(k - 1, -1, -1)) & 1
    digests = (inputs @ h.matrix.T.astype(np.int64) + h.offset) & 1
    weights = 1 << np.arange(h.digest_length - 1, -1, -1)
    return digests @ weights


def collision_rate(h: HashFunctionGF2) -> float:
    """Fraction of unordered distinct input pairs that collide, by enumeration."""
    counts = np.bincount(digest_table(h), minlength=2**h.digest_length).astype(np.int64)
    pairs = (2**h.k) * (2**h.k - 1) // 2
    return float((counts * (counts - 1) // 2).sum() / pairs)
