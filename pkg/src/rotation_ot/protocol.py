"""Honest Alice and Bob for bit-string OT and its single-bit parity wrapper."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .bits import Bits, BitsLike, as_bits, bits_to_str, parity, random_bits
from .hashing import HashFunctionGF2, eval_hash, sample_hash
from .qubit import Angle, QubitState, check_key_entry, encode_bit, measure_computational, rotate
from .randomness import RandomnessVerdict, key_to_bits, run_battery

MIN_K = 8
# Step-4 battery level inside the protocol; see README for why it is not 0.01.
KEY_CHECK_ALPHA = 1e-6
KEY_CHECK_MIN_SERIAL_BITS = 12


class ProtocolError(ValueError):
    """A message or state does not fit the session it is used in."""


@dataclass(frozen=True)
class SessionParams:
    k: int
    n: int
    hash: HashFunctionGF2
    key_check_alpha: float = KEY_CHECK_ALPHA

    def __post_init__(self):
        if self.k < MIN_K or self.k % 2:
            raise ValueError(f"k must be even and >= {MIN_K}, got {self.k}")
        if self.n < 1:
            raise ValueError("security parameter n must be >= 1")
        if self.hash.k != self.k:
            raise ValueError(f"hash takes {self.hash.k} bits but k = {self.k}")
        if not 0 < self.key_check_alpha < 1:
            raise ValueError("key_check_alpha must be in (0, 1)")

    @classmethod
    def sample(cls, k: int, n: int, rng: np.random.Generator, **kwargs) -> "SessionParams":
        return cls(k, n, sample_hash(k, rng), **kwargs)

    @property
    def theta_n(self) -> float:
        return math.pi / 2 ** (self.n - 1)

    @property
    def register_length(self) -> int:
        return 3 * self.k // 2

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "hash": self.hash.to_dict(),
            "key_check_alpha": self.key_check_alpha,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionParams":
        return cls(
            int(data["k"]),
            int(data["n"]),
            HashFunctionGF2.from_dict(data["hash"]),
            float(data.get("key_check_alpha", KEY_CHECK_ALPHA)),
        )


@dataclass(frozen=True)
class SecretKey:
    values: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(s) for s in self.values))
        for s in self.values:
            check_key_entry(s, self.n)

    def __len__(self):
        return len(self.values)

    @classmethod
    def random(cls, length: int, n: int, rng: np.random.Generator) -> "SecretKey":
        return cls(tuple(int(s) for s in rng.integers(0, 2**n, size=length)), n)

    def to_bits(self) -> Bits:
        return key_to_bits(self.values, self.n)


@dataclass(frozen=True)
class CipherState:
    qubits: tuple[QubitState, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))

    def __len__(self):
        return len(self.qubits)

    def to_list(self) -> list[list[float]]:
        return [[q.amp0, q.amp1] for q in self.qubits]

    @classmethod
    def from_list(cls, pairs: Sequence[Sequence[float]]) -> "CipherState":
        return cls(tuple(QubitState(float(a), float(b)) for a, b in pairs))


@dataclass(frozen=True)
class AliceRecord:
    a: int
    key: SecretKey
    message: Bits
    digest: Bits


@dataclass(frozen=True)
class OpeningMessage:
    """What Alice reveals at opening.  There is no field for the direction bit."""

    key: SecretKey
    n: int

    def __post_init__(self):
        if self.key.n != self.n:
            raise ValueError("opening n disagrees with the key's n")

    def to_dict(self) -> dict:
        return {"n": self.n, "key": list(self.key.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "OpeningMessage":
        n = int(data["n"])
        return cls(SecretKey(tuple(data["key"]), n), n)


class RejectReason(str, enum.Enum):
    KEY_NOT_RANDOM = "key-not-random"
    DIGEST_MISMATCH = "digest-mismatch"


@dataclass(frozen=True)
class Received:
    message: Bits

    def to_dict(self) -> dict:
        return {"outcome": "received", "message": bits_to_str(self.message)}


@dataclass(frozen=True)
class Rejected:
    reason: RejectReason
    verdict: Optional[RandomnessVerdict] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {"outcome": "rejected", "reason": self.reason.value}


BobOutcome = Union[Received, Rejected]


def outcome_from_dict(data: dict) -> BobOutcome:
    if data["outcome"] == "received":
        return Received(as_bits(data["message"]))
    if data["outcome"] == "rejected":
        return Rejected(RejectReason(data["reason"]))
    raise ValueError(f"unknown outcome {data['outcome']!r}")


def encode_register(bits: Sequence[int], key: SecretKey, a: int) -> CipherState:
    if len(bits) != len(key):
        raise ProtocolError(f"{len(bits)} bits but key has {len(key)} entries")
    return CipherState(tuple(encode_bit(m, s, a, key.n) for m, s in zip(bits, key.values)))


def alice_transfer(
    message: BitsLike,
    params: SessionParams,
    rng: np.random.Generator,
    *,
    a: Optional[int] = None,
    key: Optional[SecretKey] = None,
) -> tuple[CipherState, AliceRecord]:
    """Transferring phase.  ``a`` and ``key`` may be forced for testing."""
    message = as_bits(message)
    if len(message) != params.k:
        raise ProtocolError(f"message must have k={params.k} bits, got {len(message)}")
    if a is None:
        a = int(rng.integers(0, 2))
    if key is None:
        key = SecretKey.random(params.register_length, params.n, rng)
    if len(key) != params.register_length or key.n != params.n:
        raise ProtocolError("key does not match the session parameters")
    digest = eval_hash(params.hash, message)
    cipher = encode_register(message + digest, key, a)
    return cipher, AliceRecord(a, key, message, digest)


def alice_open(record: AliceRecord) -> OpeningMessage:
    return OpeningMessage(record.key, record.key.n)


def bob_decode(
    cipher: CipherState, key: SecretKey, a_prime: int, rng: np.random.Generator
) -> Bits:
    """Undo the rotations in direction ``a_prime`` and measure every qubit."""
    if len(cipher) != len(key):
        raise ProtocolError(f"cipher has {len(cipher)} qubits but key has {len(key)} entries")
    sign = -1 if a_prime else 1
    return tuple(
        measure_computational(rotate(q, Angle(s, key.n, sign)), rng)
        for q, s in zip(cipher.qubits, key.values)
    )


def check_key(key: SecretKey, params: SessionParams) -> RandomnessVerdict:
    return run_battery(
        key.to_bits(),
        alpha=params.key_check_alpha,
        min_serial_length=KEY_CHECK_MIN_SERIAL_BITS,
    )


def bob_open(
    cipher: CipherState,
    opening: OpeningMessage,
    params: SessionParams,
    rng: np.random.Generator,
    *,
    a_prime: Optional[int] = None,
) -> BobOutcome:
    """Opening phase on Bob's side.  ``a_prime`` may be forced for testing."""
    if len(cipher) != params.register_length or len(opening.key) != params.register_length:
        raise ProtocolError(
            f"expected {params.register_length} qubits and key entries, "
            f"got {len(cipher)} and {len(opening.key)}"
        )
    if opening.n != params.n:
        raise ProtocolError("opening n disagrees with the session")
    verdict = check_key(opening.key, params)
    if not verdict.overall_pass:
        return Rejected(RejectReason.KEY_NOT_RANDOM, verdict)
    if a_prime is None:
        a_prime = int(rng.integers(0, 2))
    bits = bob_decode(cipher, opening.key, a_prime, rng)
    m, h = bits[: params.k], bits[params.k :]
    if eval_hash(params.hash, m) == h:
        return Received(m)
    return Rejected(RejectReason.DIGEST_MISMATCH)


def parity_message(b: int, k: int, rng: np.random.Generator) -> Bits:
    """Uniform k-bit string with parity ``b``."""
    if b not in (0, 1):
        raise ValueError("b must be a bit")
    head = random_bits(k - 1, rng)
    return head + (parity(head) ^ b,)


def single_bit_ot_alice(
    b: int, params: SessionParams, rng: np.random.Generator, **forced
) -> tuple[Bits, CipherState, AliceRecord]:
    message = parity_message(b, params.k, rng)
    cipher, record = alice_transfer(message, params, rng, **forced)
    return message, cipher, record


def single_bit_ot_bob(outcome: BobOutcome) -> Optional[int]:
    if isinstance(outcome, Received):
        return parity(outcome.message)
    return None
