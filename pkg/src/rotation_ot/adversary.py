"""Cheating strategies for Bob and Alice and the bounds they run into."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .bits import Bits, BitsLike, as_bits
from .hashing import eval_hash
from .protocol import (
    CipherState,
    OpeningMessage,
    ProtocolError,
    SecretKey,
    SessionParams,
)
from .qubit import (
    QubitState,
    bit_mixture,
    encode_bit,
    measure_computational,
    measure_in_basis,
)


def _message_length(cipher: CipherState) -> int:
    if len(cipher) % 3:
        raise ProtocolError(f"register of {len(cipher)} qubits is not 3k/2 long")
    return 2 * len(cipher) // 3


def bob_guess_before_opening(cipher: CipherState, rng: np.random.Generator) -> Bits:
    """Measure the message qubits in the computational basis and read them off."""
    k = _message_length(cipher)
    return tuple(measure_computational(q, rng) for q in cipher.qubits[:k])


@lru_cache(maxsize=4096)
def helstrom_basis(s: int, n: int) -> tuple[QubitState, bool]:
    """Eigenvector of ``rho_0(s) - rho_1(s)`` with the larger eigenvalue.

    Returns the vector and whether that eigenvalue is positive; when it is
    not, the difference vanishes and every measurement is equally good.
    """
    delta = bit_mixture(0, s, n).matrix - bit_mixture(1, s, n).matrix
    a, b, c = delta[0, 0], delta[0, 1], delta[1, 1]
    t = 0.5 * math.atan2(2.0 * b, a - c)
    top = 0.5 * (a + c) + math.hypot(0.5 * (a - c), b)
    return QubitState(math.cos(t), math.sin(t)), top > 1e-15


def helstrom_guess(q: QubitState, s: int, n: int, rng: np.random.Generator) -> int:
    basis, _ = helstrom_basis(s, n)
    return measure_in_basis(q, basis, rng)


def bob_helstrom_after_opening(
    cipher: CipherState, opening: OpeningMessage, rng: np.random.Generator
) -> Bits:
    """Per-qubit Helstrom measurement using the revealed key, without a.

    Returns a guess for every qubit of the register.
    """
    if len(cipher) != len(opening.key):
        raise ProtocolError(f"cipher has {len(cipher)} qubits but key has {len(opening.key)}")
    n = opening.n
    return tuple(helstrom_guess(q, s, n, rng) for q, s in zip(cipher.qubits, opening.key.values))


@dataclass(frozen=True)
class CheatingAliceState:
    qubits: tuple[QubitState, ...]
    message: Bits
    key: SecretKey

    @property
    def cipher(self) -> CipherState:
        return CipherState(self.qubits)


@lru_cache(maxsize=65536)
def cheating_qubit(m: int, s: int, n: int) -> QubitState:
    """Top eigenvector of ``P_+ + P_-`` for bit ``m`` under key entry ``s``."""
    plus = encode_bit(m, s, 0, n)
    minus = encode_bit(m, s, 1, n)
    sign = 1.0 if plus.inner(minus) >= 0 else -1.0
    v0 = plus.amp0 + sign * minus.amp0
    v1 = plus.amp1 + sign * minus.amp1
    norm = math.hypot(v0, v1)
    return QubitState(v0 / norm, v1 / norm)


def build_cheating_state(
    m: BitsLike, key: SecretKey, params: SessionParams
) -> CheatingAliceState:
    message = as_bits(m)
    if len(message) != params.k:
        raise ProtocolError(f"message must have k={params.k} bits")
    if len(key) != params.register_length or key.n != params.n:
        raise ProtocolError("key does not match the session parameters")
    bits = message + eval_hash(params.hash, message)
    qubits = tuple(cheating_qubit(b, s, key.n) for b, s in zip(bits, key.values))
    return CheatingAliceState(qubits, message, key)


def cheating_success_probability(state: CheatingAliceState, params: SessionParams) -> float:
    """Exact probability that honest Bob decodes the whole register as intended.

    This is the average over Bob's direction of the squared overlap of the
    cheating state with each direction's encoding.
    """
    bits = state.message + eval_hash(params.hash, state.message)
    n = state.key.n
    plus = minus = 1.0
    for q, b, s in zip(state.qubits, bits, state.key.values):
        plus *= encode_bit(b, s, 0, n).inner(q) ** 2
        minus *= encode_bit(b, s, 1, n).inner(q) ** 2
    return 0.5 * (plus + minus)


@dataclass(frozen=True)
class CriticalAngleCount:
    l: int
    total: int

    def __post_init__(self):
        if not 0 <= self.l <= self.total:
            raise ValueError("critical count out of range")


def is_critical(s: int, n: int) -> bool:
    """Whether ``s*theta_n`` lies in [pi/8, 3pi/8] modulo pi, endpoints included."""
    half = 2 ** (n - 1)
    r = s % half  # angle / pi = s / half, reduced mod 1
    return half <= 8 * r <= 3 * half


def critical_mask(values: np.ndarray, n: int) -> np.ndarray:
    half = 2 ** (n - 1)
    r8 = 8 * (np.asarray(values, dtype=np.int64) % half)
    return (r8 >= half) & (r8 <= 3 * half)


def critical_probability(n: int) -> float:
    """Exact chance that a uniform key entry is critical."""
    return float(critical_mask(np.arange(2**n), n).mean())


def count_critical_angles(key: SecretKey) -> CriticalAngleCount:
    return CriticalAngleCount(int(critical_mask(np.array(key.values), key.n).sum()), len(key))


def obliviousness_bound(l: int) -> float:
    if l < 0:
        raise ValueError("l must be >= 0")
    return 0.5 * (1.0 + math.cos(math.pi / 8) ** (2 * l))


@dataclass(frozen=True)
class LStatistics:
    k: int
    n: int
    samples: int
    mean: float
    variance: float
    in_interval_fraction: float
    interval: tuple[float, float]
    critical_probability: float


def l_interval(k: int) -> tuple[float, float]:
    return (k - 3 * math.sqrt(k)) / 4, (k + 3 * math.sqrt(k)) / 4


def l_distribution_check(
    k: int, samples: int, rng: np.random.Generator, n: int = 16
) -> LStatistics:
    """Count critical angles over ``samples`` uniform keys of length ``k``."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    ls = np.array(
        [count_critical_angles(SecretKey.random(k, n, rng)).l for _ in range(samples)],
        dtype=float,
    )
    lo, hi = l_interval(k)
    return LStatistics(
        k=k,
        n=n,
        samples=samples,
        mean=float(ls.mean()),
        variance=float(ls.var(ddof=1)),
        in_interval_fraction=float(((ls >= lo) & (ls <= hi)).mean()),
        interval=(lo, hi),
        critical_probability=critical_probability(n),
    )


def random_register(length: int, rng: np.random.Generator) -> CipherState:
    """Uniformly random real qubit states."""
    angles = rng.uniform(0.0, 2 * math.pi, size=length)
    return CipherState(tuple(QubitState(math.cos(t), math.sin(t)) for t in angles))


def cheating_alice_prepare(
    m: BitsLike,
    params: SessionParams,
    rng: np.random.Generator,
    *,
    key: Optional[SecretKey] = None,
    cheat_probability: float = 0.5,
) -> tuple[CipherState, SecretKey, bool]:
    """Send the cheating state with ``cheat_probability``, a random state otherwise.

    Returns the register, the key Alice will open with, and whether she cheated.
    """
    if key is None:
        key = SecretKey.random(params.register_length, params.n, rng)
    cheated = bool(rng.random() < cheat_probability)
    if cheated:
        return build_cheating_state(m, key, params).cipher, key, True
    return random_register(params.register_length, rng), key, False
