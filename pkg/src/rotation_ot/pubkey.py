"""Rotation-based public-key encryption underlying the OT protocol."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bits import Bits, BitsLike, as_bits
from .protocol import CipherState, ProtocolError, SecretKey
from .qubit import Angle, QubitState, measure_computational, rotate


class KeyReuseError(RuntimeError):
    pass


@dataclass(eq=False)
class PublicKey:
    """Qubits ``R(s_i theta_n)|0>``.  Each public key encrypts one message only."""

    qubits: tuple[QubitState, ...]
    n: int
    spent: bool = field(default=False, repr=False)

    def __len__(self):
        return len(self.qubits)


def keygen(
    k: int,
    n: int,
    rng: np.random.Generator,
    *,
    values: Optional[Sequence[int]] = None,
) -> tuple[SecretKey, PublicKey]:
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    secret = SecretKey(tuple(values), n) if values is not None else SecretKey.random(k, n, rng)
    if len(secret) != k:
        raise ValueError(f"forced key has {len(secret)} entries, expected {k}")
    public = PublicKey(tuple(rotate(QubitState.zero(), Angle(s, n)) for s in secret.values), n)
    return secret, public


def encrypt(m: BitsLike, pub: PublicKey) -> CipherState:
    """Rotate qubit i by ``m_i * pi``; short messages are zero-padded on the right."""
    message = as_bits(m)
    if len(message) > len(pub):
        raise ValueError(f"message of {len(message)} bits exceeds key length {len(pub)}")
    if pub.spent:
        raise KeyReuseError("public key already used for an encryption")
    pub.spent = True
    padded = message + (0,) * (len(pub) - len(message))
    return CipherState(
        tuple(rotate(q, Angle(0, pub.n, half_turns=b)) for q, b in zip(pub.qubits, padded))
    )


def decrypt(
    cipher: CipherState,
    secret: SecretKey,
    rng: np.random.Generator,
    length: Optional[int] = None,
) -> Bits:
    """Undo the key rotations and measure; ``length`` trims the padding."""
    if len(cipher) != len(secret):
        raise ProtocolError(f"cipher has {len(cipher)} qubits but key has {len(secret)}")
    bits = tuple(
        measure_computational(rotate(q, Angle(s, secret.n, sign=-1)), rng)
        for q, s in zip(cipher.qubits, secret.values)
    )
    return bits if length is None else bits[:length]
