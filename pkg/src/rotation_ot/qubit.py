"""Real-amplitude single-qubit states, rotations and measurement.

States are real 2-vectors ``(amp0, amp1)``.  ``R(phi)`` acts as the plane
rotation by ``phi / 2`` so that ``R(phi)|0> = cos(phi/2)|0> + sin(phi/2)|1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

NORM_TOL = 1e-12
# Born probabilities this close to 0 or 1 are snapped, so exact decodings
# never flip on a rounding residue.
SNAP_TOL = 1e-12


@dataclass(frozen=True)
class QubitState:
    amp0: float
    amp1: float

    def __post_init__(self):
        norm = self.amp0 * self.amp0 + self.amp1 * self.amp1
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not unit norm (|psi|^2 = {norm!r})")

    @classmethod
    def zero(cls) -> "QubitState":
        return cls(1.0, 0.0)

    @classmethod
    def one(cls) -> "QubitState":
        return cls(0.0, 1.0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1])

    def inner(self, other: "QubitState") -> float:
        return self.amp0 * other.amp0 + self.amp1 * other.amp1

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v)


@dataclass(frozen=True)
class Angle:
    """Rotation angle ``sign * s * theta_n + half_turns * pi`` kept symbolic.

    ``theta_n = pi / 2**(n-1)``.  Radians are only produced when a rotation
    matrix is built.
    """

    s: int
    n: int
    sign: int = 1
    half_turns: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("security parameter n must be >= 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def turns_of_pi(self) -> Fraction:
        """The angle divided by pi, as an exact rational."""
        return Fraction(self.sign * self.s, 2 ** (self.n - 1)) + self.half_turns

    @property
    def radians(self) -> float:
        return math.pi * float(self.turns_of_pi)

    def __neg__(self) -> "Angle":
        return Angle(self.s, self.n, -self.sign, -self.half_turns)


AngleLike = Union[Angle, float]


def theta(n: int) -> float:
    """Angle quantum ``pi / 2**(n-1)``."""
    return math.pi / 2 ** (n - 1)


@lru_cache(maxsize=65536)
def _cos_sin_pi(num: int, den: int) -> tuple[float, float]:
    # cos/sin of pi*num/den (den even); quarter-turn multiples are exact.
    num %= 2 * den
    q, r = divmod(num, den // 2)
    if r == 0:
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[q]
    x = math.pi * num / den
    return math.cos(x), math.sin(x)


def half_angle_cos_sin(angle: AngleLike) -> tuple[float, float]:
    if isinstance(angle, Angle):
        # half angle / pi = (sign*s + half_turns*2**(n-1)) / 2**n
        num = angle.sign * angle.s + angle.half_turns * 2 ** (angle.n - 1)
        return _cos_sin_pi(num, 2**angle.n)
    return math.cos(angle / 2), math.sin(angle / 2)


def rotate(state: QubitState, angle: AngleLike) -> QubitState:
    """Apply ``R(angle)``: the plane rotation by half the angle."""
    c, s = half_angle_cos_sin(angle)
    a0, a1 = state.amp0, state.amp1
    return QubitState(c * a0 - s * a1, s * a0 + c * a1)


def check_key_entry(s: int, n: int) -> None:
    if n < 1:
        raise ValueError("security parameter n must be >= 1")
    if not 0 <= s < 2**n:
        raise ValueError(f"key entry {s} outside [0, 2**{n})")


@lru_cache(maxsize=65536)
def encode_bit(m: int, s: int, a: int, n: int) -> QubitState:
    """``R(m*pi + (-1)**a * s*theta_n)|0>``."""
    check_key_entry(s, n)
    if m not in (0, 1) or a not in (0, 1):
        raise ValueError("m and a must be bits")
    return rotate(QubitState.zero(), Angle(s, n, sign=-1 if a else 1, half_turns=m))


def born_zero_probability(state: QubitState) -> float:
    p0 = state.amp0 * state.amp0
    if p0 < SNAP_TOL:
        return 0.0
    if p0 > 1.0 - SNAP_TOL:
        return 1.0
    return p0


def measure_computational(state: QubitState, rng: np.random.Generator) -> int:
    """Born-rule measurement in {|0>, |1>}; consumes exactly one uniform draw."""
    return 0 if rng.random() < born_zero_probability(state) else 1


def measure_in_basis(state: QubitState, basis0: QubitState, rng: np.random.Generator) -> int:
    """Projective measurement onto ``{basis0, basis0-perp}``; 0 means basis0."""
    c = basis0.inner(state)
    # Rotating basis0 onto |0> leaves amp0 = <basis0|state>.
    p0 = c * c
    p0 = 0.0 if p0 < SNAP_TOL else 1.0 if p0 > 1.0 - SNAP_TOL else p0
    return 0 if rng.random() < p0 else 1


@dataclass(frozen=True, eq=False)
class DensityMatrix2:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("density matrix must be 2x2")
        if abs(np.trace(m) - 1.0) > NORM_TOL:
            raise ValueError("density matrix trace must be 1")
        if abs(m[0, 1] - m[1, 0]) > NORM_TOL:
            raise ValueError("density matrix must be symmetric")
        if np.linalg.eigvalsh(m).min() < -NORM_TOL:
            raise ValueError("density matrix must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def allclose(self, other, atol: float = NORM_TOL) -> bool:
        other = other.matrix if isinstance(other, DensityMatrix2) else np.asarray(other)
        return bool(np.allclose(self.matrix, other, rtol=0.0, atol=atol))


def density_of_ensemble(states: Iterable[tuple[QubitState, float]]) -> DensityMatrix2:
    states = list(states)
    total = sum(p for _, p in states)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"ensemble probabilities sum to {total}, not 1")
    rho = np.zeros((2, 2))
    for psi, p in states:
        if p < 0:
            raise ValueError("negative ensemble weight")
        rho += p * psi.projector()
    return DensityMatrix2(rho)


def bit_mixture(m: int, s: int, n: int) -> DensityMatrix2:
    """Encoding of bit ``m`` under key entry ``s``, averaged over the direction."""
    return density_of_ensemble([(encode_bit(m, s, 0, n), 0.5), (encode_bit(m, s, 1, n), 0.5)])


def helstrom_probability(s: int, n: int) -> float:
    """Optimal probability of telling ``bit_mixture(0, s, n)`` from ``bit_mixture(1, s, n)``."""
    check_key_entry(s, n)
    c, _ = _cos_sin_pi(2 * s, 2**n)
    return 0.5 * (1.0 + abs(c))
