"""Device strategies, their probability tables, and the QRAC figures of merit.

Bit convention: for an input index ``a`` in ``0..2**n - 1``, bit ``a_y``
(``y = 1..n``) is the y-th most significant bit of ``a``. In code ``y`` is
zero-based, so column ``y`` of a table belongs to ``a_{y+1}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .bloch import (
    DomainError,
    Projector,
    QubitState,
    projector_from_angles,
    state_from_angles,
)

MAX_N = 16
BIT_CONVENTION = "a_y is the y-th most significant bit of a (y=1 is the MSB)"


def check_n(n: int, upper: int = MAX_N) -> int:
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= upper:
        raise DomainError(f"n must be an integer in [1, {upper}], got {n!r}")
    return int(n)


@lru_cache(maxsize=None)
def sign_matrix(n: int) -> np.ndarray:
    """(-1)**a_y as a (2**n, n) array of +-1.0."""
    a = np.arange(2**n)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    bits = (a >> shifts) & 1
    out = 1.0 - 2.0 * bits
    out.setflags(write=False)
    return out


def input_bits(n: int) -> np.ndarray:
    return ((1.0 - sign_matrix(n)) / 2).astype(np.int8)


@dataclass(frozen=True)
class Strategy:
    n: int
    states: tuple[QubitState, ...]
    measurements: tuple[Projector, ...]

    def __post_init__(self):
        check_n(self.n)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if len(self.states) != 2**self.n:
            raise DomainError(f"expected {2**self.n} states, got {len(self.states)}")
        if len(self.measurements) != self.n:
            raise DomainError(f"expected {self.n} measurements, got {len(self.measurements)}")

    @classmethod
    def from_bloch(cls, n: int, state_vecs, measurement_vecs) -> "Strategy":
        return cls(
            n,
            tuple(QubitState.from_bloch(v) for v in np.asarray(state_vecs)),
            tuple(Projector.from_bloch(v) for v in np.asarray(measurement_vecs)),
        )

    @cached_property
    def state_vectors(self) -> np.ndarray:
        return np.array([s.bloch for s in self.states])

    @cached_property
    def measurement_vectors(self) -> np.ndarray:
        return np.array([m.bloch for m in self.measurements])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bit_convention": BIT_CONVENTION,
            "states": [[s.theta, s.eta] for s in self.states],
            "measurements": [[m.psi, m.omega] for m in self.measurements],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Strategy":
        try:
            n = data["n"]
            states = tuple(state_from_angles(t, e) for t, e in data["states"])
            meas = tuple(projector_from_angles(p, w) for p, w in data["measurements"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed strategy data: {exc}") from exc
        return cls(n, states, meas)

    def to_json(self) -> str:
        # repr() of a float is the shortest round-tripping form (17 sig. digits max)
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Strategy":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """``E[a, y] = P(b=0 | a, y)``; ``P(b=1 | a, y)`` is always ``1 - E``."""

    n: int
    E: np.ndarray

    def __post_init__(self):
        E = np.array(self.E, dtype=float)
        if E.shape != (2**self.n, self.n):
            raise DomainError(f"table shape {E.shape} does not match n={self.n}")
        if np.any(E < -1e-12) or np.any(E > 1 + 1e-12):
            raise DomainError("table entries must lie in [0, 1]")
        E = np.clip(E, 0.0, 1.0)
        E.setflags(write=False)
        object.__setattr__(self, "E", E)

    @property
    def max_probability(self) -> float:
        return float(max(self.E.max(), 1.0 - self.E.min()))


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic classical-bit code.

    ``encoder[a]`` is the bit sent for input ``a``; ``decoders[y]`` is the pair
    ``(D(0), D(1))`` giving the guess for each received bit.
    """

    n: int
    encoder: tuple[int, ...]
    decoders: tuple[tuple[int, int], ...]

    def __post_init__(self):
        check_n(self.n)
        object.__setattr__(self, "encoder", tuple(int(c) for c in self.encoder))
        object.__setattr__(self, "decoders", tuple(tuple(int(b) for b in d) for d in self.decoders))
        if len(self.encoder) != 2**self.n or any(c not in (0, 1) for c in self.encoder):
            raise DomainError("encoder must map every input to a bit")
        if len(self.decoders) != self.n or any(
            len(d) != 2 or any(b not in (0, 1) for b in d) for d in self.decoders
        ):
            raise DomainError("need n decoders, each a pair of bits")


def probability_table(strategy: Strategy) -> ProbabilityTable:
    dots = strategy.state_vectors @ strategy.measurement_vectors.T
    return ProbabilityTable(strategy.n, 0.5 * (1.0 + np.clip(dots, -1.0, 1.0)))


def classical_table(cs: ClassicalStrategy) -> ProbabilityTable:
    enc = np.array(cs.encoder)
    dec = np.array(cs.decoders)  # (n, 2)
    guesses = dec[:, enc].T  # (2**n, n)
    return ProbabilityTable(cs.n, (guesses == 0).astype(float))


def witness_T(table: ProbabilityTable) -> float:
    return float(np.sum(sign_matrix(table.n) * table.E))


def average_success(table: ProbabilityTable) -> float:
    n = table.n
    correct = np.where(input_bits(n) == 0, table.E, 1.0 - table.E)
    return float(correct.sum() / (n * 2**n))


def min_entropy(table: ProbabilityTable) -> float:
    """-log2 of the largest outcome probability over (b, a, y)."""
    return abs(-math.log2(table.max_probability))


def witness_range(n: int) -> float:
    """Largest algebraically possible |T| for n bits."""
    return n * 2 ** (n - 1)


def load_strategy(path) -> Strategy:
    with open(path, encoding="utf-8") as fh:
        return Strategy.from_json(fh.read())


def random_strategy(n: int, rng: np.random.Generator) -> Strategy:
    """States and measurements drawn uniformly from the sphere."""
    s = rng.normal(size=(2**n, 3))
    m = rng.normal(size=(n, 3))
    return Strategy.from_bloch(n, s / np.linalg.norm(s, axis=1)[:, None],
                               m / np.linalg.norm(m, axis=1)[:, None])

