"""Monte-Carlo runs of the prepare-and-measure protocol with finite-count certification.

Randomness: rounds are produced in chunks of 2**16. Chunk ``c`` uses
``numpy.random.Generator(PCG64(splitmix64(seed ^ c)))`` and draws, in this
order, ``a`` (integers in [0, 2**n)), ``y`` (integers in [0, n)) and ``u``
(doubles in [0, 1)); the outcome is ``b = 0`` iff ``u < E[a, y]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ._seeding import derive_seed
from .bloch import DomainError
from .certifier import POSITIVITY_MARGIN, CertifierConfig, guessing_probability
from .classical import classical_max_T
from .strategy import Strategy, check_n, probability_table, sign_matrix

CHUNK_ROUNDS = 2**16


class InsufficientStatistics(ValueError):
    """Some (a, y) setting was never sampled."""


@dataclass(frozen=True, eq=False)
class Transcript:
    n: int
    rounds: int
    counts: np.ndarray  # N[a, y, b]
    seed: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (2**self.n, self.n, 2):
            raise DomainError(f"counts shape {counts.shape} does not match n={self.n}")
        if np.any(counts < 0) or int(counts.sum()) != self.rounds:
            raise DomainError("counts must be nonnegative and sum to rounds")
        object.__setattr__(self, "counts", counts)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rounds": self.rounds,
            "seed": self.seed,
            "counts": self.counts.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        try:
            n = check_n(data["n"])
            counts = np.asarray(data["counts"], dtype=np.int64).reshape(2**n, n, 2)
            return cls(n, int(data["rounds"]), counts, int(data["seed"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed transcript: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed transcript: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CertifiedRate:
    t_hat: float
    t_std_err: float
    confidence: float
    t_lower: float
    h_min_rate: float


def _chunk_counts(E: np.ndarray, n: int, size: int, chunk_seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(chunk_seed))
    a = rng.integers(0, 2**n, size=size)
    y = rng.integers(0, n, size=size)
    u = rng.random(size)
    b = (u >= E[a, y]).astype(np.int64)
    flat = (a * n + y) * 2 + b
    return np.bincount(flat, minlength=2**n * n * 2).reshape(2**n, n, 2)


def run_protocol(strategy: Strategy, rounds: int, seed: int) -> Transcript:
    """Simulate ``rounds`` honest rounds with uniform inputs (a, y)."""
    if isinstance(rounds, bool) or int(rounds) != rounds or rounds < 1:
        raise DomainError(f"rounds must be a positive integer, got {rounds!r}")
    rounds = int(rounds)
    n = strategy.n
    E = probability_table(strategy).E
    counts = np.zeros((2**n, n, 2), dtype=np.int64)
    for c, start in enumerate(range(0, rounds, CHUNK_ROUNDS)):
        size = min(CHUNK_ROUNDS, rounds - start)
        counts += _chunk_counts(E, n, size, derive_seed(seed, c))
    return Transcript(n, rounds, counts, seed)


def estimate_witness(transcript: Transcript) -> tuple[float, float]:
    """Plug-in estimate of T and its binomial standard error."""
    N = transcript.counts
    totals = N.sum(axis=2)
    empty = np.argwhere(totals == 0)
    if len(empty):
        a, y = empty[0]
        raise InsufficientStatistics(f"no rounds recorded for input a={a}, measurement y={y + 1}")
    E_hat = N[:, :, 0] / totals
    t_hat = float(np.sum(sign_matrix(transcript.n) * E_hat))
    var = float(np.sum(E_hat * (1.0 - E_hat) / totals))
    return t_hat, math.sqrt(var)


def certify_rate(t_hat: float, t_std_err: float, n: int, confidence: float,
                 config: CertifierConfig | None = None) -> CertifiedRate:
    """One-sided normal-approximation lower bound on T, converted to bits per round."""
    if not 0.5 <= confidence < 1.0:
        raise DomainError(f"confidence must lie in [0.5, 1), got {confidence}")
    if t_std_err < 0:
        raise DomainError("standard error must be nonnegative")
    z = float(norm.ppf(confidence))
    t_lower = t_hat - z * t_std_err if z > 0 else t_hat
    rate = 0.0
    if t_lower > classical_max_T(n).t_max:
        point = guessing_probability(n, t_lower, config)
        if point.feasible and point.p_guess <= 1.0 - POSITIVITY_MARGIN:
            rate = point.h_min
    return CertifiedRate(t_hat, t_std_err, confidence, t_lower, rate)


def load_transcript(path) -> Transcript:
    with open(path, encoding="utf-8") as fh:
        return Transcript.from_json(fh.read())
