"""Pure qubit states and rank-1 projectors on the Bloch sphere.

States are parameterized as ``cos(theta/2)|0> + exp(i eta) sin(theta/2)|1>`` and
projectors ``M^0 = |m><m|`` the same way with angles ``(psi, omega)``. Both carry
their Bloch unit vector, which is what every probability computation uses; the
2x2 complex matrices exist for cross-checking the Bloch formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
_ANGLE_SLOP = 1e-12
_POLE_EPS = 1e-24


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


def bloch_from_angles(polar: float, azimuth: float) -> np.ndarray:
    s = math.sin(polar)
    return np.array([s * math.cos(azimuth), s * math.sin(azimuth), math.cos(polar)])


def angles_from_bloch(vec) -> tuple[float, float]:
    """Inverse of :func:`bloch_from_angles`, canonical azimuth 0 at the poles."""
    x, y, z = (float(c) for c in vec)
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        raise DomainError("zero vector has no direction")
    x, y, z = x / norm, y / norm, z / norm
    polar = math.acos(max(-1.0, min(1.0, z)))
    if x * x + y * y < _POLE_EPS:
        return polar, 0.0
    return polar, math.atan2(y, x) % TWO_PI


def _canonical_angles(polar: float, azimuth: float, name: str) -> tuple[float, float]:
    polar = float(polar)
    azimuth = float(azimuth)
    if not (math.isfinite(polar) and math.isfinite(azimuth)):
        raise DomainError(f"{name} angles must be finite")
    if -_ANGLE_SLOP <= polar < 0.0:
        polar = 0.0
    elif math.pi < polar <= math.pi + _ANGLE_SLOP:
        polar = math.pi
    if not 0.0 <= polar <= math.pi:
        raise DomainError(f"{name} polar angle {polar!r} outside [0, pi]")
    azimuth = azimuth % TWO_PI
    if azimuth >= TWO_PI:  # x % 2pi can round up to 2pi for tiny negative x
        azimuth = 0.0
    if polar == 0.0 or polar == math.pi:
        azimuth = 0.0
    return polar, azimuth


@dataclass(frozen=True)
class QubitState:
    theta: float
    eta: float
    bloch: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_bloch(cls, vec) -> "QubitState":
        return state_from_angles(*angles_from_bloch(vec))

    def ket(self) -> np.ndarray:
        return np.array(
            [math.cos(self.theta / 2), np.exp(1j * self.eta) * math.sin(self.theta / 2)]
        )

    def density_matrix(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())


@dataclass(frozen=True)
class Projector:
    """The ``b = 0`` outcome of a binary projective measurement."""

    psi: float
    omega: float
    bloch: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_bloch(cls, vec) -> "Projector":
        return projector_from_angles(*angles_from_bloch(vec))

    def matrix(self, b: int = 0) -> np.ndarray:
        c2 = math.cos(self.psi / 2) ** 2
        s2 = math.sin(self.psi / 2) ** 2
        off = 0.5 * math.sin(self.psi)
        m0 = np.array(
            [[c2, off * np.exp(-1j * self.omega)], [off * np.exp(1j * self.omega), s2]]
        )
        return m0 if b == 0 else np.eye(2) - m0


def state_from_angles(theta: float, eta: float) -> QubitState:
    theta, eta = _canonical_angles(theta, eta, "state")
    vec = bloch_from_angles(theta, eta)
    vec.setflags(write=False)
    return QubitState(theta, eta, vec)


def projector_from_angles(psi: float, omega: float) -> Projector:
    psi, omega = _canonical_angles(psi, omega, "projector")
    vec = bloch_from_angles(psi, omega)
    vec.setflags(write=False)
    return Projector(psi, omega, vec)


def born_probability(state: QubitState, outcome: Projector, b: int) -> float:
    """P(b) = (1 + (-1)^b s.m) / 2 for state Bloch vector s and projector m."""
    if b not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {b!r}")
    dot = float(np.dot(state.bloch, outcome.bloch))
    dot = max(-1.0, min(1.0, dot))
    return 0.5 * (1.0 + dot) if b == 0 else 0.5 * (1.0 - dot)


def born_probability_trace(state: QubitState, outcome: Projector, b: int) -> float:
    """Same probability as :func:`born_probability`, via tr(rho M^b)."""
    return float(np.real(np.trace(state.density_matrix() @ outcome.matrix(b))))


def normalize_rows(vecs: np.ndarray) -> np.ndarray:
    return vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)
