"""The explicit optimal 3->1 code: cube-vertex states, Pauli-axis measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import projector_from_angles, state_from_angles
from .strategy import (
    ProbabilityTable,
    Strategy,
    average_success,
    input_bits,
    min_entropy,
    probability_table,
    witness_T,
)

XI = math.acos(math.sqrt(0.5 + math.sqrt(3.0) / 6.0))
CORRECT_PROBABILITY = 0.5 + math.sqrt(3.0) / 6.0

# relative phase of |1> for the inputs with a_1 = 0, in order a_2 a_3 = 00, 01, 10, 11;
# inputs with a_1 = 1 swap the cos/sin amplitudes and keep the same phases
_PHASES = (math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4)


@dataclass(frozen=True)
class Protocol3Report:
    strategy: Strategy
    xi: float
    t3: float
    s3: float
    h_min: float
    table: ProbabilityTable
    all_correct_equal: bool

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.to_dict(),
            "xi": self.xi,
            "t3": self.t3,
            "s3": self.s3,
            "h_min": self.h_min,
            "table": self.table.E.tolist(),
            "all_correct_equal": self.all_correct_equal,
        }


def build_protocol3() -> Strategy:
    states = []
    for a1 in (0, 1):
        # cos(xi)|0> + e^{i phi} sin(xi)|1> has polar angle 2 xi; swapping the
        # amplitudes gives pi - 2 xi
        theta = 2 * XI if a1 == 0 else math.pi - 2 * XI
        states.extend(state_from_angles(theta, phi) for phi in _PHASES)
    measurements = (
        projector_from_angles(0.0, 0.0),  # |0><0|
        projector_from_angles(math.pi / 2, 0.0),  # (|0> + |1>)/sqrt2
        projector_from_angles(math.pi / 2, math.pi / 2),  # (|0> + i|1>)/sqrt2
    )
    return Strategy(3, tuple(states), measurements)


def verify_protocol3() -> Protocol3Report:
    strategy = build_protocol3()
    table = probability_table(strategy)
    correct = np.where(input_bits(3) == 0, table.E, 1.0 - table.E)
    return Protocol3Report(
        strategy=strategy,
        xi=XI,
        t3=witness_T(table),
        s3=average_success(table),
        h_min=min_entropy(table),
        table=table,
        all_correct_equal=bool(np.ptp(correct) <= 1e-12),
    )


def format_report(report: Protocol3Report) -> str:
    rows = [
        ("xi", f"{report.xi:.15f}"),
        ("T_3", f"{report.t3:.12f}"),
        ("4*sqrt(3)", f"{4 * math.sqrt(3):.12f}"),
        ("S_3", f"{report.s3:.12f}"),
        ("H_min", f"{report.h_min:.12f}"),
        ("all_correct_equal", str(report.all_correct_equal)),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)} = {v}" for k, v in rows)
