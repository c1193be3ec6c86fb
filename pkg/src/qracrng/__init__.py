"""Bounds, certified min-entropy and protocol simulation for n->1 qubit random access codes."""

from .bloch import (
    DomainError,
    Projector,
    QubitState,
    born_probability,
    projector_from_angles,
    state_from_angles,
)
from .certifier import (
    CertifierConfig,
    EntropyPoint,
    entropy_curve,
    guessing_probability,
    positivity_threshold,
)
from .classical import ClassicalBoundResult, classical_max_T
from .protocol3 import Protocol3Report, build_protocol3, verify_protocol3
from .seesaw import (
    SeesawConfig,
    SeesawResult,
    optimal_measurements_for_states,
    optimal_states_for_measurements,
    seesaw_optimize,
)
from .simulator import (
    CertifiedRate,
    InsufficientStatistics,
    Transcript,
    certify_rate,
    estimate_witness,
    run_protocol,
)
from .strategy import (
    ClassicalStrategy,
    ProbabilityTable,
    Strategy,
    average_success,
    classical_table,
    min_entropy,
    probability_table,
    witness_T,
)

__version__ = "0.1.0"
