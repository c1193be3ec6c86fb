import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qracrng.bloch import (
    DomainError,
    Projector,
    QubitState,
    angles_from_bloch,
    born_probability,
    born_probability_trace,
    projector_from_angles,
    state_from_angles,
)

XI = math.acos(math.sqrt(0.5 + math.sqrt(3) / 6))

polar = st.floats(0.0, math.pi)
azimuth = st.floats(-20.0, 20.0)


@pytest.mark.parametrize(
    "theta, eta, expected",
    [(0, 0, (0, 0, 1)), (math.pi / 2, 0, (1, 0, 0)), (math.pi / 2, math.pi / 2, (0, 1, 0))],
)
def test_state_from_angles_examples(theta, eta, expected):
    np.testing.assert_allclose(state_from_angles(theta, eta).bloch, expected, atol=1e-15)


@pytest.mark.parametrize(
    "psi, omega, expected",
    [(0, 0, (0, 0, 1)), (math.pi, 0, (0, 0, -1)), (math.pi / 2, math.pi / 2, (0, 1, 0))],
)
def test_projector_from_angles_examples(psi, omega, expected):
    np.testing.assert_allclose(projector_from_angles(psi, omega).bloch, expected, atol=1e-15)


def test_fixed_first_measurement_is_ket_zero_projector():
    np.testing.assert_allclose(projector_from_angles(0, 0).matrix(), [[1, 0], [0, 0]], atol=0)


def test_ket_zero_amplitude_is_real_nonnegative():
    for theta, eta in [(0.3, 5.0), (math.pi, 1.0), (2.0, -1.0)]:
        amp = state_from_angles(theta, eta).ket()[0]
        assert amp.imag == 0 and amp.real >= 0


def test_out_of_range_polar_angle_rejected():
    with pytest.raises(DomainError):
        state_from_angles(3.5, 0)
    with pytest.raises(DomainError):
        projector_from_angles(-0.1, 0)


def test_azimuth_reduced_and_poles_canonical():
    s = state_from_angles(1.0, -math.pi / 2)
    assert s.eta == pytest.approx(3 * math.pi / 2)
    assert state_from_angles(0.0, 2.0).eta == 0.0
    assert state_from_angles(math.pi, 2.0).eta == 0.0


def test_born_examples():
    up = state_from_angles(0, 0)
    z = projector_from_angles(0, 0)
    assert born_probability(up, z, 0) == 1.0
    assert born_probability(state_from_angles(math.pi, 0), z, 0) == 0.0
    assert born_probability(state_from_angles(math.pi / 2, 0), z, 0) == pytest.approx(0.5, abs=1e-16)


def test_born_on_protocol_state_000():
    # |phi(000)> = cos(xi)|0> + e^{i pi/4} sin(xi)|1>, measured on |0><0|
    p = born_probability(state_from_angles(2 * XI, math.pi / 4), projector_from_angles(0, 0), 0)
    assert p == pytest.approx(0.5 + math.sqrt(3) / 6, abs=1e-15)
    assert p == pytest.approx(0.5 + 6.928203 / 24, abs=1e-7)


def test_born_rejects_bad_outcome():
    with pytest.raises(DomainError):
        born_probability(state_from_angles(0, 0), projector_from_angles(0, 0), 2)


def test_trace_and_bloch_paths_agree(rng):
    for _ in range(1000):
        s = state_from_angles(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        m = projector_from_angles(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        for b in (0, 1):
            assert abs(born_probability(s, m, b) - born_probability_trace(s, m, b)) < 1e-12


@given(polar, azimuth, polar, azimuth)
def test_outcomes_complete(t, e, p, w):
    s, m = state_from_angles(t, e), projector_from_angles(p, w)
    assert abs(born_probability(s, m, 0) + born_probability(s, m, 1) - 1.0) <= 1e-15


@given(polar, azimuth)
def test_bloch_vector_invariants(t, e):
    s = state_from_angles(t, e)
    expected = (math.sin(s.theta) * math.cos(s.eta), math.sin(s.theta) * math.sin(s.eta), math.cos(s.theta))
    np.testing.assert_allclose(s.bloch, expected, atol=1e-12)
    assert abs(np.linalg.norm(s.bloch) - 1) < 1e-12


@settings(max_examples=300)
@given(st.floats(1e-3, math.pi - 1e-3), st.floats(0.0, 2 * math.pi - 1e-9))
def test_angle_round_trip(t, e):
    back = angles_from_bloch(state_from_angles(t, e).bloch)
    assert back[0] == pytest.approx(t, abs=1e-10)
    assert math.cos(back[1] - e) == pytest.approx(1.0, abs=1e-12)


def test_complement_is_antipodal():
    m = projector_from_angles(1.1, 0.4)
    anti = Projector.from_bloch(-m.bloch)
    np.testing.assert_allclose(m.matrix(1), anti.matrix(0), atol=1e-12)


def test_from_bloch_matches_density_matrix(rng):
    v = rng.normal(size=3)
    s = QubitState.from_bloch(v)
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    recovered = [np.real(np.trace(s.density_matrix() @ p)) for p in paulis]
    np.testing.assert_allclose(recovered, v / np.linalg.norm(v), atol=1e-12)
