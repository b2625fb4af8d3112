import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varqite_maxwell.metrics import fidelity, time_average_trace_error, trace_error
from varqite_maxwell.quantum_core import StateVector


def test_trace_error_examples():
    assert trace_error([1, 0], [3, 0]) == 0.0
    assert trace_error([1, 0], [0, 2]) == pytest.approx(1.0)
    assert trace_error([1, 0], [np.sqrt(0.75), 0.5]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        trace_error([1, 0], [0, 0])


def test_accepts_state_vectors():
    assert fidelity(StateVector.zero(1), np.array([1.0, 1.0])) == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 100), st.sampled_from([1, -1, 1j]))
def test_sign_and_scale_invariance(seed, scale, phase):
    rng = np.random.default_rng(seed)
    q, u = rng.normal(size=8), rng.normal(size=8)
    base = trace_error(q, u)
    assert trace_error(q, scale * u) == pytest.approx(base, abs=1e-12)
    assert trace_error(phase * q, u) == pytest.approx(base, abs=1e-12)
    assert 0.0 <= base <= 1.0


def test_time_average_examples():
    traj = [np.array([1.0, 0]), np.array([0.6, 0.8])]
    assert time_average_trace_error(traj, traj).epsilon_tr == 0.0
    rep = time_average_trace_error([[1, 0], [1, 0]], [[1, 0], [0, 1]])
    assert rep.epsilon_tr == pytest.approx(0.5)
    const = time_average_trace_error([[1, 0]] * 3, [[np.sqrt(0.75), 0.5]] * 3)
    assert const.epsilon_tr == pytest.approx(0.5)
    assert const.to_dict()["per_step_trace_error"] == pytest.approx([0.5] * 3)


def test_alignment_checks():
    a = [[1, 0]] * 3
    with pytest.raises(ValueError):
        time_average_trace_error(a, a[:2])
    with pytest.raises(ValueError):
        time_average_trace_error(a, a, [0, 0.1, 0.2], [0, 0.1, 0.3], dt=0.1)
    rep = time_average_trace_error(a, a, [0, 0.1, 0.2], [0, 0.1, 0.24], dt=0.1)
    np.testing.assert_allclose(rep.times, [0, 0.1, 0.2])
