import numpy as np
import pytest

from varqite_maxwell.ansatz import AnsatzSpec, param_count, state
from varqite_maxwell.evolver import EvolutionConfig, Regularization, evolve, solve_flow, step
from varqite_maxwell.maxwell import MaxwellConfig, assemble_generator, classical_solve, flatten, gaussian_initial
from varqite_maxwell.mclachlan import EvaluationMode
from varqite_maxwell.metrics import time_average_trace_error
from varqite_maxwell.pauli import PauliSum, decompose
from varqite_maxwell.state_prep import polish, target_state


def _antisymmetric_generator(n, seed=0):
    m = np.random.default_rng(seed).normal(size=(2**n, 2**n))
    return decompose(m - m.T)


def test_solve_flow_identity():
    c = np.array([0.3, -1.0, 2.0])
    x, diag = solve_flow(np.eye(3), c)
    np.testing.assert_allclose(x, c)
    assert diag.rank == 3 and not diag.degenerate


def test_solve_flow_drops_null_direction():
    x, diag = solve_flow(np.diag([1.0, 0.0]), np.array([1.0, 1.0]), Regularization("svd", 1e-8))
    np.testing.assert_allclose(x, [1.0, 0.0])
    assert diag.rank == 1


def test_solve_flow_least_squares_optimality():
    rng = np.random.default_rng(0)
    b = rng.normal(size=(10, 6))
    lam = b @ b.T
    c = rng.normal(size=10)
    x, diag = solve_flow(lam, c)
    for _ in range(100):
        y = x + rng.normal(size=10)
        assert diag.residual <= np.linalg.norm(lam @ y - c) + 1e-12


def test_solve_flow_zero_matrix_is_degenerate():
    x, diag = solve_flow(np.zeros((2, 2)), np.ones(2))
    np.testing.assert_array_equal(x, 0)
    assert diag.degenerate


def test_ridge_never_increases_flow_norm():
    rng = np.random.default_rng(1)
    b = rng.normal(size=(6, 4))
    lam, c = b @ b.T, rng.normal(size=6)
    norms = [np.linalg.norm(solve_flow(lam, c, Regularization("ridge", ridge=r))[0])
             for r in (1e-6, 1e-3, 1e-1, 1.0, 10.0)]
    assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))


def test_regularization_validation():
    with pytest.raises(ValueError):
        Regularization("svd", rho=0.0)
    with pytest.raises(ValueError):
        Regularization("ridge", ridge=-1.0)
    with pytest.raises(ValueError):
        Regularization("lasso")


def test_step_arithmetic():
    np.testing.assert_allclose(step([0.0], [2.0], 0.1), [0.2])
    np.testing.assert_allclose(step([1.0, 2.0], [0.0, 0.0], 0.1), [1.0, 2.0])
    np.testing.assert_allclose(step([1.0, 2.0], [5.0, 5.0], 0.0), [1.0, 2.0])


def test_zero_time_run():
    spec = AnsatzSpec("Ry-Linear", 2, 1)
    th = np.array([0.3, 0.4])
    traj = evolve(spec, th, _antisymmetric_generator(2), EvolutionConfig(0.1, 0.0))
    assert len(traj) == 1
    np.testing.assert_allclose(traj.states[0].amplitudes, state(spec, th).amplitudes)


def test_zero_generator_freezes_parameters():
    spec = AnsatzSpec("RyCRy-Linear", 2, 1)
    th = np.random.default_rng(0).normal(size=param_count(spec))
    traj = evolve(spec, th, PauliSum(2), EvolutionConfig(0.1, 0.5))
    for t in traj.thetas:
        np.testing.assert_array_equal(t, th)


def test_snapshots_and_norm():
    spec = AnsatzSpec("Ry-Full", 2, 2)
    traj = evolve(spec, np.full(4, 0.3), _antisymmetric_generator(2), EvolutionConfig(0.01, 0.1, snapshot_stride=2))
    np.testing.assert_allclose(np.diff(traj.times), 0.02)
    assert len(traj) == 6 and len(traj.diagnostics) == 10
    for s in traj.states:
        assert s.norm() == pytest.approx(1.0, abs=1e-12)


def test_theta_length_checked():
    with pytest.raises(ValueError):
        evolve(AnsatzSpec("Ry-Linear", 2, 1), np.zeros(3), PauliSum(2), EvolutionConfig(0.1, 0.1))


def test_shot_mode_run_is_deterministic():
    spec = AnsatzSpec("Ry-Linear", 2, 1)
    gen = _antisymmetric_generator(2)
    cfg = EvolutionConfig(0.05, 0.1, mode=EvaluationMode.sampled(200, 5))
    a = evolve(spec, np.array([0.2, 0.1]), gen, cfg)
    b = evolve(spec, np.array([0.2, 0.1]), gen, cfg)
    for x, y in zip(a.thetas, b.thetas):
        np.testing.assert_array_equal(x, y)


def test_first_order_step_size_convergence():
    spec = AnsatzSpec("Ry-Full", 2, 3)
    gen = _antisymmetric_generator(2, 3)
    th0 = np.random.default_rng(2).normal(0, 0.5, 6)

    def final(dt):
        return evolve(spec, th0, gen, EvolutionConfig(dt, 0.4, Regularization("svd", 1e-10))).states[-1].amplitudes

    ref = final(0.0025)
    errs = [np.linalg.norm(final(dt) - ref) for dt in (0.04, 0.02)]
    assert errs[1] < errs[0]
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.5)


def test_expressive_ansatz_tracks_maxwell_reference():
    cfg = MaxwellConfig(16)
    spec = AnsatzSpec("Ry-Linear", 6, 16)
    theta0, fit = polish(spec, target_state(cfg), np.random.default_rng(0).normal(0, 0.5, param_count(spec)))
    assert fit < 1e-6
    sub = 2
    traj = evolve(spec, theta0, assemble_generator(cfg).pauli_form,
                  EvolutionConfig(cfg.dt / sub, 0.5, Regularization("svd", 1e-4), snapshot_stride=sub))
    ref = classical_solve(cfg, gaussian_initial(cfg), 0.5)
    report = time_average_trace_error(traj.states, [flatten(s) for _, s in ref],
                                      traj.times, [t for t, _ in ref], cfg.dt)
    assert report.per_step_fidelity.min() >= 0.99
