"""Time-averaged trace error versus ansatz depth.

Runs the 6-qubit Maxwell problem for TwoLocal Ry-Linear circuits with one to
six layers and prints one line per depth. Roughly a minute and a half.
"""
from varqite_maxwell import maxwell as mx
from varqite_maxwell.ansatz import AnsatzSpec, param_count
from varqite_maxwell.evolver import EvolutionConfig, Regularization, evolve
from varqite_maxwell.metrics import time_average_trace_error
from varqite_maxwell.state_prep import SpsaConfig, spsa_fit, target_state

cfg = mx.MaxwellConfig(16)
gen = mx.assemble_generator(cfg).pauli_form
ref = [mx.flatten(s) for _, s in mx.classical_solve(cfg, mx.gaussian_initial(cfg), 0.5)]

print("layers  params  fit cost   eps_tr")
for layers in range(1, 7):
    spec = AnsatzSpec("Ry-Linear", 6, layers)
    fit = spsa_fit(spec, target_state(cfg), SpsaConfig(restarts=5), polish_result=True)
    traj = evolve(spec, fit.theta0, gen, EvolutionConfig(cfg.dt, 0.5, Regularization("svd", 1e-3)))
    eps = time_average_trace_error(traj.states, ref).epsilon_tr
    print(f"{layers:6d}  {param_count(spec):6d}  {fit.final_cost:.2e}  {eps:.4f}")
