"""Hadamard-test sampling noise on the McLachlan metric.

Estimates Lambda for a 4-qubit Ry-Linear circuit at several shot budgets and
shows the spread across seeds shrinking like 1/sqrt(M).
"""
import numpy as np

from varqite_maxwell.ansatz import AnsatzSpec
from varqite_maxwell.mclachlan import EvaluationMode, lambda_matrix
from varqite_maxwell.resources import circuits_per_step, query_cost

spec = AnsatzSpec("Ry-Linear", 4, 1)
theta = np.array([0.4, -0.9, 1.3, 0.2])
exact = lambda_matrix(spec, theta)
print("exact Lambda\n", np.round(exact, 4))

for shots in (10**2, 10**3, 10**4, 10**5):
    runs = np.array([lambda_matrix(spec, theta, EvaluationMode.sampled(shots, s)) for s in range(30)])
    spread = runs.std(axis=0, ddof=1)
    print(f"M = {shots:>6d}: mean stderr {spread[spread > 0].mean():.2e}, "
          f"x sqrt(M) = {spread[spread > 0].mean() * np.sqrt(shots):.3f}")

step = circuits_per_step(4)
print(f"per step: {step.lambda_circuits} + {step.c_circuits} circuits; "
      f"query estimate for t=1, dt=0.01, eps=0.01: {query_cost(1, 0.01, 4, 0.01):.2e}")
