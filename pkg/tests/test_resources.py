import pytest
from hypothesis import given, strategies as st

from varqite_maxwell.ansatz import FAMILIES, AnsatzSpec, param_count
from varqite_maxwell.resources import circuits_per_step, cost_report, query_cost


def test_headline_counts():
    s = circuits_per_step(18)
    assert (s.lambda_circuits, s.c_circuits) == (324, 18)
    s = circuits_per_step(1)
    assert (s.lambda_circuits, s.c_circuits) == (1, 1)
    with pytest.raises(ValueError):
        circuits_per_step(0)


@pytest.mark.parametrize("family", FAMILIES)
def test_expanded_counts_cover_headline(family):
    spec = AnsatzSpec(family, 4, 2)
    s = circuits_per_step(param_count(spec), spec, 11)
    assert s.expanded_counts[0] >= s.lambda_circuits
    assert s.expanded_counts[1] >= s.c_circuits


def test_query_cost_example():
    assert query_cost(1, 0.01, 18, 0.01) == pytest.approx(3.24e8)


@given(st.floats(0.1, 10), st.floats(1e-3, 0.1), st.integers(1, 200), st.floats(1e-3, 0.5))
def test_query_cost_scaling(t, dt, d, eps):
    base = query_cost(t, dt, d, eps)
    assert query_cost(t, dt, 2 * d, eps) == pytest.approx(4 * base)
    assert query_cost(t, dt / 2, d, eps) == pytest.approx(2 * base)


def test_query_cost_rejects_nonpositive():
    with pytest.raises(ValueError):
        query_cost(1, 0, 1, 1)


def test_cost_report_fields():
    rep = cost_report(AnsatzSpec("Ry-Linear", 6, 3), 11, 1.0, 0.01, 0.01)
    assert rep["params"] == 18
    assert rep["lambda_circuits_per_step"] == 324
    assert rep["n_steps"] == 100
    assert rep["query_cost_constant"] == 1.0
