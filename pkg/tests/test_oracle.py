import numpy as np
import pytest

from conftest import random_instance
from qrot import duality_gap, exact_solve, max_violation, recover_plan
from qrot.oracle import _covering_patterns

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_one_cell_instance():
    plan, pot = exact_solve([1.0], [1.0], [[0.0]], 1.0)
    assert np.allclose(plan, [[1.0]])
    assert pot.alpha[0] + pot.beta[0] == pytest.approx(1.0)
    assert pot.beta[0] == pytest.approx(0.0)  # gauge pins mean(beta)


def test_symmetric_instance_plan_and_optimality():
    mu = nu = np.array([0.5, 0.5])
    plan, pot = exact_solve(mu, nu, C2, 1.0)
    assert np.abs(plan - 0.5 * np.eye(2)).max() < 1e-12
    assert pot.beta.mean() == pytest.approx(0.0, abs=1e-12)
    # returned multipliers certify the plan
    assert np.abs(recover_plan(pot, C2, 1.0) - plan).max() < 1e-12
    assert duality_gap(pot, plan, C2, 1.0, mu, nu) <= 1e-10


def test_pinned_regression_asymmetric_marginals():
    plan, pot = exact_solve([0.7, 0.3], [0.5, 0.5], C2, 1.0)
    assert np.allclose(plan, [[0.5, 0.2], [0.0, 0.3]], atol=1e-12)
    assert np.allclose(pot.alpha, [0.85, -0.05], atol=1e-12)
    assert np.allclose(pot.beta, [-0.35, 0.35], atol=1e-12)


def test_oracle_solutions_are_feasible_and_tight(rng):
    for k in range(15):
        mu, nu, c = random_instance(rng)
        gamma = [0.5, 1.0, 5.0][k % 3]
        plan, pot = exact_solve(mu, nu, c, gamma)
        assert (plan >= 0).all()
        assert max_violation(plan, mu, nu) < 1e-12
        assert duality_gap(pot, plan, c, gamma, mu, nu) <= 1e-10
        assert abs(pot.beta.mean()) < 1e-12


def test_enumeration_order_is_densest_first():
    order = _covering_patterns(2, 2)
    assert order[0] == 0b1111
    counts = [mask.bit_count() for mask in order]
    assert counts == sorted(counts, reverse=True)
    # ties broken by ascending mask value
    for a, b in zip(order, order[1:]):
        if a.bit_count() == b.bit_count():
            assert a < b
    # every pattern covers all rows and columns
    assert all(mask & 0b0011 and mask & 0b1100 and mask & 0b0101 and mask & 0b1010 for mask in order)


def test_large_gamma_approaches_min_norm_feasible_plan():
    mu = np.array([0.7, 0.3])
    nu = np.array([0.5, 0.5])
    # zero cost and gamma 1 minimizes the plain Frobenius norm over the polytope
    limit, _ = exact_solve(mu, nu, np.zeros((2, 2)), 1.0)
    assert np.allclose(limit, [[0.35, 0.35], [0.15, 0.15]], atol=1e-12)
    dists = [
        np.linalg.norm(exact_solve(mu, nu, C2, g)[0] - limit) for g in (1e2, 1e3, 1e4)
    ]
    assert dists[0] > dists[1] > dists[2]


def test_input_guards():
    with pytest.raises(ValueError):
        exact_solve(np.full(5, 0.2), np.full(4, 0.25), np.zeros((5, 4)), 1.0)  # 20 cells
    with pytest.raises(ValueError):
        exact_solve([0.5, 0.5], [1.0, 0.0], C2, 1.0)  # zero mass cell
    with pytest.raises(ValueError):
        exact_solve([0.5, 0.5], [0.3, 0.3], C2, 1.0)  # unbalanced
    with pytest.raises(ValueError):
        exact_solve([0.5, 0.5], [0.5, 0.5], C2, 0.0)  # bad gamma
    with pytest.raises(ValueError):
        exact_solve([0.5, 0.5], [0.5, 0.5], np.zeros((3, 2)), 1.0)  # shape
