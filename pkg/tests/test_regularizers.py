import numpy as np
import pytest

from qrot import (
    Entropy,
    Grid1D,
    GridFunction,
    PPower,
    Quadratic,
    luxemburg_norm,
    marginal_contraction_check,
)

REGULARIZERS = [Quadratic(), Entropy(), PPower(1.5), PPower(3.0)]


def numeric_conjugate_nonneg(phi, s, t_max=1e6):
    """Independent maximization of s*t - phi(t) over t >= 0: coarse log-grid
    bracket followed by ternary search on the concave objective."""

    def obj(t):
        return s * t - float(phi.value(t))

    grid = np.concatenate([[0.0], np.geomspace(1e-12, t_max, 4000)])
    values = [obj(t) for t in grid]
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if obj(m1) < obj(m2):
            lo = m1
        else:
            hi = m2
    return max(obj(0.5 * (lo + hi)), values[0])


def test_values_and_derivatives_at_origin():
    for phi in REGULARIZERS:
        assert float(phi.value(0.0)) == 0.0
    assert float(Entropy().value(1.0)) == 0.0
    assert float(Quadratic().derivative(2.0)) == 2.0
    assert float(PPower(3.0).derivative(2.0)) == pytest.approx(4.0)


def test_conjugate_closed_forms():
    assert float(Quadratic().conjugate_nonneg(-3.0)) == 0.0
    assert float(Quadratic().conjugate_nonneg(2.0)) == pytest.approx(2.0)
    # sup_{t>=0}(s t - t log t) is attained at t = e^(s-1)
    assert float(Entropy().conjugate_nonneg(1.0)) == pytest.approx(1.0)
    phi = PPower(3.0)
    assert float(phi.conjugate_nonneg(-1.0)) == 0.0
    assert float(phi.conjugate_nonneg(2.0)) == pytest.approx(2.0 ** 1.5 / 1.5)


def test_conjugates_match_numerical_maximization(rng):
    for phi in REGULARIZERS:
        for s in rng.uniform(-4.0, 4.0, 12):
            closed = float(phi.conjugate_nonneg(s))
            numeric = numeric_conjugate_nonneg(phi, float(s))
            assert closed == pytest.approx(numeric, abs=1e-9, rel=1e-9)


def test_entropy_conjugate_first_order_condition(rng):
    phi = Entropy()
    for s in rng.uniform(-3.0, 3.0, 20):
        t_star = np.exp(s - 1.0)
        assert float(phi.derivative(t_star)) == pytest.approx(s, abs=1e-12)


def test_fenchel_young_inequality(rng):
    for phi in REGULARIZERS:
        s = rng.uniform(0.0, 5.0, 200)
        t = rng.uniform(0.0, 5.0, 200)
        lhs = s * t
        rhs = np.asarray(phi.value(t)) + np.asarray(phi.conjugate_nonneg(s))
        assert (lhs <= rhs + 1e-12).all()


def test_derivative_matches_finite_differences(rng):
    h = 1e-5
    for phi in REGULARIZERS:
        for t in rng.uniform(0.1, 10.0, 25):
            fd = (float(phi.value(t + h)) - float(phi.value(t - h))) / (2 * h)
            assert float(phi.derivative(t)) == pytest.approx(fd, abs=1e-6, rel=1e-6)


def test_luxemburg_zero_function():
    f = GridFunction(Grid1D(10, 0.0, 1.0), np.zeros(10))
    assert luxemburg_norm(f, Quadratic()) == 0.0


def test_luxemburg_closed_forms():
    f = GridFunction(Grid1D(128, 0.0, 1.0), np.ones(128))
    assert luxemburg_norm(f, Quadratic()) == pytest.approx(1 / np.sqrt(2), rel=1e-8)
    for p in (1.5, 2.5, 4.0):
        assert luxemburg_norm(f, PPower(p)) == pytest.approx(p ** (-1 / p), rel=1e-8)


def test_luxemburg_is_homogeneous(rng):
    g = Grid1D(40, 0.0, 2.0)
    vals = rng.uniform(0.0, 3.0, 40)
    for phi in REGULARIZERS:
        base = luxemburg_norm(GridFunction(g, vals), phi)
        for k in (0.1, 2.0, 17.5):
            scaled = luxemburg_norm(GridFunction(g, k * vals), phi)
            assert scaled == pytest.approx(k * base, rel=1e-8)


def test_luxemburg_rejects_non_finite():
    vals = np.ones(4)
    vals[2] = np.inf
    with pytest.raises(ValueError):
        luxemburg_norm(GridFunction(Grid1D(4), vals), Quadratic())


def test_luxemburg_satisfies_defining_constraint(rng):
    # at the returned lambda the unit integral constraint holds tightly
    g = Grid1D(30, 0.0, 1.0)
    vals = rng.uniform(0.1, 5.0, 30)
    for phi in REGULARIZERS:
        f = GridFunction(g, vals)
        lam = luxemburg_norm(f, phi)
        integral = float(np.sum(phi.value(vals / lam)) * g.h)
        assert integral <= 1.0 + 1e-9
        assert float(np.sum(phi.value(vals / (lam * (1 - 1e-8)))) * g.h) > 1.0 - 1e-6


def test_contraction_uniform_plan_is_equality_case():
    grids = (Grid1D(16, 0.0, 1.0), Grid1D(16, 0.0, 1.0))
    pi = GridFunction(grids, np.ones((16, 16)))
    assert marginal_contraction_check(pi, Quadratic())


def test_contraction_zero_plan():
    grids = (Grid1D(4, 0.0, 1.0), Grid1D(6, 0.0, 1.0))
    pi = GridFunction(grids, np.zeros((4, 6)))
    assert marginal_contraction_check(pi, Quadratic())
    assert marginal_contraction_check(pi, Entropy())


def test_contraction_random_plans(rng):
    for _ in range(40):
        n1, n2 = rng.integers(3, 14, size=2)
        grids = (Grid1D(int(n1), 0.0, 1.0), Grid1D(int(n2), 0.0, 1.0))
        vals = rng.uniform(0.0, 4.0, (n1, n2)) * (rng.random((n1, n2)) > 0.25)
        pi = GridFunction(grids, vals)
        assert marginal_contraction_check(pi, Quadratic())
        assert marginal_contraction_check(pi, Entropy())


def test_contraction_on_larger_domain(rng):
    # the bound picks up the factor |other domain| when it exceeds 1
    grids = (Grid1D(8, 0.0, 3.0), Grid1D(8, 0.0, 2.0))
    for _ in range(10):
        pi = GridFunction(grids, rng.uniform(0.0, 2.0, (8, 8)))
        assert marginal_contraction_check(pi, Quadratic())


def test_gridfunction_shape_validation():
    with pytest.raises(ValueError):
        GridFunction(Grid1D(4), np.ones(5))
    with pytest.raises(ValueError):
        GridFunction((Grid1D(4), Grid1D(3)), np.ones((3, 4)))
