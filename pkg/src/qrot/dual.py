"""Dual objective of the quadratically regularized problem, its gradients,
plan recovery, duality gap, and the preconditioner / Hessian algebra used
by the fixed-point iteration.

The dual pair (alpha, beta) determines a candidate plan through
``pi = max(alpha (+) beta - c, 0) / gamma`` where ``(+)`` is the outer sum.
Minimizing

    F(alpha, beta) = 0.5 ||max(alpha (+) beta - c, 0)||_F^2
                     - gamma <alpha, mu> - gamma <beta, nu>

over all potentials is equivalent to the primal problem; at a minimizer the
recovered plan has the prescribed marginals.
"""

from __future__ import annotations

import numpy as np

from .core import DualPotentials, as_weights, primal_objective

__all__ = [
    "build_hessian",
    "dual_gradients",
    "dual_objective",
    "duality_gap",
    "preconditioner_apply",
    "recover_plan",
    "support_mask",
]

# Materializing the Hessian is a test/diagnostic utility only.
HESSIAN_SIZE_LIMIT = 200


def _outer_sum_minus_cost(pot, c):
    alpha, beta = pot
    return np.asarray(alpha, float)[:, None] + np.asarray(beta, float)[None, :] - c


def recover_plan(pot, c, gamma: float) -> np.ndarray:
    """Plan induced by potentials: ``max(alpha[i] + beta[j] - c[i, j], 0) / gamma``."""
    if not (gamma > 0):
        raise ValueError("gamma must be positive")
    c = np.asarray(c, dtype=float)
    return np.maximum(_outer_sum_minus_cost(pot, c), 0.0) / gamma


def dual_objective(pot, c, gamma: float, mu, nu) -> float:
    """Value of F at the given potentials (the function the solvers descend)."""
    c = np.asarray(c, dtype=float)
    mu, nu = as_weights(mu), as_weights(nu)
    alpha, beta = pot
    pos = np.maximum(_outer_sum_minus_cost(pot, c), 0.0)
    return float(0.5 * (pos * pos).sum() - gamma * (alpha @ mu) - gamma * (beta @ nu))


def dual_gradients(pot, c, gamma: float, mu, nu, plan=None):
    """Gradients of F: ``(gamma (pi 1 - mu), gamma (pi.T 1 - nu))``.

    ``plan`` may pass in a precomputed ``recover_plan(pot, c, gamma)``.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    if plan is None:
        plan = recover_plan(pot, c, gamma)
    return gamma * (plan.sum(axis=1) - mu), gamma * (plan.sum(axis=0) - nu)


def dual_value(pot, c, gamma: float, mu, nu) -> float:
    """Dual lower bound ``<alpha, mu> + <beta, nu> - ||(alpha (+) beta - c)_+||^2 / (2 gamma)``."""
    c = np.asarray(c, dtype=float)
    mu, nu = as_weights(mu), as_weights(nu)
    alpha, beta = pot
    pos = np.maximum(_outer_sum_minus_cost(pot, c), 0.0)
    return float(alpha @ mu + beta @ nu - 0.5 * (pos * pos).sum() / gamma)


def duality_gap(pot, pi, c, gamma: float, mu, nu) -> float:
    """Primal objective of ``pi`` minus the dual lower bound of ``pot``.

    Nonnegative up to floating-point error whenever ``pi`` is feasible, and
    zero exactly at a primal-dual optimal pair.
    """
    return primal_objective(pi, c, gamma) - dual_value(pot, c, gamma, mu, nu)


def preconditioner_apply(f, g):
    """Apply the closed-form inverse of the block preconditioner.

    Returns ``da = (f - sum(f) / (2 N)) / M`` and
    ``db = (g - sum(g) / (2 M)) / N`` where ``N = len(f)``, ``M = len(g)``.
    This is the exact inverse of ``blockdiag(M (I + J/N), N (I + J/M))``
    with ``J`` the all-ones matrix, since ``J^2 = N J``.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    n, m = f.size, g.size
    da = (f - f.sum() / (2.0 * n)) / m
    db = (g - g.sum() / (2.0 * m)) / n
    return da, db


def support_mask(pot, c) -> np.ndarray:
    """Boolean mask ``alpha[i] + beta[j] - c[i, j] >= 0`` (kink counted in)."""
    c = np.asarray(c, dtype=float)
    return _outer_sum_minus_cost(pot, c) >= 0.0


def build_hessian(sigma) -> np.ndarray:
    """Materialize the (N+M) x (N+M) Hessian of F for a support mask.

    Blocks are ``[[diag(sigma 1), sigma], [sigma.T, diag(sigma.T 1)]]``.
    Guarded to small sizes; intended for tests and diagnostics.
    """
    sigma = np.asarray(sigma, dtype=float)
    n, m = sigma.shape
    if n + m > HESSIAN_SIZE_LIMIT:
        raise ValueError(f"refusing to materialize Hessian with N+M = {n + m} > {HESSIAN_SIZE_LIMIT}")
    out = np.zeros((n + m, n + m))
    out[:n, :n] = np.diag(sigma.sum(axis=1))
    out[:n, n:] = sigma
    out[n:, :n] = sigma.T
    out[n:, n:] = np.diag(sigma.sum(axis=0))
    return out
