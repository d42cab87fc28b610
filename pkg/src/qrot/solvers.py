"""Iterative solvers for quadratically regularized discrete optimal
transport, plus an entropic Sinkhorn baseline.

Four dual iterations are provided, all with a few dense N x M kernels per
step and no linear solves:

* cyclic projection: closed-form block updates of the slack/alpha/beta
  optimality system, sweeping the three blocks in order;
* dual gradient descent on F with a fixed stepsize (default 1/(M+N));
* a preconditioned fixed-point iteration whose fixed points are exactly
  the optimal potentials;
* Nesterov-accelerated gradient descent with momentum n/(n+3).

:func:`solve` wraps any of them (or Sinkhorn) with the common stopping rule
"maximal marginal violation <= tol" and optional per-iteration history.
"""

from __future__ import annotations

import time
from typing import NamedTuple

import numpy as np

from .core import (
    Algorithm,
    ConvergenceReport,
    DualPotentials,
    HistoryEntry,
    SolverConfig,
    as_weights,
    check_mass_balance,
    max_violation,
)
from .dual import preconditioner_apply, recover_plan
from .regularizers import Entropy

__all__ = [
    "CyclicProjectionState",
    "DivergenceError",
    "NesterovState",
    "cyclic_projection_step",
    "fixed_point_step",
    "gradient_step",
    "nesterov_step",
    "sinkhorn_plan",
    "sinkhorn_step",
    "solve",
]


class DivergenceError(RuntimeError):
    """Raised when an iterate stops being finite."""

    def __init__(self, algorithm: Algorithm, iteration: int):
        self.algorithm = algorithm
        self.iteration = iteration
        super().__init__(
            f"{algorithm.value} produced a non-finite iterate at iteration {iteration}; "
            "try a smaller stepsize or larger gamma"
        )


class CyclicProjectionState(NamedTuple):
    """Slack matrix rho >= 0 and the current potentials."""

    rho: np.ndarray
    potentials: DualPotentials


class NesterovState(NamedTuple):
    """Current and previous potentials plus the momentum counter n."""

    current: DualPotentials
    previous: DualPotentials
    n: int


def cyclic_projection_step(state: CyclicProjectionState, c, gamma, mu, nu) -> CyclicProjectionState:
    """One sweep of the cyclic block updates.

    In order: ``rho = max(c - alpha (+) beta, 0)``, then alpha from the
    row equations ``sum_j (rho + alpha (+) beta - c) = gamma mu``, then beta
    from the column equations using the already-updated alpha.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    c = np.asarray(c, dtype=float)
    n, m = c.shape
    alpha, beta = state.potentials
    rho = np.maximum(c - alpha[:, None] - beta[None, :], 0.0)
    rho_minus_c = rho - c
    alpha = (gamma / m) * (mu - (rho_minus_c.sum(axis=1) + beta.sum()) / gamma)
    beta = (gamma / n) * (nu - (rho_minus_c.sum(axis=0) + alpha.sum()) / gamma)
    return CyclicProjectionState(rho, DualPotentials(alpha, beta))


def gradient_step(pot: DualPotentials, c, gamma, mu, nu, tau=None, plan=None) -> DualPotentials:
    """One step of gradient descent on F.

    ``alpha' = alpha - tau gamma (pi 1 - mu)`` and likewise for beta, with
    the plan recovered once from the old potentials (pass ``plan`` to reuse
    a cached recovery).  Default stepsize is ``1 / (M + N)``.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    c = np.asarray(c, dtype=float)
    if tau is None:
        tau = 1.0 / (c.shape[0] + c.shape[1])
    if plan is None:
        plan = recover_plan(pot, c, gamma)
    alpha, beta = pot
    return DualPotentials(
        alpha - tau * gamma * (plan.sum(axis=1) - mu),
        beta - tau * gamma * (plan.sum(axis=0) - nu),
    )


def fixed_point_step(pot: DualPotentials, c, gamma, mu, nu, plan=None) -> DualPotentials:
    """One preconditioned fixed-point update.

    With residuals ``f = -gamma (pi 1 - mu)`` and ``g = -gamma (pi.T 1 - nu)``
    both taken at the old potentials, the update adds the preconditioned
    residuals: ``alpha += (f - sum(f)/(2N)) / M``, ``beta += (g - sum(g)/(2M)) / N``.
    Fixed points have zero residuals, i.e. the recovered plan is feasible
    and hence optimal.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    c = np.asarray(c, dtype=float)
    if plan is None:
        plan = recover_plan(pot, c, gamma)
    f = -gamma * (plan.sum(axis=1) - mu)
    g = -gamma * (plan.sum(axis=0) - nu)
    da, db = preconditioner_apply(f, g)
    alpha, beta = pot
    return DualPotentials(alpha + da, beta + db)


def nesterov_step(state: NesterovState, c, gamma, mu, nu, tau=None) -> NesterovState:
    """One accelerated gradient step with momentum ``sigma_n = n / (n + 3)``.

    Extrapolates ``bar = current + sigma_n (current - previous)``, recovers
    the plan at the extrapolated potentials, and takes a gradient step from
    there.  At ``n = 0`` this reduces to plain gradient descent.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    c = np.asarray(c, dtype=float)
    if tau is None:
        tau = 1.0 / (c.shape[0] + c.shape[1])
    cur, prev, n = state
    sigma = n / (n + 3.0)
    a_bar = cur.alpha + sigma * (cur.alpha - prev.alpha)
    b_bar = cur.beta + sigma * (cur.beta - prev.beta)
    plan = recover_plan(DualPotentials(a_bar, b_bar), c, gamma)
    new = DualPotentials(
        a_bar - tau * gamma * (plan.sum(axis=1) - mu),
        b_bar - tau * gamma * (plan.sum(axis=0) - nu),
    )
    return NesterovState(new, cur, n + 1)


def sinkhorn_step(u, v, K, mu, nu):
    """One Sinkhorn scaling sweep: ``u' = mu / (K v)``, ``v' = nu / (K.T u')``.

    ``K`` must be the positive kernel ``exp(-c / gamma)``.  The plan after a
    sweep is ``diag(u') K diag(v')`` and has exact column sums.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    Kv = K @ v
    if not np.all(Kv > 0):
        raise ZeroDivisionError("Sinkhorn denominator underflowed to zero; use a larger gamma")
    u = mu / Kv
    Ktu = K.T @ u
    if not np.all(Ktu > 0):
        raise ZeroDivisionError("Sinkhorn denominator underflowed to zero; use a larger gamma")
    v = nu / Ktu
    return u, v


def sinkhorn_plan(u, v, K) -> np.ndarray:
    """Plan induced by scaling vectors: ``diag(u) K diag(v)``."""
    return u[:, None] * K * v[None, :]


def _sinkhorn_potentials(u, v, gamma) -> DualPotentials:
    # Shift log u, log v so the plan is exp((alpha (+) beta - c)/gamma - 1),
    # the maximizer form of the entropic conjugate.
    return DualPotentials(gamma * (np.log(u) + 0.5), gamma * (np.log(v) + 0.5))


_ENTROPY = Entropy()


def _diagnostics(algorithm, plan, pot, c, gamma, mu, nu):
    """(dual bound, primal objective, gap) for one history row."""
    alpha, beta = pot
    if algorithm is Algorithm.SINKHORN:
        primal = float((c * plan).sum() + gamma * _ENTROPY.value(plan).sum())
        dual = float(alpha @ mu + beta @ nu - gamma * plan.sum())
    else:
        sq = float((plan * plan).sum())
        primal = float((c * plan).sum() + 0.5 * gamma * sq)
        dual = float(alpha @ mu + beta @ nu - 0.5 * gamma * sq)
    return dual, primal, primal - dual


def solve(mu, nu, c, config: SolverConfig) -> ConvergenceReport:
    """Run the configured algorithm from zero potentials until the maximal
    marginal violation of the recovered plan drops to ``config.tol`` or the
    iteration cap is reached.

    Parameters
    ----------
    mu, nu : DiscreteMeasure or array-like
        Marginals with equal total mass (and strictly positive weights for
        the Sinkhorn baseline).
    c : array-like, shape (N, M)
        Cost matrix, finite entries.
    config : SolverConfig
        Algorithm, gamma, tolerances, stepsize and history options.

    Returns
    -------
    ConvergenceReport
        Final plan (the clipped recovery ``max(alpha (+) beta - c, 0)/gamma``
        for the dual methods, the scaled kernel for Sinkhorn), final
        potentials, iteration count, convergence flag and recorded history.

    Raises
    ------
    DivergenceError
        If an iterate stops being finite.
    """
    mu, nu = as_weights(mu), as_weights(nu)
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape != (mu.size, nu.size):
        raise ValueError(f"cost shape {c.shape} does not match marginals ({mu.size}, {nu.size})")
    if not np.isfinite(c).all():
        raise ValueError("cost matrix must be finite")
    check_mass_balance(mu, nu)

    n, m = c.shape
    gamma = config.gamma
    alg = config.algorithm
    tau = config.tau if config.tau is not None else 1.0 / (n + m)

    sinkhorn = alg is Algorithm.SINKHORN
    if sinkhorn:
        if (mu <= 0).any() or (nu <= 0).any():
            raise ValueError("Sinkhorn requires strictly positive marginals")
        K = np.exp(-c / gamma)
        u, v = np.ones(n), np.ones(m)
        pot = _sinkhorn_potentials(u, v, gamma)
        plan = sinkhorn_plan(u, v, K)
    else:
        pot = DualPotentials(np.zeros(n), np.zeros(m))
        plan = recover_plan(pot, c, gamma)
        if alg is Algorithm.CYCLIC_PROJECTION:
            rho = np.zeros((n, m))
        elif alg is Algorithm.NESTEROV:
            nesterov = NesterovState(pot, pot, 0)

    history: list[HistoryEntry] = []
    t0 = time.perf_counter()
    converged = False
    iterations = 0

    # overflow on a diverging run is reported via DivergenceError, not warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, config.max_iters + 1):
            if alg is Algorithm.CYCLIC_PROJECTION:
                rho, pot = cyclic_projection_step(CyclicProjectionState(rho, pot), c, gamma, mu, nu)
            elif alg is Algorithm.DUAL_GRADIENT:
                pot = gradient_step(pot, c, gamma, mu, nu, tau, plan=plan)
            elif alg is Algorithm.FIXED_POINT:
                pot = fixed_point_step(pot, c, gamma, mu, nu, plan=plan)
            elif alg is Algorithm.NESTEROV:
                nesterov = nesterov_step(nesterov, c, gamma, mu, nu, tau)
                pot = nesterov.current
            else:
                u, v = sinkhorn_step(u, v, K, mu, nu)
                pot = _sinkhorn_potentials(u, v, gamma)

            plan = sinkhorn_plan(u, v, K) if sinkhorn else recover_plan(pot, c, gamma)
            viol = max_violation(plan, mu, nu)
            if not (np.isfinite(viol) and np.isfinite(pot.alpha).all() and np.isfinite(pot.beta).all()):
                raise DivergenceError(alg, it)

            iterations = it
            converged = viol <= config.tol
            if config.record_history and (
                converged or it == config.max_iters or it % config.history_stride == 0
            ):
                dual, primal, gap = _diagnostics(alg, plan, pot, c, gamma, mu, nu)
                history.append(
                    HistoryEntry(it, viol, dual, primal, gap, time.perf_counter() - t0)
                )
            if converged:
                break

    return ConvergenceReport(
        algorithm=alg,
        iterations=iterations,
        converged=converged,
        final_plan=plan,
        final_potentials=pot,
        history=tuple(history),
    )
