"""Core types and elementary operations for discrete transport problems.

Transport plans and cost matrices are plain ``(N, M)`` float arrays.  The
classes below wrap the structured pieces shared across the package: uniform
1D grids, measures as cell-mass vectors, solver configuration, and run
reports.  All values are immutable after construction and every operation
is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

__all__ = [
    "Algorithm",
    "ConvergenceReport",
    "DiscreteMeasure",
    "DualPotentials",
    "Grid1D",
    "HistoryEntry",
    "SolverConfig",
    "as_weights",
    "check_mass_balance",
    "marginals",
    "max_violation",
    "primal_objective",
]

# Relative tolerance for the equal-mass requirement on the two marginals.
MASS_BALANCE_RTOL = 1e-12


@dataclass(frozen=True)
class Grid1D:
    """Uniform, cell-centered grid with ``n`` cells on ``[a, b]``."""

    n: int
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError("grid size n must be a positive integer")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError("grid endpoints must be finite with a < b")

    @property
    def h(self) -> float:
        """Cell width ``(b - a) / n``."""
        return (self.b - self.a) / self.n

    @property
    def points(self) -> np.ndarray:
        """Cell centers ``a + (i + 1/2) h``, strictly increasing."""
        return self.a + (np.arange(self.n) + 0.5) * self.h

    @property
    def length(self) -> float:
        """Domain length ``b - a``."""
        return self.b - self.a


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative cell masses on a 1D grid.

    Weights are masses per cell (already integrated against cell width), so
    marginal constraints reduce to plain vector sums.
    """

    grid: Grid1D
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} weights, got shape {w.shape}")
        if not np.isfinite(w).all():
            raise ValueError("measure weights must be finite")
        if (w < 0).any():
            raise ValueError("measure weights must be nonnegative")
        object.__setattr__(self, "w", w)

    @property
    def mass(self) -> float:
        return float(self.w.sum())


class DualPotentials(NamedTuple):
    """Dual vector pair (alpha, beta) of lengths N and M.

    A plan is recovered from potentials as
    ``pi[i, j] = max(alpha[i] + beta[j] - c[i, j], 0) / gamma``.
    """

    alpha: np.ndarray
    beta: np.ndarray


class Algorithm(Enum):
    """Iterative methods understood by :func:`qrot.solvers.solve`."""

    CYCLIC_PROJECTION = "cyclic_projection"
    DUAL_GRADIENT = "dual_gradient"
    FIXED_POINT = "fixed_point"
    NESTEROV = "nesterov"
    SINKHORN = "sinkhorn"


@dataclass(frozen=True)
class SolverConfig:
    """Options for a solver run.

    Parameters
    ----------
    gamma : float
        Regularization weight, > 0.
    algorithm : Algorithm
        Which iteration to run.
    tol : float
        Stop once the maximal marginal violation drops to this level.
    max_iters : int
        Iteration cap, >= 1.
    tau : float or None
        Stepsize for the gradient-type methods; defaults to ``1 / (N + M)``.
    record_history : bool
        Keep per-iteration diagnostics in the report.
    history_stride : int
        Thin the recorded history to every k-th iteration (the final
        iteration is always kept).
    """

    gamma: float
    algorithm: Algorithm
    tol: float = 1e-6
    max_iters: int = 100_000
    tau: float | None = None
    record_history: bool = True
    history_stride: int = 1

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError("gamma must be positive")
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if not (isinstance(self.max_iters, (int, np.integer)) and self.max_iters >= 1):
            raise ValueError("max_iters must be an integer >= 1")
        if self.tau is not None and not (self.tau > 0):
            raise ValueError("tau must be positive when given")
        if not (isinstance(self.history_stride, (int, np.integer)) and self.history_stride >= 1):
            raise ValueError("history_stride must be an integer >= 1")
        if not isinstance(self.algorithm, Algorithm):
            raise ValueError("algorithm must be an Algorithm member")


class HistoryEntry(NamedTuple):
    """One recorded iteration of a solver run."""

    iteration: int
    max_violation: float
    dual_objective: float
    primal_objective: float
    duality_gap: float
    elapsed_s: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of a solver run.

    ``history`` rows carry (iteration, max_violation, dual_objective,
    primal_objective, duality_gap, elapsed_s), where ``dual_objective`` is
    the dual lower bound matching ``duality_gap = primal - dual`` row-wise.
    """

    algorithm: Algorithm
    iterations: int
    converged: bool
    final_plan: np.ndarray
    final_potentials: DualPotentials
    history: tuple[HistoryEntry, ...]


def as_weights(m) -> np.ndarray:
    """Return the weight vector of a measure, passing arrays through."""
    if isinstance(m, DiscreteMeasure):
        return m.w
    return np.asarray(m, dtype=float)


def check_mass_balance(mu, nu) -> None:
    """Reject marginal pairs whose total masses differ beyond rounding."""
    mu = as_weights(mu)
    nu = as_weights(nu)
    sm, sn = float(mu.sum()), float(nu.sum())
    if abs(sm - sn) > MASS_BALANCE_RTOL * max(sm, sn):
        raise ValueError(f"marginals must carry equal total mass (got {sm!r} vs {sn!r})")


def marginals(pi) -> tuple[np.ndarray, np.ndarray]:
    """Row and column sums of a plan: ``(pi @ 1, pi.T @ 1)``."""
    pi = np.asarray(pi, dtype=float)
    return pi.sum(axis=1), pi.sum(axis=0)


def max_violation(pi, mu, nu) -> float:
    """Maximal marginal constraint violation of a plan.

    Returns ``max(||pi 1 - mu||_inf, ||pi.T 1 - nu||_inf)``, the quantity
    all stopping rules and convergence curves are based on.
    """
    pi = np.asarray(pi, dtype=float)
    mu = as_weights(mu)
    nu = as_weights(nu)
    if pi.shape != (mu.size, nu.size):
        raise ValueError(f"plan shape {pi.shape} does not match marginals ({mu.size}, {nu.size})")
    row, col = marginals(pi)
    return float(max(np.abs(row - mu).max(), np.abs(col - nu).max()))


def primal_objective(pi, c, gamma: float) -> float:
    """Transport cost plus quadratic penalty: ``<c, pi> + (gamma/2) ||pi||_F^2``."""
    pi = np.asarray(pi, dtype=float)
    c = np.asarray(c, dtype=float)
    if pi.shape != c.shape:
        raise ValueError(f"plan shape {pi.shape} does not match cost shape {c.shape}")
    if not (gamma > 0):
        raise ValueError("gamma must be positive")
    return float((c * pi).sum() + 0.5 * gamma * (pi * pi).sum())
