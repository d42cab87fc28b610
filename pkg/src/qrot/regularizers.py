"""Convex regularizers, their nonnegativity-extended conjugates, and
Luxemburg norms of piecewise-constant grid functions.

Each regularizer is a convex function ``phi`` with ``phi(0) = 0``.  Its
nonnegativity extension sets ``phi(t) = +inf`` for ``t < 0``, which encodes
the positivity constraint on transport plans; the conjugate of that
extension, ``sup_{t >= 0} (s t - phi(t))``, is the integrand of the dual
transport objective and is provided in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid1D

__all__ = [
    "Entropy",
    "GridFunction",
    "PPower",
    "Quadratic",
    "YoungFunction",
    "luxemburg_norm",
    "marginal_contraction_check",
]


class YoungFunction:
    """Base class for the regularizers; subclasses supply the formulas.

    All three methods accept scalars or arrays and broadcast elementwise.
    """

    def value(self, t):
        """phi(t) for t >= 0."""
        raise NotImplementedError

    def derivative(self, t):
        """phi'(t) for t > 0."""
        raise NotImplementedError

    def conjugate_nonneg(self, s):
        """Conjugate of the nonnegativity extension, sup_{t>=0}(s t - phi(t))."""
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)


class Quadratic(YoungFunction):
    """phi(t) = t^2 / 2, the quadratic regularizer."""

    def value(self, t):
        t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
        return 0.5 * t * t

    def derivative(self, t):
        return np.asarray(t, dtype=float) if np.ndim(t) else float(t)

    def conjugate_nonneg(self, s):
        # sup over t >= 0 is attained at t = max(s, 0)
        return 0.5 * np.maximum(s, 0.0) ** 2

    def __repr__(self):
        return "Quadratic()"


class Entropy(YoungFunction):
    """phi(t) = t log t with phi(0) = 0, the entropic regularizer."""

    def value(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)

    def derivative(self, t):
        return np.log(t) + 1.0

    def conjugate_nonneg(self, s):
        # first-order condition s = log t + 1 gives the maximizer t = e^(s-1)
        return np.exp(np.asarray(s, dtype=float) - 1.0)

    def __repr__(self):
        return "Entropy()"


class PPower(YoungFunction):
    """phi(t) = t^p / p for an exponent p > 1.

    The conjugate of the nonnegativity extension is ``max(s, 0)^q / q`` with
    ``1/p + 1/q = 1``.
    """

    def __init__(self, p: float):
        if not (p > 1):
            raise ValueError("exponent p must exceed 1")
        self.p = float(p)
        self.q = self.p / (self.p - 1.0)

    def value(self, t):
        return np.power(t, self.p) / self.p

    def derivative(self, t):
        return np.power(t, self.p - 1.0)

    def conjugate_nonneg(self, s):
        return np.power(np.maximum(s, 0.0), self.q) / self.q

    def __repr__(self):
        return f"PPower(p={self.p})"


@dataclass(frozen=True)
class GridFunction:
    """Piecewise-constant function on a 1D grid or a product of two grids.

    ``values`` holds one value per cell: a vector for a 1D grid, an
    ``(n1, n2)`` matrix for a product grid.
    """

    grid: Grid1D | tuple[Grid1D, Grid1D]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if isinstance(self.grid, Grid1D):
            expected = (self.grid.n,)
        else:
            g1, g2 = self.grid
            expected = (g1.n, g2.n)
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} does not match grid shape {expected}")
        object.__setattr__(self, "values", values)

    @property
    def cell_volume(self) -> float:
        if isinstance(self.grid, Grid1D):
            return self.grid.h
        g1, g2 = self.grid
        return g1.h * g2.h


def luxemburg_norm(f: GridFunction, phi: YoungFunction) -> float:
    """Luxemburg norm ``inf { lam > 0 : sum phi(|f| / lam) * cellvol <= 1 }``.

    Computed by bisection to relative tolerance 1e-10.  The sub-level set
    ``{lam : constraint holds}`` is a half-line because the constraint is a
    convex function of ``1/lam`` that vanishes at 0, so bisecting on the
    boolean predicate is exact up to the tolerance.  Returns 0 for the zero
    function.
    """
    vals = np.abs(np.asarray(f.values, dtype=float))
    if not np.isfinite(vals).all():
        raise ValueError("grid function has non-finite values")
    if not vals.any():
        return 0.0
    vol = f.cell_volume

    def satisfied(lam: float) -> bool:
        with np.errstate(over="ignore"):
            total = float(np.sum(phi.value(vals / lam)) * vol)
        return np.isfinite(total) and total <= 1.0

    hi = 1.0
    while not satisfied(hi):
        hi *= 2.0
    lo = 1e-300
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    return hi


def marginal_contraction_check(pi: GridFunction, phi: YoungFunction) -> bool:
    """Check that both marginals of a nonnegative plan obey the norm bound
    ``lux(marginal_i) <= max(1, |domain of the other variable|) * lux(pi)``
    up to 1e-9 slack.

    Marginals are exact integrals of the piecewise-constant plan over one
    coordinate, i.e. row/column sums times the opposite cell width.
    """
    if isinstance(pi.grid, Grid1D):
        raise ValueError("expected a function on a product grid")
    if (pi.values < 0).any():
        raise ValueError("plan values must be nonnegative")
    g1, g2 = pi.grid
    lux_pi = luxemburg_norm(pi, phi)
    m1 = GridFunction(g1, pi.values.sum(axis=1) * g2.h)
    m2 = GridFunction(g2, pi.values.sum(axis=0) * g1.h)
    ok1 = luxemburg_norm(m1, phi) <= max(1.0, g2.length) * lux_pi + 1e-9
    ok2 = luxemburg_norm(m2, phi) <= max(1.0, g1.length) * lux_pi + 1e-9
    return ok1 and ok2
