"""Leading eigenpairs of (views of) the follower adjacency by power iteration.

The left eigenvector is the eigenvector-centrality vector: a user's entry is
proportional to the summed entries of their followers. Iterations act through
the view's masked matvec, so each step costs O(m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counterhash import uniform
from .errors import InputError
from .graph import DirectedGraph, EdgeView

__all__ = ["EigenResult", "SpectralConfig", "leading_left_eigenpair",
           "leading_right_eigenpair"]

NILPOTENT = "nilpotent_or_zero"
UNCONVERGED = "unconverged"


@dataclass(frozen=True)
class SpectralConfig:
    """Power-iteration settings shared across scoring calls."""

    tol: float = 1e-10
    max_iter: int = 10000
    seed: int = 0


@dataclass(frozen=True)
class EigenResult:
    """Converged (or flagged) leading eigenpair estimate.

    ``flag`` is None on success; ``nilpotent_or_zero`` marks an acyclic view
    whose vector is the documented normalized in-degree fallback, not an
    eigenvector; ``unconverged`` marks an iteration-budget exhaustion.
    """

    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    flag: str | None = None

    @property
    def converged(self) -> bool:
        return self.flag is None


def _as_view(view) -> EdgeView:
    return view.full_view() if isinstance(view, DirectedGraph) else view


def _fallback(view: EdgeView) -> np.ndarray:
    # in-degree stands in for the undefined Perron vector on acyclic views
    d = view.in_degrees().astype(np.float64)
    if not d.any():
        d = np.ones(view.node_count)
    return d / np.linalg.norm(d)


def _power_iteration(view: EdgeView, apply_op, tol: float, max_iter: int,
                     seed: int, salt: int) -> EigenResult:
    if tol <= 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    n = view.node_count
    if n == 0:
        return EigenResult(0.0, np.zeros(0), 0, 0.0, flag=NILPOTENT)
    if view.is_acyclic():
        return EigenResult(0.0, _fallback(view), 0, 0.0, flag=NILPOTENT)
    # strictly positive start: ones plus a tiny seeded jitter that breaks
    # symmetric stalls without disturbing converged answers
    x = np.ones(n) + 1e-6 * uniform(seed, np.arange(n), salt)
    x /= np.linalg.norm(x)
    lam = 0.0
    residual = np.inf
    iterations = 0
    for it in range(1, max_iter + 1):
        iterations = it
        z = apply_op(x)
        z /= np.linalg.norm(z)
        # averaging consecutive normalized iterates recovers the Cesaro limit
        # on periodic components, where the plain iteration oscillates
        v = x + z
        v /= np.linalg.norm(v)
        av = apply_op(v)
        lam = float(v @ av)
        residual = float(np.linalg.norm(av - lam * v))
        if residual <= tol * max(lam, 1.0):
            return EigenResult(lam, v, it, residual)
        x = v
    return EigenResult(lam, x, iterations, residual, flag=UNCONVERGED)


def leading_left_eigenpair(view: EdgeView | DirectedGraph, tol: float = 1e-10,
                           max_iter: int = 10000, seed: int = 0) -> EigenResult:
    """Leading left eigenpair via power iteration on x <- A^T x.

    The converged vector y is nonnegative with unit Euclidean norm and
    satisfies y_j = (1/lambda) * sum over followers i of y_i within the
    residual tolerance ``tol * max(lambda, 1)``.
    """
    v = _as_view(view)
    return _power_iteration(v, v.rmatvec, tol, max_iter, seed, salt=1)


def leading_right_eigenpair(view: EdgeView | DirectedGraph, tol: float = 1e-10,
                            max_iter: int = 10000, seed: int = 0) -> EigenResult:
    """Leading right eigenpair via power iteration on x <- A x."""
    v = _as_view(view)
    return _power_iteration(v, v.matvec, tol, max_iter, seed, salt=2)
