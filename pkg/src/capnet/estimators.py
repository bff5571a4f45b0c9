"""Estimator-style wrappers: ``fit`` a landscape, ``predict`` capacities over ``eps``."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .landscape import Potential, analyze_landscape
from .network import capacity
from .oracle import GridProblem, solve_capacity


def check_eps(eps) -> np.ndarray:
    """1-D array of positive finite noise levels."""
    arr = check_array(np.atleast_1d(np.asarray(eps, dtype=float)).reshape(-1, 1), ensure_all_finite=True)
    arr = arr.ravel()
    if np.any(arr <= 0):
        raise ValueError("eps values must be positive")
    return arr


def check_point(x, dimension: int) -> np.ndarray:
    arr = check_array(np.asarray(x, dtype=float).reshape(1, -1), ensure_all_finite=True).ravel()
    if arr.size != dimension:
        raise ValueError(f"expected a point with {dimension} coordinates, got {arr.size}")
    return arr


def _check_potential(p):
    if not isinstance(p, Potential):
        raise TypeError("fit expects a Potential")
    return p


class NetworkCapacity(BaseEstimator):
    """Capacity predicted by the island/bridge network.

    ``predict_log(eps)`` is ``log lambda(y(eps)) - level / eps``.
    """

    def __init__(self, delta=None, grid_n=256, method="auto"):
        self.delta = delta
        self.grid_n = grid_n
        self.method = method

    def fit(self, potential, a, b, overrides=()):
        p = _check_potential(potential)
        a, b = check_point(a, p.dimension), check_point(b, p.dimension)
        self.network_ = analyze_landscape(p, a, b, self.delta, self.grid_n, overrides)
        self.level_ = self.network_.level
        self.delta_ = self.network_.delta
        self.n_edges_ = self.network_.graph.edge_count
        return self

    def transform(self, eps) -> np.ndarray:
        """Log admittances, one row per ``eps``."""
        check_is_fitted(self, "network_")
        return np.stack([self.network_.admittance(e, self.method).log_values for e in check_eps(eps)])

    def predict_log(self, eps) -> np.ndarray:
        check_is_fitted(self, "network_")
        net = self.network_
        out = []
        for e in check_eps(eps):
            sol = capacity(net.graph, net.admittance(e, self.method), net.u, net.w)
            out.append(sol.log_lam + net.log_offset(e))
        return np.array(out)

    def predict(self, eps) -> np.ndarray:
        return np.exp(self.predict_log(eps))


class OracleCapacity(BaseEstimator):
    """Finite-difference capacity between ``B_eps(a)`` and ``B_eps(b)``."""

    def __init__(self, grid_n=400, solver="direct"):
        self.grid_n = grid_n
        self.solver = solver

    def fit(self, potential, a, b, level=None, delta=None):
        p = _check_potential(potential)
        self.potential_ = p
        self.a_ = check_point(a, p.dimension)
        self.b_ = check_point(b, p.dimension)
        self.level_ = level
        self.delta_ = delta
        self.results_ = {}
        return self

    def solve(self, eps: float):
        check_is_fitted(self, "potential_")
        gp = GridProblem.from_potential(self.potential_, float(eps), self.a_, self.b_, self.grid_n,
                                        self.level_, self.delta_)
        result = solve_capacity(gp, self.solver)
        self.results_[float(eps)] = (gp, result)
        return gp, result

    def predict_log(self, eps) -> np.ndarray:
        return np.array([self.solve(e)[1].log_capacity for e in check_eps(eps)])

    def predict(self, eps) -> np.ndarray:
        return np.exp(self.predict_log(eps))
