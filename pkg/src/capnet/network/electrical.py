"""Kirchhoff voltage, discrete capacity and the dual (Thompson) current."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..exceptions import DisconnectedError
from .graph import OrientedGraph, check_network, incidence_matrix, support_components

DENSE_LIMIT = 500
SOLVER_RTOL = 1e-12


@dataclass(frozen=True)
class NetworkSolution:
    """Minimizer of the discrete Dirichlet problem between ``u`` and ``w``.

    ``phi`` is 1 at ``u`` and 0 at ``w``;  it is NaN at vertices that no
    positive-admittance path joins to the terminals. ``current`` (when
    computed) satisfies ``D @ current = delta_u - delta_w``.
    """

    lam: float
    log_lam: float
    phi: np.ndarray
    u: int
    w: int
    energy: float
    connected: bool = True
    current: Optional[np.ndarray] = None
    dual_value: Optional[float] = None

    @property
    def voltage(self) -> float:
        return math.inf if self.lam == 0.0 else 1.0 / self.lam


def _reduced_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    if n <= DENSE_LIMIT:
        try:
            return sla.cho_solve(sla.cho_factor(L, check_finite=False), rhs, check_finite=False)
        except np.linalg.LinAlgError:
            return sla.solve(L, rhs, check_finite=False)
    A = sp.csr_matrix(L)
    M = sp.diags(1.0 / A.diagonal())
    x, info = spla.cg(A, rhs, M=M, rtol=SOLVER_RTOL, maxiter=50 * n)
    if info != 0:
        raise DisconnectedError(f"conjugate gradient did not converge (info={info})")
    return x


def _grounded_potential(g: OrientedGraph, y, u: int, w: int):
    """Solve ``L psi = delta_w`` with ``psi_u = 0`` on the terminals' component.

    Weights are rescaled by their largest entry first; returns ``psi`` on the
    scaled network, the log of that scale, and the component mask.
    """
    if u == w:
        raise ValueError("terminals must differ")
    for x in (u, w):
        if not 0 <= x < g.vertex_count:
            raise ValueError(f"vertex {x} out of range")
    comp = support_components(g, y)
    if comp[u] != comp[w]:
        raise DisconnectedError(f"vertices {u} and {w} are not joined by positive-admittance edges")
    mask = comp == comp[u]
    log_scale = float(np.max(y.log_values))
    ys = np.exp(y.log_values - log_scale)
    D = incidence_matrix(g)
    L = (D * ys) @ D.T
    L = 0.5 * (L + L.T)
    idx = [v for v in np.flatnonzero(mask) if v != u]
    Lr = L[np.ix_(idx, idx)]
    rhs = np.zeros(len(idx))
    rhs[idx.index(w)] = 1.0
    psi = np.full(g.vertex_count, np.nan)
    psi[u] = 0.0
    psi[idx] = _reduced_solve(Lr, rhs)
    return psi, ys, log_scale, mask, D


def kirchhoff_voltage(g: OrientedGraph, y, u: int, w: int) -> float:
    """``phi_w`` for ``L phi = delta_w`` grounded at ``u``; equals T(G/uw)/T(G)."""
    y = check_network(g, y)
    psi, _, log_scale, _, _ = _grounded_potential(g, y, u, w)
    return float(psi[w] * math.exp(-log_scale))


def capacity(g: OrientedGraph, y, u: int, w: int) -> NetworkSolution:
    """Discrete capacity ``min <L phi, phi>`` with ``phi_u = 1``, ``phi_w = 0``.

    Disconnected terminals give ``lam = 0`` and an all-NaN ``phi`` with
    ``connected=False`` instead of raising.
    """
    y = check_network(g, y)
    try:
        psi, ys, log_scale, mask, D = _grounded_potential(g, y, u, w)
    except DisconnectedError:
        if u == w:
            raise
        return NetworkSolution(0.0, -math.inf, np.full(g.vertex_count, np.nan), u, w, 0.0,
                               connected=False)
    v_scaled = psi[w]
    phi = 1.0 - psi / v_scaled
    phi[u], phi[w] = 1.0, 0.0
    grad = D.T @ np.where(mask, phi, 0.0)
    energy_scaled = float(np.sum(ys * grad**2))
    log_lam = log_scale - math.log(v_scaled)
    return NetworkSolution(
        lam=math.exp(log_lam) if log_lam < 709 else math.inf,
        log_lam=log_lam,
        phi=phi,
        u=u,
        w=w,
        energy=energy_scaled * math.exp(log_scale),
    )


def dual_current(g: OrientedGraph, y, u: int, w: int) -> NetworkSolution:
    """Capacity solution augmented with the optimal current ``j = Y D^T phi / lam``
    and its dual energy ``<Y^-1 j, j>`` (which equals ``1/lam``)."""
    y = check_network(g, y)
    sol = capacity(g, y, u, w)
    if not sol.connected:
        raise DisconnectedError(f"vertices {u} and {w} are not joined by positive-admittance edges")
    log_scale = float(np.max(y.log_values))
    ys = np.exp(y.log_values - log_scale)
    lam_scaled = math.exp(sol.log_lam - log_scale)
    D = incidence_matrix(g)
    grad = D.T @ np.nan_to_num(sol.phi, nan=0.0)
    j = ys * grad / lam_scaled
    carrying = np.abs(j) > 0
    if np.any(carrying & (ys == 0.0)):
        raise ValueError("zero-admittance edge would have to carry current")
    pos = ys > 0
    dual_scaled = float(np.sum(j[pos] ** 2 / ys[pos]))
    return NetworkSolution(
        lam=sol.lam, log_lam=sol.log_lam, phi=sol.phi, u=u, w=w, energy=sol.energy,
        current=j, dual_value=dual_scaled * math.exp(-log_scale),
    )
