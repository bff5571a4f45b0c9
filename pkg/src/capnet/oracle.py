"""Finite-difference capacity oracle in two dimensions.

Cell-centered grid, 5-point stencil for ``div(w grad h) = 0`` with
``w = exp(-(F - level)/eps)``. Face conductances use the geometric mean of
the two cell weights, i.e. the exponential of the mean log-weight.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .exceptions import OracleError
from .landscape.potential import Potential
from .landscape.topology import Grid, communication_height

LOG_WEIGHT_CLIP = (-700.0, 300.0)
MIN_BALL_CELLS = 3
CG_RTOL = 1e-10
REFINE_STEPS = 1


@dataclass
class GridProblem:
    """Discrete capacitor on a box with natural boundary conditions.

    ``log_weight`` holds ``-(F - level)/eps`` per cell; the physical
    capacity is the computed one times ``exp(log_offset)``.
    """

    grid: Grid
    log_weight: np.ndarray
    A: np.ndarray
    B: np.ndarray
    eps: float
    log_offset: float = 0.0
    _faces: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if self.grid.box.shape[0] != 2:
            raise OracleError("the oracle is two-dimensional")
        lw = np.asarray(self.log_weight, dtype=float)
        if lw.shape != self.grid.shape or self.A.shape != lw.shape or self.B.shape != lw.shape:
            raise OracleError("weight and mask shapes must match the grid")
        if not np.all(np.isfinite(lw)):
            raise OracleError("log-weights must be finite")
        if not self.A.any() or not self.B.any():
            raise OracleError("A and B must be nonempty")
        if (self.A & self.B).any():
            raise OracleError("A and B must be disjoint")
        if not self.eps > 0:
            raise OracleError("eps must be positive")
        self.log_weight = lw

    @classmethod
    def from_potential(cls, p: Potential, eps: float, a, b, grid_n: int = 400,
                       level: Optional[float] = None, delta: Optional[float] = None) -> "GridProblem":
        """Balls ``B_eps(a)``, ``B_eps(b)``; the grid is refined until each
        ball radius spans at least three cells."""
        box = p.box
        n = max(int(grid_n), int(math.ceil(MIN_BALL_CELLS * float(np.max(box[:, 1] - box[:, 0])) / eps)))
        grid = Grid.square(box, n)
        pts = grid.points()
        F = p(pts)
        if level is None:
            level = communication_height(p, a, b, min(n, 512)).value
        if delta is not None:
            edge = np.concatenate([F[0], F[-1], F[:, 0], F[:, -1]])
            if edge.min() <= level + delta / 3.0:
                raise OracleError("box boundary meets {F < level + delta/3}; enlarge the box")
        lw = np.clip(-(F - level) / eps, *LOG_WEIGHT_CLIP)
        A = np.sum((pts - np.asarray(a, float)) ** 2, -1) < eps * eps
        B = np.sum((pts - np.asarray(b, float)) ** 2, -1) < eps * eps
        return cls(grid, lw, A, B, eps, -level / eps + 0.0)

    def faces(self):
        """``(i, j, c)``: flat cell indices of each interior face and its conductance."""
        if self._faces is None:
            nx, ny = self.grid.shape
            dx, dy = self.grid.spacing
            idx = np.arange(nx * ny).reshape(nx, ny)
            L = self.log_weight
            i1, j1 = idx[:-1, :].ravel(), idx[1:, :].ravel()
            c1 = np.exp(0.5 * (L[:-1, :] + L[1:, :]).ravel()) * (dy / dx)
            i2, j2 = idx[:, :-1].ravel(), idx[:, 1:].ravel()
            c2 = np.exp(0.5 * (L[:, :-1] + L[:, 1:]).ravel()) * (dx / dy)
            self._faces = (np.concatenate([i1, i2]), np.concatenate([j1, j2]), np.concatenate([c1, c2]))
        return self._faces

    def stiffness(self) -> sp.csr_matrix:
        i, j, c = self.faces()
        n = self.log_weight.size
        off = sp.coo_matrix((np.concatenate([-c, -c]), (np.concatenate([i, j]), np.concatenate([j, i]))),
                            shape=(n, n)).tocsr()
        return (off + sp.diags(-np.asarray(off.sum(axis=1)).ravel())).tocsr()


@dataclass
class OracleResult:
    capacity_scaled: float
    log_capacity: float
    h: np.ndarray
    flux_in: float
    flux_out: float
    energy: float
    residual: float
    solver: str
    iterations: int
    shape: Tuple[int, int]
    face_differences: np.ndarray = field(default=None, repr=False)

    @property
    def capacity(self) -> float:
        return math.exp(self.log_capacity)


def solve_capacity(gp: GridProblem, solver: str = "direct", rtol: float = CG_RTOL) -> OracleResult:
    """Dirichlet ``h = 1`` on A, ``0`` on B; capacity ``eps * sum c (dh)^2``.

    ``solver="direct"`` factors the diagonally scaled system once and applies
    one step of iterative refinement; ``solver="cg"`` runs Jacobi-preconditioned
    CG with an iteration cap of ``50 N``.
    """
    K = gp.stiffness()
    fixed = (gp.A | gp.B).ravel()
    free = ~fixed
    d = K.diagonal()[free]
    if np.any(d <= 0):
        raise OracleError("a free cell has no conducting face")
    s = 1.0 / np.sqrt(d)
    S = sp.diags(s)
    Kff = K[free][:, free].tocsc()
    Kfx = K[free][:, fixed]
    M = (S @ Kff @ S).tocsc()
    # h and 1 - h are both solved; each face difference is taken from the
    # field that is small there, which keeps deep wells from losing digits
    fields = []
    solve = _direct_solver(M) if solver == "direct" else _cg_solver(M, rtol, 50 * max(gp.grid.shape))
    iterations = 0
    residual = 0.0
    for mask in (gp.A, gp.B):
        hval = np.where(mask.ravel(), 1.0, 0.0)
        rhs = -(Kfx @ hval[fixed])
        z, its = solve(rhs * s)
        iterations += its
        hf = z * s
        if not np.all(np.isfinite(hf)):
            raise OracleError("solution is not finite; A and B may be disconnected")
        residual = max(residual, float(np.linalg.norm(Kff @ hf - rhs) / max(np.linalg.norm(rhs), 1e-300)))
        full = hval.copy()
        full[free] = hf
        fields.append(full)
    h, g = fields
    i, j, c = gp.faces()
    upper = np.minimum(h[i], h[j]) >= 0.5
    dh = np.where(upper, g[j] - g[i], h[i] - h[j])
    energy = float(np.sum(c * dh * dh))
    flux_in = _mask_flux(gp.A.ravel(), i, j, c, dh)
    flux_out = -_mask_flux(gp.B.ravel(), i, j, c, dh)
    h = np.where(h < 0.5, h, 1.0 - g)
    cap = gp.eps * energy
    if not cap > 0:
        raise OracleError("zero capacity: A and B are disconnected")
    return OracleResult(cap, math.log(cap) + gp.log_offset, h.reshape(gp.grid.shape), flux_in, flux_out,
                        energy, residual, solver, iterations, tuple(gp.grid.shape), dh)


def _direct_solver(M):
    lu = spl.splu(M)

    def solve(b):
        z = lu.solve(b)
        for _ in range(REFINE_STEPS):
            z = z + lu.solve(b - M @ z)
        return z, 1 + REFINE_STEPS
    return solve


def _cg_solver(M, rtol, cap):
    def solve(b):
        counter = [0]

        def tick(_):
            counter[0] += 1

        z, info = spl.cg(M, b, rtol=rtol, atol=0.0, maxiter=cap, callback=tick)
        if info != 0:
            r = float(np.linalg.norm(b - M @ z) / np.linalg.norm(b))
            raise OracleError(f"CG did not converge in {cap} iterations", residual=r)
        return z, counter[0]
    return solve


def _mask_flux(mask, i, j, c, dh):
    """Outflow from ``mask`` summed over the faces leaving it (``dh = h_i - h_j``)."""
    out_ij = mask[i] & ~mask[j]
    out_ji = mask[j] & ~mask[i]
    return float(np.sum(c[out_ij] * dh[out_ij]) - np.sum(c[out_ji] * dh[out_ji]))


@dataclass(frozen=True)
class ThompsonResult:
    value_scaled: float
    log_value: float
    divergence: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _unit_flows(gp: GridProblem, result: OracleResult):
    i, j, c = gp.faces()
    # X = C w grad h with eps * (flux out of A) = 1
    return i, j, c, -c * result.face_differences / (gp.eps * result.flux_in)


def discrete_thompson(gp: GridProblem, result: OracleResult) -> ThompsonResult:
    """Dual energy ``eps * sum |X|^2 / w`` of the unit flow built from ``h``."""
    i, j, c, J = _unit_flows(gp, result)
    dual = gp.eps * float(np.sum(J * J / c))
    div = np.zeros(gp.log_weight.size)
    np.add.at(div, i, J)
    np.add.at(div, j, -J)
    free = ~(gp.A | gp.B).ravel()
    divergence = float(np.max(np.abs(div[free])) * gp.eps) if free.any() else 0.0
    return ThompsonResult(dual, math.log(dual) - gp.log_offset, divergence)


def _side(P, R, S):
    o = (S[..., 0] - R[..., 0]) * (P[..., 1] - R[..., 1]) - (S[..., 1] - R[..., 1]) * (P[..., 0] - R[..., 0])
    return o >= 0


def edge_current(gp: GridProblem, result: OracleResult, cut: Sequence, direction) -> float:
    """Normalized flux of ``X`` across the segment ``cut = (p0, p1)``, counted
    positive along ``direction``. Raises if no face crosses the cut."""
    R, S = (np.asarray(q, dtype=float) for q in cut)
    direction = np.asarray(direction, dtype=float)
    i, j, c, J = _unit_flows(gp, result)
    centers = gp.grid.points().reshape(-1, 2)
    P, Q = centers[i], centers[j]
    cross = (_side(P, R, S) != _side(Q, R, S)) & (_side(R, P, Q) != _side(S, P, Q))
    if not cross.any():
        raise OracleError("cut does not cross any grid face")
    sign = np.sign((Q[cross] - P[cross]) @ direction)
    return float(gp.eps * np.sum(sign * J[cross]))


def bridge_cut(p: Potential, location, direction, limit_height: float, step: Optional[float] = None,
               grid: Optional[Grid] = None):
    """Segment through ``location`` along ``direction``; each arm stops where F
    exceeds ``limit_height``, reaches a local maximum along the line, or leaves the box."""
    z = np.asarray(location, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    box = p.box
    if step is None:
        step = 0.25 * float(np.min(grid.spacing)) if grid is not None else 1e-3
    ends = []
    for sgn in (-1.0, 1.0):
        t = 0.0
        prev = float(p(z))
        rising = False
        while True:
            x = z + sgn * (t + step) * d
            if np.any(x < box[:, 0]) or np.any(x > box[:, 1]):
                break
            v = float(p(x))
            if v >= limit_height:
                break
            if v > prev:
                rising = True
            elif rising and v < prev:
                break
            prev = v
            t += step
        ends.append(z + sgn * t * d)
    return ends[0], ends[1]


def richardson(values: Sequence[float], ratio: float = 2.0):
    """Extrapolate three successive refinements; returns ``(limit, observed_order)``."""
    v1, v2, v3 = (float(v) for v in values[-3:])
    d1, d2 = v1 - v2, v2 - v3
    if d2 == 0 or d1 == 0 or d1 * d2 < 0:
        return v3, float("nan")
    order = math.log(abs(d1 / d2)) / math.log(ratio)
    return v3 - d2 / (ratio ** order - 1.0), order


_MAGIC = b"CAPNETH1"


def write_snapshot(path, h: np.ndarray, box) -> None:
    """Binary grid: magic, ndim (u32), dims (u32 each), box (f64 pairs), row-major f64 data, little-endian."""
    h = np.ascontiguousarray(h, dtype="<f8")
    box = np.asarray(box, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", h.ndim))
        fh.write(struct.pack(f"<{h.ndim}I", *h.shape))
        fh.write(box.tobytes())
        fh.write(h.tobytes())


def read_snapshot(path):
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise OracleError("not a snapshot file")
        (ndim,) = struct.unpack("<I", fh.read(4))
        shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
        box = np.frombuffer(fh.read(16 * ndim), dtype="<f8").reshape(ndim, 2)
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(shape)
    return data.copy(), box.copy()
