"""Critical points by vectorized Newton iteration from a seed grid."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from ..exceptions import CapnetError
from .potential import Potential

DEDUP_TOL = 1e-6
DEGENERATE_TOL = 1e-8


@dataclass(frozen=True)
class CriticalPoint:
    location: np.ndarray
    height: float
    kind: str
    hessian_eigs: np.ndarray
    eigvecs: np.ndarray

    @property
    def index(self) -> int:
        return int(np.sum(self.hessian_eigs < 0))

    @property
    def is_saddle(self) -> bool:
        return self.kind == "saddle"

    def to_dict(self) -> dict:
        return {"location": self.location.tolist(), "height": self.height, "kind": self.kind,
                "hessian_eigs": self.hessian_eigs.tolist()}


def classify(eigs: np.ndarray) -> str:
    scale = max(1.0, float(np.max(np.abs(eigs))))
    if np.any(np.abs(eigs) < DEGENERATE_TOL * scale):
        return "degenerate"
    neg = int(np.sum(eigs < 0))
    if neg == 0:
        return "minimum"
    if neg == 1:
        return "saddle"
    if neg == eigs.size:
        return "maximum"
    return f"index-{neg}"


def _seed_grid(box, seeds_per_axis):
    axes = [lo + (hi - lo) * (np.arange(seeds_per_axis) + 0.5) / seeds_per_axis for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], 1)


def make_critical_point(p: Potential, x) -> CriticalPoint:
    x = np.asarray(x, dtype=float) + 0.0
    H = p.hessian(x)
    eigs, vecs = np.linalg.eigh(H)
    return CriticalPoint(x, float(p(x)), classify(eigs), eigs, vecs)


def find_critical_points(p: Potential, seeds_per_axis: int = 24, max_iter: int = 200) -> List[CriticalPoint]:
    """Newton from a uniform seed grid; converged points deduplicated within
    ``DEDUP_TOL`` and returned in lexicographic order of location.

    Seeds that diverge, leave the box or stall are dropped.
    """
    box = p.box
    n = p.dimension
    diam = float(np.linalg.norm(box[:, 1] - box[:, 0]))
    x = _seed_grid(box, seeds_per_axis)
    alive = np.ones(len(x), dtype=bool)
    done = np.zeros(len(x), dtype=bool)
    for _ in range(max_iter):
        act = alive & ~done
        if not act.any():
            break
        xa = x[act]
        g = p.gradient(xa)
        H = p.hessian(xa)
        conv = ~np.any(g, axis=1)
        try:
            step = np.linalg.solve(H, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.einsum("mij,mj->mi", np.linalg.pinv(H), g)
        norm = np.linalg.norm(step, axis=1)
        cap = 0.25 * diam
        step = np.where((norm > cap)[:, None], step * (cap / np.maximum(norm, 1e-300))[:, None], step)
        xn = xa - np.where(conv[:, None], 0.0, step)
        # degenerate points converge only linearly, so stop on a negligible step
        tiny = norm <= 1e-12 * max(1.0, diam)
        inside = np.all((xn >= box[:, 0] - 1e-9 * diam) & (xn <= box[:, 1] + 1e-9 * diam), axis=1)
        idx = np.flatnonzero(act)
        x[idx] = xn
        alive[idx[~inside | ~np.isfinite(xn).all(1)]] = False
        done[idx[conv | tiny]] = True
    cand = x[alive & done]
    if len(cand):
        g = p.gradient(cand)
        H = p.hessian(cand)
        scale = np.maximum(1.0, np.linalg.norm(H, axis=(1, 2)) * diam)
        cand = cand[np.linalg.norm(g, axis=1) <= 1e-9 * scale]
    order = np.lexsort(cand.T[::-1]) if len(cand) else []
    kept: List[np.ndarray] = []
    for c in cand[order]:
        if all(np.linalg.norm(c - k) > DEDUP_TOL for k in kept):
            kept.append(c)
    if not kept:
        raise CapnetError("no critical points found in the box")
    return [make_critical_point(p, c) for c in kept]
