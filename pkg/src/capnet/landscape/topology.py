"""Sublevel-set topology on a cell-centered grid: communication height,
islands, saddle–island incidence and bridge disjointness."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..exceptions import InadmissibleError
from .critical import CriticalPoint
from .potential import Potential


@dataclass(frozen=True)
class Grid:
    """Cell centers of a uniform ``shape`` grid over ``box``."""

    box: np.ndarray
    shape: Tuple[int, ...]

    @classmethod
    def square(cls, box, n: int) -> "Grid":
        box = np.asarray(box, dtype=float)
        return cls(box, (int(n),) * box.shape[0])

    @property
    def spacing(self) -> np.ndarray:
        return (self.box[:, 1] - self.box[:, 0]) / np.array(self.shape)

    def axes(self):
        return [lo + h * (np.arange(m) + 0.5) for (lo, _), h, m in zip(self.box, self.spacing, self.shape)]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, -1)

    def cell_of(self, x) -> Tuple[int, ...]:
        x = np.asarray(x, dtype=float)
        k = np.floor((x - self.box[:, 0]) / self.spacing).astype(int)
        if np.any(k < 0) or np.any(k >= np.array(self.shape)):
            raise ValueError(f"point {x.tolist()} lies outside the grid")
        return tuple(int(v) for v in k)


def _structure(n):
    return ndimage.generate_binary_structure(n, 1)


def _neighbor_tolerance(values, cell):
    """Largest height jump from ``cell`` to a grid neighbor."""
    jumps = [0.0]
    for axis in range(values.ndim):
        for d in (-1, 1):
            nb = list(cell)
            nb[axis] += d
            if 0 <= nb[axis] < values.shape[axis]:
                jumps.append(abs(float(values[tuple(nb)]) - float(values[cell])))
    return max(jumps)


@dataclass(frozen=True)
class CommunicationHeight:
    """Grid estimate of the minimax level between two cells.

    ``{F < h}`` connects the cells exactly for ``h > lo``; ``hi`` is the next
    sampled level, so the bisection bracket is ``[lo, hi]``.
    """

    value: float
    lo: float
    hi: float
    cell: Tuple[int, ...]
    location: np.ndarray
    cell_tolerance: float
    grid_n: int


def communication_height(p: Potential, a, b, grid_n: int = 256, values=None) -> CommunicationHeight:
    """Bisection over sampled levels of the connectivity of ``{F < h}``
    between the cells of ``a`` and ``b`` (4-/6-neighbor adjacency)."""
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    grid = Grid.square(p.box, grid_n)
    F = p(grid.points()) if values is None else values
    ca, cb = grid.cell_of(a), grid.cell_of(b)
    if ca == cb:
        v = float(max(p(np.asarray(a, float)), p(np.asarray(b, float))))
        return CommunicationHeight(v, v, v, ca, np.asarray(a, float), 0.0, grid_n)
    levels = np.unique(F)
    structure = _structure(F.ndim)

    def connected(k):
        lab, _ = ndimage.label(F <= levels[k], structure=structure)
        return lab[ca] != 0 and lab[ca] == lab[cb]

    lo, hi = 0, len(levels) - 1
    if not connected(hi):
        raise InadmissibleError("a and b are not connected inside the box")
    while lo < hi:
        mid = (lo + hi) // 2
        if connected(mid):
            hi = mid
        else:
            lo = mid + 1
    crit_level = float(levels[lo])
    nxt = float(levels[lo + 1]) if lo + 1 < len(levels) else crit_level
    cells = np.argwhere(F == crit_level)
    cell = tuple(int(v) for v in cells[0])
    loc = grid.points()[cell]
    return CommunicationHeight(crit_level, crit_level, nxt, cell, loc, _neighbor_tolerance(F, cell), grid_n)


@dataclass(frozen=True)
class Bridge:
    """Oriented box approximating ``O_{z,delta}`` in the saddle frame."""

    center: np.ndarray
    rotation: np.ndarray
    halfwidths: np.ndarray

    def corners(self) -> np.ndarray:
        n = self.center.size
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
        return self.center + (signs * self.halfwidths) @ self.rotation.T

    def contains(self, pts) -> np.ndarray:
        local = (np.asarray(pts, dtype=float) - self.center) @ self.rotation
        return np.all(np.abs(local) <= self.halfwidths, axis=-1)


def bridge_box(saddle: CriticalPoint, delta: float, profiles=None) -> Bridge:
    """Box of the sublevel ``{g < delta} x {G < delta}`` per local axis."""
    if profiles is not None:
        unstable, stable = profiles
        widths = [max(abs(r) for r in unstable.roots(delta))]
        parts = getattr(stable, "parts", (stable,))
        widths += [max(abs(r) for r in part.roots(delta)) for part in parts]
    else:
        widths = [math.sqrt(2.0 * delta / abs(l)) for l in saddle.hessian_eigs]
    return Bridge(saddle.location, saddle.eigvecs, np.array(widths))


def boxes_intersect(b1: Bridge, b2: Bridge) -> bool:
    """Separating-axis test for two oriented boxes."""
    n = b1.center.size
    axes = [b1.rotation[:, k] for k in range(n)] + [b2.rotation[:, k] for k in range(n)]
    if n == 3:
        for i in range(3):
            for j in range(3):
                c = np.cross(b1.rotation[:, i], b2.rotation[:, j])
                if np.linalg.norm(c) > 1e-12:
                    axes.append(c / np.linalg.norm(c))
    c1, c2 = b1.corners(), b2.corners()
    for ax in axes:
        p1, p2 = c1 @ ax, c2 @ ax
        if p1.max() < p2.min() or p2.max() < p1.min():
            return False
    return True


def bridges_disjoint(saddles: Sequence[CriticalPoint], delta: float, profiles=None) -> bool:
    boxes = [bridge_box(s, delta, None if profiles is None else profiles.get(i))
             for i, s in enumerate(saddles)]
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if boxes_intersect(boxes[i], boxes[j]):
                return False
    return True


def estimate_delta1(saddles: Sequence[CriticalPoint], upper: float) -> float:
    """Largest ``delta <= upper`` (by bisection) with the boxes ``O_{z,3 delta}`` pairwise disjoint."""
    if len(saddles) < 2 or bridges_disjoint(saddles, 3.0 * upper):
        return upper
    lo, hi = 0.0, upper
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if bridges_disjoint(saddles, 3.0 * mid):
            lo = mid
        else:
            hi = mid
    return lo


def descend(p: Potential, x0, stop, grid: Grid, max_steps: int = 20000):
    """Steepest descent from ``x0`` until ``stop(cell)`` is truthy; returns that value or 0."""
    x = np.asarray(x0, dtype=float).copy()
    h = 0.5 * float(np.min(grid.spacing))
    for _ in range(max_steps):
        try:
            cell = grid.cell_of(x)
        except ValueError:
            return 0
        hit = stop(cell)
        if hit:
            return hit
        g = p.gradient(x)
        ng = float(np.linalg.norm(g))
        if ng == 0.0:
            return 0
        x = x - h * g / ng
    return 0


@dataclass
class IslandDecomposition:
    level: float
    delta: float
    grid: Grid
    labels: np.ndarray = field(repr=False)
    island_count: int
    island_minima: List[np.ndarray]
    island_min_heights: List[float]
    plateau_flags: List[bool]
    relevant_saddles: List[CriticalPoint]
    saddle_islands: List[Tuple[int, int]]
    u: int
    w: int
    delta1: float
    height: Optional[CommunicationHeight] = None

    def to_dict(self) -> dict:
        return {
            "level": self.level, "delta": self.delta, "delta1_estimate": self.delta1,
            "grid_n": int(self.grid.shape[0]), "islands": self.island_count,
            "island_minima": [m.tolist() for m in self.island_minima],
            "island_min_heights": self.island_min_heights,
            "plateaus": self.plateau_flags,
            "saddles": [dict(s.to_dict(), islands=list(e)) for s, e in zip(self.relevant_saddles,
                                                                          self.saddle_islands)],
            "u": self.u, "w": self.w,
        }


def _snap_level(ch: CommunicationHeight, saddles: Sequence[CriticalPoint], grid: Grid) -> float:
    """Replace the grid level by the exact height of a saddle sitting in the critical cell region."""
    radius = 2.0 * float(np.linalg.norm(grid.spacing))
    best = None
    for s in saddles:
        if np.linalg.norm(s.location - ch.location) <= radius and abs(s.height - ch.value) <= 2 * ch.cell_tolerance + 1e-12:
            if best is None or abs(s.height - ch.value) < abs(best - ch.value):
                best = s.height
    return ch.value if best is None else float(best)


def decompose_islands(p: Potential, a, b, critical: Sequence[CriticalPoint], delta: Optional[float] = None,
                      grid_n: int = 256, _retry: bool = True) -> IslandDecomposition:
    """Islands (components of ``U_{-delta/3}``) inside the component of
    ``U_{delta/3}`` holding ``a`` and ``b``, plus the saddles bridging them."""
    grid = Grid.square(p.box, grid_n)
    F = p(grid.points())
    ch = communication_height(p, a, b, grid_n, values=F)
    saddles = [c for c in critical if c.kind in ("saddle", "degenerate")]
    level = _snap_level(ch, saddles, grid)
    structure = _structure(F.ndim)
    ca, cb = grid.cell_of(a), grid.cell_of(b)

    minima = [c for c in critical if c.kind == "minimum" and c.height < level]
    lab_top, _ = ndimage.label(F < level + 1e-9 * max(1.0, abs(level)), structure=structure)
    top = lab_top[ca]
    in_top = [m for m in minima if lab_top[grid.cell_of(m.location)] == top]
    gap = level - max((m.height for m in in_top), default=level - 1.0)
    candidates = [s for s in saddles if abs(s.height - level) <= gap / 3.0
                  and s.kind == "saddle"]
    d1 = estimate_delta1(candidates, upper=gap)
    if delta is None:
        delta = min(0.9 * d1, 0.1 * gap)
    elif not delta > 0:
        raise ValueError("delta must be positive")
    elif not bridges_disjoint(candidates, 3.0 * delta):
        raise InadmissibleError(f"delta = {delta} is not below delta1 (bridges overlap)")

    lab_plus, _ = ndimage.label(F < level + delta / 3.0, structure=structure)
    comp = lab_plus[ca]
    if comp == 0 or comp != lab_plus[cb]:
        if _retry:
            return decompose_islands(p, a, b, critical, delta, 2 * grid_n, _retry=False)
        raise InadmissibleError("a and b are not in one component of U_{delta/3}")
    in_comp = lab_plus == comp
    islands, count = ndimage.label((F < level - delta / 3.0) & in_comp, structure=structure)
    u, w = int(islands[ca]), int(islands[cb])
    if u == 0 or w == 0:
        raise InadmissibleError("a or b does not lie in an island")

    pts = grid.points()
    island_minima, heights, plateaus = [], [], []
    for k in range(1, count + 1):
        mask = islands == k
        inside = [m for m in minima if islands[grid.cell_of(m.location)] == k]
        vals = F[mask]
        vmin = float(vals.min())
        flat = int(np.sum(vals <= vmin + 1e-12 * max(1.0, abs(vmin)))) > 1
        if inside:
            best = min(inside, key=lambda m: (m.height, tuple(m.location)))
            island_minima.append(best.location)
            heights.append(best.height)
            plateaus.append(sum(abs(m.height - best.height) <= 1e-12 for m in inside) > 1 or flat)
        else:
            cells = np.argwhere(mask & (F == vmin))
            cells = cells[np.lexsort(cells.T[::-1])]
            island_minima.append(pts[tuple(cells[0])])
            heights.append(vmin)
            plateaus.append(flat)

    relevant = [s for s in saddles if level - delta / 3.0 <= s.height < level + delta / 3.0
                and in_comp[grid.cell_of(s.location)]]
    incidence = []
    for s in relevant:
        if s.kind == "degenerate":
            raise InadmissibleError(f"saddle at {s.location.tolist()} is degenerate; supply its profiles")
        v1 = s.eigvecs[:, 0]
        r = max(float(np.min(grid.spacing)), 1e-3 * math.sqrt(2.0 * delta / abs(s.hessian_eigs[0])))
        stop = lambda cell: int(islands[cell])
        left = descend(p, s.location - r * v1, stop, grid)
        right = descend(p, s.location + r * v1, stop, grid)
        touched = {int(v) for v in islands[bridge_box(s, delta).contains(pts)] if v} | {left, right}
        touched.discard(0)
        if not touched or left == 0 or right == 0:
            raise InadmissibleError(f"bridge of saddle {s.location.tolist()} touches no island")
        if len(touched) > 2:
            raise InadmissibleError(f"branching saddle at {s.location.tolist()}")
        incidence.append((left, right))
    return IslandDecomposition(level, float(delta), grid, islands, int(count), island_minima, heights,
                               plateaus, relevant, incidence, u, w, d1, ch)
