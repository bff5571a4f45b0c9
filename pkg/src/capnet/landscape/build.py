"""Islands and bridges to an electrical network with admittances."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..admittance import Quadratic, SaddleDescriptor, Separable, admittance
from ..exceptions import InadmissibleError
from ..logreal import LogReal
from ..network import AdmittanceVector, OrientedGraph
from .critical import CriticalPoint, find_critical_points, make_critical_point
from .potential import Potential
from .topology import IslandDecomposition, decompose_islands

OVERRIDE_MATCH = 1e-3


@dataclass(frozen=True)
class SaddleOverride:
    """User-supplied profiles for the saddle nearest ``location``."""

    location: np.ndarray
    unstable: object
    stable: object
    height: Optional[float] = None
    rotation: Optional[np.ndarray] = None


def quadratic_descriptor(s: CriticalPoint, level: float, delta: float, tail_sign: float = 1.0) -> SaddleDescriptor:
    lam = s.hessian_eigs
    if lam[0] >= 0 or np.any(lam[1:] <= 0):
        raise InadmissibleError(f"saddle at {s.location.tolist()} does not have Morse index 1")
    R = s.eigvecs.copy()
    R[:, 0] *= tail_sign
    stable = Quadratic(float(lam[1])) if lam.size == 2 else Separable(tuple(Quadratic(float(l)) for l in lam[1:]))
    return SaddleDescriptor(s.height - level, Quadratic(float(-lam[0])), stable, R, s.location, delta,
                            validate=False)


@dataclass
class LandscapeNetwork:
    """Network of one landscape; admittances are produced per ``eps``.

    Heights are measured from ``level`` (the communication height), so the
    physical capacity is ``lambda * exp(-level/eps)``.
    """

    potential: Potential
    graph: OrientedGraph
    u: int
    w: int
    level: float
    delta: float
    descriptors: List[Optional[SaddleDescriptor]]
    decomposition: IslandDecomposition
    critical_points: List[CriticalPoint] = field(repr=False)

    def admittance(self, eps: float, method: str = "auto") -> AdmittanceVector:
        logs = []
        for e, d in enumerate(self.descriptors):
            if d is None or self.graph.is_loop(e):
                logs.append(-np.inf)
            else:
                logs.append(admittance(d, eps, method).log)
        return AdmittanceVector.from_log(np.array(logs, dtype=float))

    def log_offset(self, eps: float) -> float:
        return -self.level / eps

    @property
    def vertex_minima(self):
        return self.decomposition.island_minima

    def inventory(self) -> dict:
        dec = self.decomposition
        return {
            "vertices": self.graph.vertex_count, "edges": self.graph.edge_count,
            "terminals": [self.u, self.w], "level": self.level, "delta": self.delta,
            "delta1_estimate": dec.delta1, "grid_n": int(dec.grid.shape[0]),
            "islands": [{"minimum": m.tolist(), "height": h, "plateau": bool(f)}
                        for m, h, f in zip(dec.island_minima, dec.island_min_heights, dec.plateau_flags)],
            "saddles": [{"location": s.location.tolist(), "height": s.height,
                         "hessian_eigs": s.hessian_eigs.tolist(), "edge": list(self.graph.edges[k])}
                        for k, s in enumerate(dec.relevant_saddles)],
        }


def _match_override(s: CriticalPoint, overrides: Sequence[SaddleOverride]):
    for o in overrides:
        if np.linalg.norm(np.asarray(o.location, float) - s.location) <= OVERRIDE_MATCH:
            return o
    return None


def analyze_landscape(p: Potential, a, b, delta: Optional[float] = None, grid_n: int = 256,
                      overrides: Sequence[SaddleOverride] = (), seeds_per_axis: int = 24,
                      critical: Optional[List[CriticalPoint]] = None) -> LandscapeNetwork:
    """Critical points, islands and oriented bridges for the pair ``(a, b)``."""
    if p.dimension not in (2, 3):
        raise InadmissibleError("the landscape front-end supports n = 2 and n = 3 only")
    crit = list(critical) if critical is not None else find_critical_points(p, seeds_per_axis)
    for o in overrides:
        if not any(np.linalg.norm(np.asarray(o.location, float) - c.location) <= OVERRIDE_MATCH for c in crit):
            crit.append(make_critical_point(p, np.asarray(o.location, float)))
    fixed = []
    for c in crit:
        # degenerate points with overrides act as saddles
        if c.kind == "degenerate" and _match_override(c, overrides) is not None:
            c = CriticalPoint(c.location, c.height, "saddle", c.hessian_eigs, c.eigvecs)
        fixed.append(c)
    dec = decompose_islands(p, a, b, fixed, delta, grid_n)
    level, delta = dec.level, dec.delta
    # vertex k is island k + 1
    order = sorted(range(len(dec.relevant_saddles)), key=lambda i: tuple(dec.relevant_saddles[i].location))
    dec.relevant_saddles = [dec.relevant_saddles[i] for i in order]
    dec.saddle_islands = [dec.saddle_islands[i] for i in order]
    edges, descriptors = [], []
    for s, (left, right) in zip(dec.relevant_saddles, dec.saddle_islands):
        tail, head = sorted((left - 1, right - 1))
        sign = 1.0 if left - 1 == tail else -1.0
        edges.append((tail, head))
        if tail == head:
            descriptors.append(None)
            continue
        o = _match_override(s, overrides)
        if o is not None:
            R = s.eigvecs.copy() if o.rotation is None else np.asarray(o.rotation, float)
            R[:, 0] *= sign
            h = s.height if o.height is None else o.height
            descriptors.append(SaddleDescriptor(h - level, o.unstable, o.stable, R, s.location, delta))
        else:
            descriptors.append(quadratic_descriptor(s, level, delta, sign))
    graph = OrientedGraph(dec.island_count, tuple(edges),
                          vertex_labels=tuple(f"island{k}" for k in range(dec.island_count)),
                          edge_labels=tuple(f"saddle{k}" for k in range(len(edges))))
    return LandscapeNetwork(p, graph, dec.u - 1, dec.w - 1, level, delta, descriptors, dec, fixed)


def build_network(p: Potential, a, b, delta=None, eps: float = 0.1, grid_n: int = 256, overrides=()):
    """``(graph, admittance, u, w)`` for one ``eps``."""
    net = analyze_landscape(p, a, b, delta, grid_n, overrides)
    return net.graph, net.admittance(eps), net.u, net.w
