"""Oriented multigraphs, admittance vectors and the matrices built from them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class OrientedGraph:
    """Oriented multigraph on vertices ``0 .. vertex_count - 1``.

    Parallel edges and self-loops are allowed. Edge order is significant:
    it fixes the column order of the incidence matrix and the order of the
    admittance vector.
    """

    vertex_count: int
    edges: tuple = ()
    vertex_labels: Optional[tuple] = None
    edge_labels: Optional[tuple] = None

    def __post_init__(self):
        if int(self.vertex_count) < 1:
            raise ValueError("vertex_count must be >= 1")
        object.__setattr__(self, "vertex_count", int(self.vertex_count))
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        for t, h in edges:
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise ValueError(f"edge ({t}, {h}) has an endpoint outside [0, {self.vertex_count})")
        object.__setattr__(self, "edges", edges)
        if self.vertex_labels is not None:
            labels = tuple(self.vertex_labels)
            if len(labels) != self.vertex_count:
                raise ValueError("one vertex label per vertex required")
            object.__setattr__(self, "vertex_labels", labels)
        if self.edge_labels is not None:
            labels = tuple(self.edge_labels)
            if len(labels) != len(edges):
                raise ValueError("one edge label per edge required")
            object.__setattr__(self, "edge_labels", labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_loop(self, e: int) -> bool:
        t, h = self.edges[e]
        return t == h

    def without_edge(self, e: int) -> "OrientedGraph":
        edges = self.edges[:e] + self.edges[e + 1:]
        labels = None
        if self.edge_labels is not None:
            labels = self.edge_labels[:e] + self.edge_labels[e + 1:]
        return OrientedGraph(self.vertex_count, edges, self.vertex_labels, labels)


@dataclass(frozen=True)
class AdmittanceVector:
    """Nonnegative weight per edge, in edge order.

    Each entry is held both as a plain float and as its natural log, so that
    weights like ``exp(-F/eps)`` which underflow doubles stay usable.
    ``from_log`` entries remember their origin for lossless serialization.
    """

    values: np.ndarray
    log_values: np.ndarray = field(default=None)
    is_log: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if np.any(np.isnan(values)) or np.any(values < 0):
            raise ValueError("admittances must be nonnegative")
        if self.log_values is None:
            with np.errstate(divide="ignore"):
                logs = np.log(values)
        else:
            logs = np.asarray(self.log_values, dtype=float).reshape(-1)
            if logs.shape != values.shape:
                raise ValueError("log_values shape mismatch")
        is_log = (np.zeros(values.shape, dtype=bool) if self.is_log is None
                  else np.asarray(self.is_log, dtype=bool).reshape(-1))
        for name, arr in (("values", values), ("log_values", logs), ("is_log", is_log)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_log(cls, log_values: Sequence[float]) -> "AdmittanceVector":
        logs = np.asarray(log_values, dtype=float).reshape(-1)
        if np.any(np.isnan(logs)) or np.any(logs == np.inf):
            raise ValueError("log admittances must be finite or -inf")
        with np.errstate(under="ignore"):
            values = np.exp(logs)
        return cls(values, logs, np.ones(logs.shape, dtype=bool))

    @classmethod
    def concat(cls, parts: Sequence["AdmittanceVector"]) -> "AdmittanceVector":
        return cls(np.concatenate([p.values for p in parts]),
                   np.concatenate([p.log_values for p in parts]),
                   np.concatenate([p.is_log for p in parts]))

    def __len__(self) -> int:
        return self.values.shape[0]

    def take(self, index) -> "AdmittanceVector":
        index = np.asarray(index, dtype=int)
        return AdmittanceVector(self.values[index], self.log_values[index], self.is_log[index])

    def scaled(self, factor: float) -> "AdmittanceVector":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return AdmittanceVector(self.values * factor, self.log_values + np.log(factor), self.is_log)

    def with_loops_zeroed(self, graph: OrientedGraph) -> "AdmittanceVector":
        loops = np.array([t == h for t, h in graph.edges], dtype=bool)
        if not loops.any():
            return self
        values = np.where(loops, 0.0, self.values)
        logs = np.where(loops, -np.inf, self.log_values)
        return AdmittanceVector(values, logs, self.is_log)


def as_admittance(y) -> AdmittanceVector:
    if isinstance(y, AdmittanceVector):
        return y
    return AdmittanceVector(np.asarray(y, dtype=float))


def check_network(g: OrientedGraph, y, require_zero_loops: bool = False) -> AdmittanceVector:
    # contraction turns edges into loops that keep their weight; tree sums
    # ignore loop columns, so zero loops are only enforced on input networks
    y = as_admittance(y)
    if len(y) != g.edge_count:
        raise ValueError(f"{len(y)} admittances for {g.edge_count} edges")
    if not require_zero_loops:
        return y
    for e, (t, h) in enumerate(g.edges):
        if t == h and y.log_values[e] != -np.inf:
            raise ValueError(f"self-loop edge {e} must carry zero admittance")
    return y


def incidence_matrix(g: OrientedGraph) -> np.ndarray:
    """Signed |V| x |E| incidence matrix: +1 at the head, -1 at the tail."""
    D = np.zeros((g.vertex_count, g.edge_count))
    for e, (t, h) in enumerate(g.edges):
        if t != h:
            D[h, e] = 1.0
            D[t, e] = -1.0
    return D


def weighted_laplacian(D: np.ndarray, y) -> np.ndarray:
    y = as_admittance(y)
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[1] != len(y):
        raise ValueError(f"incidence matrix with {D.shape[-1]} columns vs {len(y)} admittances")
    L = (D * y.values) @ D.T
    # exact symmetry; the product is symmetric up to rounding only
    return 0.5 * (L + L.T)


def laplacian(g: OrientedGraph, y) -> np.ndarray:
    return weighted_laplacian(incidence_matrix(g), check_network(g, y))


def support_components(g: OrientedGraph, y, positive_only: bool = True) -> np.ndarray:
    """Component id per vertex, using only edges with positive admittance."""
    y = as_admittance(y)
    parent = list(range(g.vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e, (t, h) in enumerate(g.edges):
        if positive_only and y.log_values[e] == -np.inf:
            continue
        ra, rb = find(t), find(h)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = [find(v) for v in range(g.vertex_count)]
    _, comp = np.unique(roots, return_inverse=True)
    return comp
