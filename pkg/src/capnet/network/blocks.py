"""Block (biconnected component) decomposition, pruning of blocks that
cannot carry current between the terminals, and edge-deletion bounds."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .electrical import capacity
from .graph import AdmittanceVector, OrientedGraph, check_network


@dataclass(frozen=True)
class Block:
    edges: tuple
    vertices: tuple

    @property
    def is_loop(self) -> bool:
        return len(self.vertices) == 1


def biconnected_components(g: OrientedGraph, edge_mask=None):
    """Return ``(blocks, cut_vertices)``.

    Works on multigraphs: two parallel edges form a block of their own.
    Each self-loop is a one-edge block. Every edge selected by
    ``edge_mask`` (default: all) ends up in exactly one block.
    """
    n = g.vertex_count
    if edge_mask is None:
        edge_mask = np.ones(g.edge_count, dtype=bool)
    adj = [[] for _ in range(n)]
    blocks = []
    for e, (t, h) in enumerate(g.edges):
        if not edge_mask[e]:
            continue
        if t == h:
            blocks.append(Block((e,), (t,)))
            continue
        adj[t].append((h, e))
        adj[h].append((t, e))

    disc = [-1] * n
    low = [0] * n
    clock = 0
    edge_stack = []
    for root in range(n):
        if disc[root] != -1 or not adj[root]:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, parent_edge, it = stack[-1]
            descended = False
            for nb, e in it:
                if e == parent_edge:
                    continue
                if disc[nb] == -1:
                    edge_stack.append(e)
                    disc[nb] = low[nb] = clock
                    clock += 1
                    stack.append((nb, e, iter(adj[nb])))
                    descended = True
                    break
                if disc[nb] < disc[v]:
                    low[v] = min(low[v], disc[nb])
                    edge_stack.append(e)
            if descended:
                continue
            stack.pop()
            if not stack:
                continue
            p = stack[-1][0]
            low[p] = min(low[p], low[v])
            if low[v] >= disc[p]:
                block_edges = []
                while True:
                    e = edge_stack.pop()
                    block_edges.append(e)
                    if e == parent_edge:
                        break
                verts = sorted({x for e in block_edges for x in g.edges[e]})
                blocks.append(Block(tuple(sorted(block_edges)), tuple(verts)))

    count = np.zeros(n, dtype=int)
    for b in blocks:
        if not b.is_loop:
            count[list(b.vertices)] += 1
    cut_vertices = tuple(int(v) for v in np.flatnonzero(count >= 2))
    blocks.sort(key=lambda b: b.edges[0])
    return blocks, cut_vertices


class PrunedNetwork(NamedTuple):
    graph: OrientedGraph
    admittance: AdmittanceVector
    u: int
    w: int
    kept_vertices: tuple
    kept_edges: tuple
    removed_blocks: int


def _block_path(blocks, cut_vertices, u, w):
    """Indices of the blocks on the block-cut-tree path from ``u`` to ``w``."""
    anchors = set(cut_vertices) | {u, w}
    adj = {}
    for i, b in enumerate(blocks):
        if b.is_loop:
            continue
        for v in b.vertices:
            if v in anchors:
                adj.setdefault(("B", i), []).append(("V", v))
                adj.setdefault(("V", v), []).append(("B", i))
    start, goal = ("V", u), ("V", w)
    prev = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nb in adj.get(node, ()):
            if nb not in prev:
                prev[nb] = node
                queue.append(nb)
    if goal not in prev:
        return None
    path = []
    node = goal
    while node is not None:
        if node[0] == "B":
            path.append(node[1])
        node = prev[node]
    return sorted(path)


def prune_irrelevant_blocks(g: OrientedGraph, y, u: int, w: int) -> PrunedNetwork:
    """Drop every block that does not lie on the block-tree path between
    ``u`` and ``w``; the terminal capacity is unchanged.

    Blocks are computed on the positive-admittance support. Zero-weight
    edges survive when both endpoints do; loops are always dropped.
    Returns the relabeled network with the new terminal ids.
    """
    y = check_network(g, y)
    if u == w:
        raise ValueError("terminals must differ")
    positive = y.log_values > -np.inf
    blocks, cuts = biconnected_components(g, positive)
    path = _block_path(blocks, cuts, u, w)
    if path is None:
        keep_v = sorted({u, w})
        keep_e = []
    else:
        keep_v = sorted({v for i in path for v in blocks[i].vertices})
        kept_set = set(keep_v)
        in_path = {e for i in path for e in blocks[i].edges}
        keep_e = [e for e, (t, h) in enumerate(g.edges)
                  if e in in_path or (not positive[e] and t != h and t in kept_set and h in kept_set)]
    remap = {v: k for k, v in enumerate(keep_v)}
    edges = [(remap[g.edges[e][0]], remap[g.edges[e][1]]) for e in keep_e]
    vlabels = None if g.vertex_labels is None else [g.vertex_labels[v] for v in keep_v]
    elabels = None if g.edge_labels is None else [g.edge_labels[e] for e in keep_e]
    graph = OrientedGraph(len(keep_v), edges, vlabels, elabels)
    removed = sum(1 for i, b in enumerate(blocks) if path is None or i not in path)
    return PrunedNetwork(graph, y.take(keep_e), remap[u], remap[w], tuple(keep_v), tuple(keep_e),
                         removed)


@dataclass(frozen=True)
class DeletionBounds:
    lower: float
    upper: Optional[float]
    value: float

    @property
    def upper_available(self) -> bool:
        return self.upper is not None

    @property
    def holds(self) -> bool:
        tol = 1e-12 * max(abs(self.value), 1e-300)
        ok = self.lower <= self.value + tol
        if self.upper is not None:
            ok = ok and self.value <= self.upper + tol
        return ok


def deletion_bounds(g: OrientedGraph, y, u: int, w: int, e: int,
                    require_unit_bound: bool = True) -> DeletionBounds:
    """Capacity of the network with edge ``e`` deleted, and that value plus
    ``y_e``, which bracket the full capacity.

    The upper bound is reported only when every admittance is at most 1,
    unless ``require_unit_bound`` is switched off.
    """
    y = check_network(g, y)
    if not 0 <= e < g.edge_count:
        raise ValueError(f"edge {e} out of range")
    keep = [k for k in range(g.edge_count) if k != e]
    lower = capacity(g.without_edge(e), y.take(keep), u, w).lam
    value = capacity(g, y, u, w).lam
    upper = None
    if not require_unit_bound or np.all(y.values <= 1.0):
        upper = lower + float(y.values[e])
    bounds = DeletionBounds(lower, upper, value)
    if not bounds.holds:
        raise AssertionError(f"deletion bounds violated: {bounds}")
    return bounds
