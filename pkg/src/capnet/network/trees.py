"""Spanning-tree polynomial T(G; y) by cofactor, enumeration, exact
elimination and log-space elimination."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from ..exceptions import EnumerationTooLarge
from .graph import OrientedGraph, as_admittance, check_network, laplacian, support_components

DEFAULT_ENUM_LIMIT = 12


def contract(g: OrientedGraph, u: int, w: int) -> OrientedGraph:
    """Merge ``w`` into ``u``.

    Vertices other than ``w`` keep their relative order; edges between the
    two become self-loops. Edge order and edge labels are preserved.
    """
    if u == w:
        raise ValueError("cannot contract a vertex with itself")
    n = g.vertex_count
    for x in (u, w):
        if not 0 <= x < n:
            raise ValueError(f"vertex {x} out of range")
    new_id = {}
    k = 0
    for v in range(n):
        if v == w:
            continue
        new_id[v] = k
        k += 1
    new_id[w] = new_id[u]
    edges = tuple((new_id[t], new_id[h]) for t, h in g.edges)
    vlabels = None
    if g.vertex_labels is not None:
        vlabels = tuple(
            (f"{g.vertex_labels[u]}+{g.vertex_labels[w]}" if v == u else g.vertex_labels[v])
            for v in range(n) if v != w)
    return OrientedGraph(n - 1, edges, vlabels, g.edge_labels)


def _is_connected_support(g: OrientedGraph, y) -> bool:
    return g.vertex_count == 1 or int(support_components(g, y).max()) == 0


def tree_polynomial_det(g: OrientedGraph, y, v: int = 0) -> float:
    """``det L(v|v)`` by partial-pivoted LU; exactly 0 for disconnected support."""
    y = check_network(g, y)
    if not 0 <= v < g.vertex_count:
        raise ValueError(f"vertex {v} out of range")
    if not _is_connected_support(g, y):
        return 0.0
    L = laplacian(g, y)
    keep = [i for i in range(g.vertex_count) if i != v]
    return float(np.linalg.det(L[np.ix_(keep, keep)])) if keep else 1.0


def _weights_list(y):
    if hasattr(y, "values") and hasattr(y, "log_values"):
        return [float(x) for x in y.values]
    return list(y)


def spanning_trees(g: OrientedGraph, max_vertices: int = DEFAULT_ENUM_LIMIT):
    """Yield each spanning tree as a tuple of edge ids. Loops never appear."""
    n = g.vertex_count
    if n > max_vertices:
        raise EnumerationTooLarge(f"{n} vertices exceeds enumeration bound {max_vertices}")
    candidates = [e for e, (t, h) in enumerate(g.edges) if t != h]
    for subset in itertools.combinations(candidates, n - 1):
        parent = list(range(n))
        acyclic = True
        for e in subset:
            a, b = g.edges[e]
            while parent[a] != a:
                a = parent[a]
            while parent[b] != b:
                b = parent[b]
            if a == b:
                acyclic = False
                break
            parent[a] = b
        if acyclic:
            yield subset


def tree_polynomial_enum(g: OrientedGraph, y, max_vertices: int = DEFAULT_ENUM_LIMIT):
    """Sum over explicitly enumerated spanning trees of the edge-weight product.

    ``y`` may be an :class:`AdmittanceVector` or any sequence of numbers;
    ints and Fractions stay exact.
    """
    weights = _weights_list(y)
    if len(weights) != g.edge_count:
        raise ValueError(f"{len(weights)} weights for {g.edge_count} edges")
    total = 0
    for tree in spanning_trees(g, max_vertices):
        prod = 1
        for e in tree:
            prod = prod * weights[e]
        total = total + prod
    return total


def tree_polynomial_exact(g: OrientedGraph, weights, v: int = 0):
    """Exact ``det L(v|v)`` for int or Fraction weights (fraction-free Bareiss)."""
    weights = _weights_list(weights)
    if len(weights) != g.edge_count:
        raise ValueError(f"{len(weights)} weights for {g.edge_count} edges")
    exact = []
    for x in weights:
        if isinstance(x, float):
            x = Fraction(x)
        exact.append(x)
    n = g.vertex_count
    L = [[0] * n for _ in range(n)]
    for (t, h), yv in zip(g.edges, exact):
        if t == h:
            continue
        L[t][t] += yv
        L[h][h] += yv
        L[t][h] -= yv
        L[h][t] -= yv
    keep = [i for i in range(n) if i != v]
    M = [[L[i][j] for j in keep] for i in keep]
    return _bareiss_det(M)


def _bareiss_det(M):
    m = len(M)
    if m == 0:
        return 1
    M = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, m) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                # exact by Sylvester's identity
                if isinstance(num, int) and isinstance(prev, int):
                    M[i][j] = num // prev
                else:
                    M[i][j] = Fraction(num) / prev
        prev = M[k][k]
    return sign * M[m - 1][m - 1]


def _log_conductance_matrix(g: OrientedGraph, y) -> np.ndarray:
    n = g.vertex_count
    C = np.full((n, n), -np.inf)
    for (t, h), ly in zip(g.edges, y.log_values):
        if t == h or ly == -np.inf:
            continue
        C[t, h] = np.logaddexp(C[t, h], ly)
        C[h, t] = C[t, h]
    return C


def _eliminate(C: np.ndarray, order):
    """Kron-reduce the log-conductance matrix ``C`` in place.

    Returns the sum of log pivots. Only positive quantities are added, so no
    cancellation occurs however widely the weights are spread.
    """
    alive = np.ones(C.shape[0], dtype=bool)
    log_det = 0.0
    for k in order:
        alive[k] = False
        others = np.flatnonzero(alive)
        row = C[k, others]
        d = logsumexp(row) if others.size else -np.inf
        if d == -np.inf:
            return -np.inf
        log_det += d
        update = row[:, None] + row[None, :] - d
        sub = C[np.ix_(others, others)]
        sub = np.logaddexp(sub, update)
        np.fill_diagonal(sub, -np.inf)
        C[np.ix_(others, others)] = sub
        C[k, :] = -np.inf
        C[:, k] = -np.inf
    return log_det


def log_tree_polynomial(g: OrientedGraph, y, v: int = 0) -> float:
    """``log T(G; y)`` by log-space elimination; ``-inf`` if no spanning tree."""
    y = check_network(g, y)
    C = _log_conductance_matrix(g, y)
    order = [k for k in range(g.vertex_count) if k != v]
    return float(_eliminate(C, order))


def log_effective_conductance(g: OrientedGraph, y, u: int, w: int) -> float:
    """``log(T(G)/T(G/uw))``: Kron-reduce onto {u, w} and read the conductance."""
    y = check_network(g, y)
    if u == w:
        raise ValueError("terminals must differ")
    comp = support_components(g, y)
    if comp[u] != comp[w]:
        return -math.inf
    C = _log_conductance_matrix(g, y)
    # vertices off the terminals' component do not interact with them
    order = [k for k in range(g.vertex_count) if k not in (u, w) and comp[k] == comp[u]]
    _eliminate(C, order)
    return float(C[u, w])
