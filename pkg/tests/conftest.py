import numpy as np
import pytest
from hypothesis import strategies as st

from capnet.network import OrientedGraph


def random_connected_multigraph(rng, max_vertices=8, max_edges=14, loops=True):
    """Random spanning tree plus extra random edges (parallel edges and loops allowed)."""
    n = int(rng.integers(2, max_vertices + 1))
    order = rng.permutation(n)
    edges = []
    for k in range(1, n):
        a = int(order[k])
        b = int(order[rng.integers(0, k)])
        edges.append((a, b) if rng.random() < 0.5 else (b, a))
    extra = int(rng.integers(0, max_edges - (n - 1) + 1))
    for _ in range(extra):
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a == b and not loops:
            continue
        edges.append((a, b))
    perm = rng.permutation(len(edges))
    edges = [edges[i] for i in perm]
    weights = rng.uniform(0.0, 1.0, size=len(edges))
    weights = 1.0 - weights  # uniform in (0, 1]
    weights = np.array([0.0 if t == h else wv for (t, h), wv in zip(edges, weights)])
    return OrientedGraph(n, tuple(edges)), weights


@st.composite
def connected_networks(draw, max_vertices=7, max_edges=12):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return random_connected_multigraph(rng, max_vertices, max_edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
