"""Random graph generators shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from wellconnected.graph import Graph


def random_connected(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Random spanning tree plus independent extra edges with probability p."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n, sorted(edges))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    return random_connected(n, 0.0, rng)


@st.composite
def connected_graphs(draw, min_n=1, max_n=10):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, k - 1)) for k in range(1, n)]
    edges = {(p, k) for k, p in enumerate(parents, 1)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n)) if pairs else []
    return Graph(n, sorted(edges | set(extra)))
