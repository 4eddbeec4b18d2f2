"""Undirected graphs, grid maps and the connectivity primitives built on them."""

from __future__ import annotations

import json
from bisect import bisect_left
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import DisconnectedError, EmptyGraphError, InactiveVertexError, MapFormatError

UNREACHABLE = -1
PASSABLE_GLYPHS = frozenset(".G")

_ORTHOGONAL = ((-1, 0), (0, -1), (0, 1), (1, 0))
_DIAGONAL = ((-1, -1), (-1, 1), (1, -1), (1, 1))


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Adjacency lists are sorted. Grid-derived graphs also carry ``coords``,
    the ``(row, col)`` of every vertex.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        coords: Sequence[tuple[int, int]] | None = None,
    ):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adjacency: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in nbrs)
        if coords is not None:
            if len(coords) != n:
                raise ValueError("coords length must equal the vertex count")
            coords = tuple((int(r), int(c)) for r, c in coords)
        self.coords: tuple[tuple[int, int], ...] | None = coords
        indptr = np.zeros(n + 1, np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
        self.indptr = indptr
        self.indices = np.fromiter(
            (w for a in self.adjacency for w in a), np.int64, count=int(indptr[-1])
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adjacency == other.adjacency and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1]) // 2

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, a in enumerate(self.adjacency) for v in a if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adjacency[u]
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    @cached_property
    def vertex_of(self) -> dict[tuple[int, int], int]:
        """Inverse of ``coords``."""
        if self.coords is None:
            raise ValueError("graph has no coordinates")
        return {rc: v for v, rc in enumerate(self.coords)}

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Adjacency as Python-int bitsets, for small-graph enumeration."""
        return tuple(sum(1 << w for w in a) for a in self.adjacency)

    @cached_property
    def diameter(self) -> int:
        """D(G); requires a connected graph."""
        if self.n == 0:
            raise EmptyGraphError("empty graph has no diameter")
        if not is_connected(self):
            raise DisconnectedError("diameter of a disconnected graph is infinite")
        return int(_kernels.eccentricity_max(self.indptr, self.indices))

    def to_json(self) -> dict:
        out: dict = {"n": self.n, "edges": [list(e) for e in self.edges()]}
        if self.coords is not None:
            out["coords"] = [list(rc) for rc in self.coords]
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> Graph:
        if isinstance(data, str):
            data = json.loads(data)
        coords = data.get("coords")
        return cls(data["n"], [tuple(e) for e in data["edges"]], coords and [tuple(c) for c in coords])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """Centre is vertex 0."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def _mask(g: Graph, active) -> np.ndarray:
    if active is None:
        return np.ones(g.n, np.bool_)
    mask = np.asarray(active, dtype=np.bool_)
    if mask.shape != (g.n,):
        raise ValueError(f"active mask must have length {g.n}")
    return mask


def members_mask(g: Graph, members: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.n, np.bool_)
    idx = np.fromiter(members, np.int64)
    mask[idx] = True
    return mask


def bfs_distances(g: Graph, source: int, active=None) -> np.ndarray:
    """Shortest hop counts inside the active subgraph; ``UNREACHABLE`` = -1."""
    mask = _mask(g, active)
    if not mask[source]:
        raise InactiveVertexError(f"source {source} is not active")
    return _kernels.bfs(g.indptr, g.indices, mask, mask, source)


def distance_matrix(g: Graph, sources: Iterable[int] | None = None) -> np.ndarray:
    """Rows of full-graph BFS distances, one per source (all vertices by default)."""
    sources = range(g.n) if sources is None else list(sources)
    everything = np.ones(g.n, np.bool_)
    out = np.empty((len(sources), g.n), np.int64)
    for i, s in enumerate(sources):
        out[i] = _kernels.bfs(g.indptr, g.indices, everything, everything, s)
    return out


def is_connected(g: Graph, active=None) -> bool:
    """Connectivity of the active subgraph; empty and singleton count as connected."""
    mask = _mask(g, active)
    live = np.flatnonzero(mask)
    if len(live) <= 1:
        return True
    d = _kernels.bfs(g.indptr, g.indices, mask, mask, int(live[0]))
    return bool((d[live] >= 0).all())


def articulation_points(g: Graph, active=None) -> frozenset[int]:
    """Cut vertices of the (connected) active subgraph, in linear time."""
    mask = _mask(g, active)
    is_ap, reached, n_active = _kernels.articulation_points(g.indptr, g.indices, mask)
    if reached != n_active:
        raise DisconnectedError("active subgraph is disconnected")
    return frozenset(np.flatnonzero(is_ap).tolist())


def connected_components(g: Graph, active=None) -> list[frozenset[int]]:
    """Components of the active subgraph, ordered by smallest vertex."""
    mask = _mask(g, active)
    seen = np.zeros(g.n, np.bool_)
    comps = []
    for v in range(g.n):
        if mask[v] and not seen[v]:
            d = _kernels.bfs(g.indptr, g.indices, mask, mask, v)
            comp = np.flatnonzero(d >= 0)
            seen[comp] = True
            comps.append(frozenset(comp.tolist()))
    return comps


def largest_connected_component(g: Graph) -> frozenset[int]:
    """Largest component; ties go to the one holding the smallest vertex id."""
    if g.n == 0:
        raise EmptyGraphError("empty graph has no components")
    comps = connected_components(g)
    return max(comps, key=len)  # max keeps the first of equal sizes


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, list[int]]:
    """Compacted induced subgraph and the old id of each new vertex."""
    old = sorted(set(keep))
    new_id = {v: i for i, v in enumerate(old)}
    edges = [(new_id[u], new_id[v]) for u, v in g.edges() if u in new_id and v in new_id]
    coords = [g.coords[v] for v in old] if g.coords is not None else None
    return Graph(len(old), edges, coords), old


def _grid_graph(passable: np.ndarray, connectivity: int) -> Graph:
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    height, width = passable.shape
    ids = -np.ones((height, width), np.int64)
    cells = np.argwhere(passable)
    if len(cells) == 0:
        raise EmptyGraphError("every cell is blocked")
    ids[cells[:, 0], cells[:, 1]] = np.arange(len(cells))
    steps = _ORTHOGONAL + _DIAGONAL if connectivity == 8 else _ORTHOGONAL
    edges = []
    for r, c in cells:
        u = ids[r, c]
        for dr, dc in steps:
            rr, cc = r + dr, c + dc
            if 0 <= rr < height and 0 <= cc < width and ids[rr, cc] > u:
                edges.append((int(u), int(ids[rr, cc])))
    full = Graph(len(cells), edges, [tuple(rc) for rc in cells.tolist()])
    lcc = largest_connected_component(full)
    if len(lcc) == full.n:
        return full
    return induced_subgraph(full, lcc)[0]


def build_grid(
    width: int, height: int, connectivity: int = 4, blocked: Iterable[tuple[int, int]] = ()
) -> Graph:
    """Grid graph over the largest component of the unblocked ``(row, col)`` cells."""
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    passable = np.ones((height, width), np.bool_)
    for r, c in blocked:
        if not (0 <= r < height and 0 <= c < width):
            raise ValueError(f"blocked cell {(r, c)} outside {height}x{width} grid")
        passable[r, c] = False
    return _grid_graph(passable, connectivity)


@dataclass(frozen=True)
class GridMap:
    """A MovingAI-style map: raw glyph rows plus header ``type``."""

    height: int
    width: int
    rows: tuple[str, ...]
    kind: str = "octile"
    connectivity: int = 4
    passable: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.height or any(len(r) != self.width for r in self.rows):
            raise MapFormatError("rows do not match the declared dimensions")
        mask = np.array([[ch in PASSABLE_GLYPHS for ch in row] for row in self.rows], np.bool_)
        object.__setattr__(self, "passable", mask.reshape(self.height, self.width))

    @property
    def passable_count(self) -> int:
        return int(self.passable.sum())

    def to_graph(self, connectivity: int | None = None) -> Graph:
        return _grid_graph(self.passable, connectivity or self.connectivity)

    def with_connectivity(self, connectivity: int) -> GridMap:
        return GridMap(self.height, self.width, self.rows, self.kind, connectivity)


def parse_movingai(text: str, connectivity: int = 4) -> GridMap:
    lines = text.splitlines()
    if len(lines) < 4:
        raise MapFormatError("truncated header")
    header = [ln.strip().split() for ln in lines[:4]]
    try:
        (t_key, kind), (h_key, h), (w_key, w), (m_key,) = header
        height, width = int(h), int(w)
    except ValueError as exc:
        raise MapFormatError(f"malformed header: {lines[:4]!r}") from exc
    if (t_key, h_key, w_key, m_key) != ("type", "height", "width", "map"):
        raise MapFormatError(f"malformed header: {lines[:4]!r}")
    if height < 1 or width < 1:
        raise MapFormatError("map dimensions must be positive")
    body = [ln.rstrip("\r") for ln in lines[4:]]
    while body and not body[-1].strip():
        body.pop()
    if len(body) < height:
        raise MapFormatError(f"truncated body: expected {height} rows, found {len(body)}")
    if len(body) > height:
        raise MapFormatError(f"expected {height} rows, found {len(body)}")
    for i, row in enumerate(body):
        if len(row) != width:
            raise MapFormatError(f"row {i} has length {len(row)}, expected {width}")
    return GridMap(height, width, tuple(body), kind, connectivity)


def serialize_movingai(grid: GridMap) -> str:
    head = [f"type {grid.kind}", f"height {grid.height}", f"width {grid.width}", "map"]
    return "\n".join(head + list(grid.rows)) + "\n"


def load_map(path, connectivity: int = 4) -> GridMap:
    with open(path, encoding="utf-8") as fh:
        return parse_movingai(fh.read(), connectivity)
