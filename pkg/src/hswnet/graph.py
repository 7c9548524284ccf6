"""Undirected simple graphs, their matrices and structural metrics.

Vertices are the integers ``0 .. n-1``. Edges are stored once, as sorted
pairs ``(u, v)`` with ``u < v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import config
from .errors import BudgetExceeded, GraphError

BASELINE_FAMILIES = ("path", "cycle", "star", "complete")
_MIN_ORDER = {"path": 2, "cycle": 3, "star": 2, "complete": 2}


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError(f"graph needs at least one vertex, got n={self.n}")
        normalized = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            normalized.append((u, v) if u < v else (v, u))
        normalized.sort()
        for a, b in zip(normalized, normalized[1:]):
            if a == b:
                raise GraphError(f"duplicate edge {a}")
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in normalized:
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in nbrs))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def is_connected(self) -> bool:
        return all(d >= 0 for d in bfs_distances(self, 0))

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2


def require_connected(g: Graph) -> Graph:
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    return g


@dataclass(frozen=True)
class GraphMetrics:
    n: int
    m: int
    max_degree: int
    min_degree: int
    avg_degree: float
    density: float
    avg_path_length: float
    # None when the graph is above config.CONNECTIVITY_LIMIT
    vertex_connectivity: int | None
    edge_connectivity: int | None


@dataclass(frozen=True)
class MatrixSet:
    A: np.ndarray
    D: np.ndarray
    L: np.ndarray
    P: np.ndarray


def build_baseline(family: str, n: int) -> Graph:
    """Path, cycle, star (centre at 0) or complete graph on ``n`` vertices."""
    if family not in _MIN_ORDER:
        raise GraphError(f"unknown family {family!r}; expected one of {BASELINE_FAMILIES}")
    if n < _MIN_ORDER[family]:
        raise GraphError(f"{family} needs n >= {_MIN_ORDER[family]}, got {n}")
    if family == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "cycle":
        edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif family == "star":
        edges = [(0, i) for i in range(1, n)]
    else:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return require_connected(Graph(n, tuple(edges)))


def bfs_distances(g: Graph, source: int) -> list[int]:
    """Hop distances from ``source``; unreachable vertices get -1."""
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    return dist


def average_path_length(g: Graph) -> float:
    """Mean hop distance over unordered pairs of distinct vertices."""
    if g.n < 2:
        raise GraphError("average path length needs at least two vertices")
    total = 0
    for s in range(g.n):
        dist = bfs_distances(g, s)
        if min(dist) < 0:
            raise GraphError("graph is disconnected; average path length is undefined")
        total += sum(dist)
    # every unordered pair was counted twice
    return total / (g.n * (g.n - 1))


class _FlowNetwork:
    """Residual network for unit-ish capacity max-flow (BFS augmenting paths)."""

    def __init__(self, size: int) -> None:
        self.out: list[list[int]] = [[] for _ in range(size)]
        self.head: list[int] = []
        self.cap: list[int] = []

    def add_arc(self, u: int, v: int, cap: int, rev_cap: int = 0) -> None:
        self.out[u].append(len(self.head))
        self.head.append(v)
        self.cap.append(cap)
        self.out[v].append(len(self.head))
        self.head.append(u)
        self.cap.append(rev_cap)

    def max_flow(self, s: int, t: int, limit: int) -> int:
        """Flow value from ``s`` to ``t``, stopping early once it reaches ``limit``."""
        flow = 0
        head, cap, out = self.head, self.cap, self.out
        while flow < limit:
            via = [-1] * len(out)
            via[s] = -2
            queue = deque([s])
            while queue and via[t] == -1:
                u = queue.popleft()
                for a in out[u]:
                    w = head[a]
                    if cap[a] > 0 and via[w] == -1:
                        via[w] = a
                        queue.append(w)
            if via[t] == -1:
                break
            # all capacities on the path are >= 1; push one unit
            w = t
            while w != s:
                a = via[w]
                cap[a] -= 1
                cap[a ^ 1] += 1
                w = head[a ^ 1]
            flow += 1
        return flow


def local_edge_connectivity(g: Graph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of edge-disjoint s-t paths (capped at ``limit``)."""
    net = _FlowNetwork(g.n)
    for u, v in g.edges:
        net.add_arc(u, v, 1, 1)
    return net.max_flow(s, t, g.n if limit is None else limit)


def local_vertex_connectivity(g: Graph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of internally vertex-disjoint paths between non-adjacent s and t."""
    if t in g.adjacency[s]:
        raise GraphError(f"vertices {s} and {t} are adjacent")
    big = g.n
    net = _FlowNetwork(2 * g.n)
    # vertex v splits into 2v (in) -> 2v+1 (out)
    for v in range(g.n):
        net.add_arc(2 * v, 2 * v + 1, big if v in (s, t) else 1)
    for u, v in g.edges:
        net.add_arc(2 * u + 1, 2 * v, big)
        net.add_arc(2 * v + 1, 2 * u, big)
    return net.max_flow(2 * s + 1, 2 * t, g.n if limit is None else limit)


def vertex_connectivity(g: Graph) -> int:
    """Smallest vertex cut; ``n - 1`` for a complete graph by convention."""
    require_connected(g)
    if g.is_complete():
        return g.n - 1
    best = min(g.degrees())
    adj = [set(a) for a in g.adjacency]
    i = 0
    # the lowest-indexed vertex outside a minimum cut has index <= best
    while i <= best and i < g.n:
        for j in range(i + 1, g.n):
            if j not in adj[i]:
                best = min(best, local_vertex_connectivity(g, i, j, limit=best))
        i += 1
    return best


def edge_connectivity(g: Graph) -> int:
    require_connected(g)
    if g.n == 1:
        return 0
    best = min(g.degrees())
    for t in range(1, g.n):
        best = min(best, local_edge_connectivity(g, 0, t, limit=best))
    return best


def compute_metrics(g: Graph) -> GraphMetrics:
    require_connected(g)
    if g.n < 2:
        raise GraphError("metrics need at least two vertices")
    deg = g.degrees()
    small = g.n <= config.CONNECTIVITY_LIMIT
    return GraphMetrics(
        n=g.n,
        m=g.m,
        max_degree=max(deg),
        min_degree=min(deg),
        avg_degree=2 * g.m / g.n,
        density=2 * g.m / (g.n * (g.n - 1)),
        avg_path_length=average_path_length(g),
        vertex_connectivity=vertex_connectivity(g) if small else None,
        edge_connectivity=edge_connectivity(g) if small else None,
    )


def adjacency_matrix(g: Graph) -> np.ndarray:
    if g.n > config.DENSE_LIMIT:
        raise BudgetExceeded(f"n={g.n} exceeds dense limit {config.DENSE_LIMIT}")
    A = np.zeros((g.n, g.n))
    if g.m:
        u, v = np.array(g.edges).T
        A[u, v] = 1.0
        A[v, u] = 1.0
    return A


def laplacian(g: Graph) -> np.ndarray:
    A = adjacency_matrix(g)
    return np.diag(A.sum(axis=1)) - A


def build_matrices(g: Graph) -> MatrixSet:
    require_connected(g)
    A = adjacency_matrix(g)
    deg = A.sum(axis=1)
    D = np.diag(deg)
    return MatrixSet(A=A, D=D, L=D - A, P=A / deg[:, None])


def format_edgelist(g: Graph) -> str:
    lines = [f"# n={g.n} m={g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise GraphError("edge list must start with a '# n=<n> m=<m>' header")
    header = dict(tok.partition("=")[::2] for tok in lines[0].lstrip("#").split())
    try:
        n, m = int(header["n"]), int(header["m"])
    except (KeyError, ValueError) as exc:
        raise GraphError(f"bad edge list header {lines[0]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise GraphError(f"header says m={m} but {len(edges)} edges follow")
    return Graph(n, tuple(edges))


def write_edgelist(g: Graph, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_edgelist(g))
    return path


def read_edgelist(path: str | Path) -> Graph:
    return parse_edgelist(Path(path).read_text())


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    return Graph(n, tuple(edges))
