"""The hierarchical small-world network M_g^r.

Vertices are numbered in level order of the basic full r-ary tree: the root
is 0 and the children of tree vertex ``j`` are ``r*j + 1 .. r*j + r``. With
this numbering the descendants of any vertex occupy one contiguous block
per level.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .errors import BudgetExceeded, GraphError
from .graph import Graph, require_connected


def _check_rg(r: int, g: int) -> None:
    if r < 2:
        raise GraphError(f"branching factor r must be >= 2, got {r}")
    if g < 0:
        raise GraphError(f"generation g must be >= 0, got {g}")


def order_and_size(r: int, g: int) -> tuple[int, int]:
    """Exact vertex and edge counts ``(N_g, E_g)``.

    Both closed forms for the edge count are evaluated in integer
    arithmetic and must agree; Python integers do not wrap, so large
    parameters simply produce large numbers.
    """
    _check_rg(r, g)
    n = (r ** (g + 1) - 1) // (r - 1)
    num = g * r ** (g + 2) - g * r ** (g + 1) - r ** (g + 1) + r
    e_product, rem = divmod(num, (r - 1) ** 2)
    # (g+1)/(r-1) + (g - 1/(r-1)) N  ==  ((g+1) + (g(r-1) - 1) N) / (r-1)
    e_order, rem2 = divmod((g + 1) + (g * (r - 1) - 1) * n, r - 1)
    if rem or rem2 or e_product != e_order:
        raise ArithmeticError(f"edge-count closed forms disagree at r={r}, g={g}")
    return n, e_product


def level_degree(r: int, g: int, i: int) -> int:
    """Degree shared by every vertex on level ``i``."""
    _check_rg(r, g)
    if not 0 <= i <= g:
        raise GraphError(f"level {i} outside [0, {g}]")
    return (r ** (g + 1 - i) - 1) // (r - 1) + i - 1


def level_start(r: int, i: int) -> int:
    """Index of the first vertex on level ``i``."""
    return (r**i - 1) // (r - 1)


@dataclass(frozen=True)
class HierarchicalNetwork:
    graph: Graph
    r: int
    g: int
    level: tuple[int, ...]
    parent: tuple[int | None, ...]
    desc_count: tuple[int, ...]
    anc_count: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.graph.n

    def is_leaf(self, v: int) -> bool:
        return self.level[v] == self.g

    def non_leaves(self) -> range:
        return range(level_start(self.r, self.g))

    def children(self, v: int) -> list[int]:
        if self.is_leaf(v):
            return []
        return list(range(self.r * v + 1, self.r * v + self.r + 1))

    def descendants(self, v: int) -> list[int]:
        """Descendants of ``v`` in the basic tree, nearest levels first."""
        out: list[int] = []
        lo, hi = v, v + 1
        for _ in range(self.g - self.level[v]):
            lo, hi = self.r * lo + 1, self.r * (hi - 1) + self.r + 1
            out.extend(range(lo, hi))
        return out

    def subtree(self, v: int) -> list[int]:
        return [v] + self.descendants(v)

    def ancestors(self, v: int) -> list[int]:
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out

    def descriptor(self) -> dict:
        """JSON-ready summary ``{r, g, n, m, levels}``."""
        levels = [
            {"level": i, "count": self.r**i, "degree": level_degree(self.r, self.g, i)}
            for i in range(self.g + 1)
        ]
        return {"r": self.r, "g": self.g, "n": self.n, "m": self.graph.m, "levels": levels}

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor(), indent=2) + "\n"


def _check_budget(r: int, g: int, budget: int | None) -> int:
    n, _ = order_and_size(r, g)
    budget = config.VERTEX_BUDGET if budget is None else budget
    if n > budget:
        raise BudgetExceeded(f"M_{g}^{r} has {n} vertices, above the budget of {budget}")
    return n


def tree_edges(r: int, g: int) -> list[tuple[int, int]]:
    """Edges of M_g^r from the basic tree: each non-leaf joined to all its descendants."""
    edges = []
    for i in range(g):
        for v in range(level_start(r, i), level_start(r, i + 1)):
            lo, hi = v, v + 1
            for _ in range(g - i):
                lo, hi = r * lo + 1, r * (hi - 1) + r + 1
                edges.extend((v, u) for u in range(lo, hi))
    return edges


def recursive_edges(r: int, g: int) -> list[tuple[int, int]]:
    """Edges of M_g^r grown from ``r`` copies of M_{g-1}^r plus a new hub.

    The copies are relabelled onto the canonical level-order indices: vertex
    ``x`` of copy ``c`` sitting at level ``l`` (position ``p`` in that level)
    lands at level ``l + 1``, position ``c * r**l + p``.
    """
    edges: list[tuple[int, int]] = []
    n_prev = 1
    for gen in range(1, g + 1):
        levels_prev = [0] * n_prev
        for lvl in range(gen):
            for x in range(level_start(r, lvl), min(level_start(r, lvl + 1), n_prev)):
                levels_prev[x] = lvl

        def relabel(c: int, x: int) -> int:
            lvl = levels_prev[x]
            pos = x - level_start(r, lvl)
            return level_start(r, lvl + 1) + c * r**lvl + pos

        grown = []
        for c in range(r):
            mapped = [relabel(c, x) for x in range(n_prev)]
            grown.extend((0, y) for y in mapped)
            grown.extend((mapped[a], mapped[b]) for a, b in edges)
        edges = grown
        n_prev = r * n_prev + 1
    return edges


def build_hsw(r: int, g: int, *, method: str = "tree", budget: int | None = None) -> HierarchicalNetwork:
    """Construct M_g^r with canonical level-order indexing.

    ``method`` is ``"tree"`` (basic-tree construction, the default) or
    ``"recursive"`` (copies of the previous generation plus a hub). Both
    give the same edge set.
    """
    _check_rg(r, g)
    n = _check_budget(r, g, budget)
    if method == "tree":
        edges = tree_edges(r, g)
    elif method == "recursive":
        edges = recursive_edges(r, g)
    else:
        raise ValueError(f"unknown construction method {method!r}")
    graph = require_connected(Graph(n, tuple(edges)))

    level = []
    for i in range(g + 1):
        level.extend([i] * r**i)
    parent = tuple(None if v == 0 else (v - 1) // r for v in range(n))
    # a level-i vertex has sum_{t=1}^{g-i} r^t descendants
    desc = tuple(level_start(r, g - lv + 1) - 1 for lv in level)
    return HierarchicalNetwork(
        graph=graph,
        r=r,
        g=g,
        level=tuple(level),
        parent=parent,
        desc_count=desc,
        anc_count=tuple(level),
    )


@dataclass(frozen=True)
class LevelProfile:
    counts: tuple[int, ...]
    degrees: tuple[int, ...]
    probabilities: tuple[Fraction, ...]
    histogram: dict[int, int]


def level_probability(r: int, g: int, i: int) -> Fraction:
    """Chance that a uniformly chosen vertex sits on level ``i``."""
    return Fraction(r**i * (r - 1), r ** (g + 1) - 1)


def level_profile(net: HierarchicalNetwork) -> LevelProfile:
    r, g = net.r, net.g
    hist = Counter(net.graph.degrees())
    return LevelProfile(
        counts=tuple(r**i for i in range(g + 1)),
        degrees=tuple(level_degree(r, g, i) for i in range(g + 1)),
        probabilities=tuple(level_probability(r, g, i) for i in range(g + 1)),
        histogram=dict(sorted(hist.items(), reverse=True)),
    )


def density(r: int, g: int) -> float:
    n, e = order_and_size(r, g)
    if n < 2:
        raise GraphError("density is undefined for a single vertex")
    return 2 * e / (n * (n - 1))
