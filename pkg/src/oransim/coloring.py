"""Bounded-palette graph coloring, one color per PRB.

Nodes that cannot be colored without a conflict are left unassigned (``None``
in :class:`ColoringResult`, ``-1`` in the array kernels) instead of breaking a
constraint, so downstream scheduling always starts from a valid plan.

The array kernels take a dense boolean adjacency matrix whose rows follow
ascending node id; every tie is broken toward the lower id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit


class Strategy(str, Enum):
    RANDOM = "Random"
    SEQ_COLOR = "SeqColor"
    GREEDY = "Greedy"
    DSATUR = "DSatur"
    WELSH_POWELL = "WelshPowell"

    @property
    def code(self) -> int:
        return _STRATEGY_CODES[self]


_STRATEGY_CODES = {s: i for i, s in enumerate(Strategy)}


@dataclass
class ExpandedGraph:
    nodes: frozenset[int]
    adjacency: dict[int, set[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = frozenset(self.nodes)
        for u in self.nodes:
            self.adjacency.setdefault(u, set())
        for u, nbrs in self.adjacency.items():
            if u in nbrs:
                raise ValueError(f"self-loop on node {u}")
            for v in nbrs:
                if u not in self.adjacency.get(v, ()):
                    raise ValueError(f"adjacency not symmetric for {u}-{v}")

    @classmethod
    def from_edges(cls, nodes, edges) -> ExpandedGraph:
        adj: dict[int, set[int]] = {u: set() for u in nodes}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        return cls(frozenset(nodes), adj)

    def order(self) -> list[int]:
        return sorted(self.nodes)

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nbrs in self.adjacency.items() for v in nbrs if u < v}

    def matrix(self) -> np.ndarray:
        ids = self.order()
        index = {u: i for i, u in enumerate(ids)}
        a = np.zeros((len(ids), len(ids)), dtype=np.bool_)
        for u, nbrs in self.adjacency.items():
            for v in nbrs:
                a[index[u], index[v]] = True
        return a


@dataclass
class ColoringResult:
    assignment: dict[int, int | None]
    palette_size: int
    strategy: Strategy
    colors_used: int

    @property
    def assigned(self) -> dict[int, int]:
        return {u: c for u, c in self.assignment.items() if c is not None}

    @property
    def unassigned(self) -> list[int]:
        return sorted(u for u, c in self.assignment.items() if c is None)


@dataclass(frozen=True)
class Violation:
    kind: str  # "conflict" or "out_of_range"
    nodes: tuple[int, ...]
    prb: int


# -- kernels -------------------------------------------------------------------

@njit(cache=True)
def _conflicts_with_kept(adj, colors, i, c):
    for j in range(adj.shape[0]):
        if adj[i, j] and colors[j] == c:
            return True
    return False


@njit(cache=True)
def color_random_kernel(adj, palette, uniforms):
    """``uniforms`` holds one U[0,1) draw per node, consumed in node order."""
    n = adj.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        c = min(int(uniforms[i] * palette), palette - 1)
        if not _conflicts_with_kept(adj, colors, i, c):
            colors[i] = c
    return colors


@njit(cache=True)
def color_sequential_kernel(adj, palette):
    n = adj.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        c = i % palette
        if not _conflicts_with_kept(adj, colors, i, c):
            colors[i] = c
    return colors


@njit(cache=True)
def _smallest_free(adj, colors, i, palette, blocked):
    blocked[:] = False
    for j in range(adj.shape[0]):
        if adj[i, j] and colors[j] >= 0:
            blocked[colors[j]] = True
    for c in range(palette):
        if not blocked[c]:
            return c
    return -1


@njit(cache=True)
def color_greedy_kernel(adj, palette):
    n = adj.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    blocked = np.zeros(palette, dtype=np.bool_)
    for i in range(n):
        colors[i] = _smallest_free(adj, colors, i, palette, blocked)
    return colors


@njit(cache=True)
def color_dsatur_kernel(adj, palette):
    n = adj.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    blocked = np.zeros(palette, dtype=np.bool_)
    seen = np.zeros(palette, dtype=np.bool_)
    for _ in range(n):
        best = -1
        best_sat = -1
        best_deg = -1
        for i in range(n):
            if done[i]:
                continue
            seen[:] = False
            sat = 0
            deg = 0
            for j in range(n):
                if not adj[i, j]:
                    continue
                if colors[j] >= 0:
                    if not seen[colors[j]]:
                        seen[colors[j]] = True
                        sat += 1
                elif not done[j]:
                    deg += 1
            if sat > best_sat or (sat == best_sat and deg > best_deg):
                best, best_sat, best_deg = i, sat, deg
        colors[best] = _smallest_free(adj, colors, best, palette, blocked)
        done[best] = True
    return colors


@njit(cache=True)
def color_welsh_powell_kernel(adj, palette):
    n = adj.shape[0]
    colors = np.full(n, -1, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if adj[i, j]:
                deg[i] += 1
    # stable sort on -degree keeps ascending index among equal degrees
    order = np.argsort(-deg, kind="mergesort")
    remaining = n
    for c in range(palette):
        if remaining == 0:
            break
        for k in range(n):
            i = order[k]
            if colors[i] >= 0:
                continue
            if not _conflicts_with_kept(adj, colors, i, c):
                colors[i] = c
                remaining -= 1
    return colors


@njit(cache=True)
def color_kernel(code, adj, palette, uniforms):
    if code == 0:
        return color_random_kernel(adj, palette, uniforms)
    if code == 1:
        return color_sequential_kernel(adj, palette)
    if code == 2:
        return color_greedy_kernel(adj, palette)
    if code == 3:
        return color_dsatur_kernel(adj, palette)
    return color_welsh_powell_kernel(adj, palette)


@njit(cache=True)
def count_colors(colors, palette):
    used = np.zeros(palette, dtype=np.bool_)
    k = 0
    for c in colors:
        if c >= 0 and not used[c]:
            used[c] = True
            k += 1
    return k


# -- object-level API ----------------------------------------------------------

def _finish(g: ExpandedGraph, colors: np.ndarray, palette: int, strategy: Strategy) -> ColoringResult:
    ids = g.order()
    assignment = {u: (int(c) if c >= 0 else None) for u, c in zip(ids, colors)}
    result = ColoringResult(assignment, palette, strategy, len({c for c in assignment.values() if c is not None}))
    problems = validate_coloring(g, result)
    if problems:
        raise AssertionError(f"{strategy.value} produced an invalid coloring: {problems}")
    return result


def _check_palette(palette: int):
    if palette < 1:
        raise ValueError("palette must be >= 1")


def color_random(g: ExpandedGraph, palette: int, rng: np.random.Generator) -> ColoringResult:
    _check_palette(palette)
    uniforms = rng.random(len(g.nodes))
    return _finish(g, color_random_kernel(g.matrix(), palette, uniforms), palette, Strategy.RANDOM)


def color_sequential(g: ExpandedGraph, palette: int) -> ColoringResult:
    _check_palette(palette)
    return _finish(g, color_sequential_kernel(g.matrix(), palette), palette, Strategy.SEQ_COLOR)


def color_greedy(g: ExpandedGraph, palette: int) -> ColoringResult:
    _check_palette(palette)
    return _finish(g, color_greedy_kernel(g.matrix(), palette), palette, Strategy.GREEDY)


def color_dsatur(g: ExpandedGraph, palette: int) -> ColoringResult:
    _check_palette(palette)
    return _finish(g, color_dsatur_kernel(g.matrix(), palette), palette, Strategy.DSATUR)


def color_welsh_powell(g: ExpandedGraph, palette: int) -> ColoringResult:
    _check_palette(palette)
    return _finish(g, color_welsh_powell_kernel(g.matrix(), palette), palette, Strategy.WELSH_POWELL)


def color(g: ExpandedGraph, palette: int, strategy: Strategy | str,
          rng: np.random.Generator | None = None) -> ColoringResult:
    strategy = Strategy(strategy)
    if strategy is Strategy.RANDOM:
        if rng is None:
            raise ValueError("Random coloring needs a generator")
        return color_random(g, palette, rng)
    return {
        Strategy.SEQ_COLOR: color_sequential,
        Strategy.GREEDY: color_greedy,
        Strategy.DSATUR: color_dsatur,
        Strategy.WELSH_POWELL: color_welsh_powell,
    }[strategy](g, palette)


def validate_coloring(g: ExpandedGraph, r: ColoringResult) -> list[Violation]:
    out: list[Violation] = []
    for u, c in sorted(r.assignment.items()):
        if c is not None and not 0 <= c < r.palette_size:
            out.append(Violation("out_of_range", (u,), c))
    for u, v in sorted(g.edges()):
        cu, cv = r.assignment.get(u), r.assignment.get(v)
        if cu is not None and cu == cv:
            out.append(Violation("conflict", (u, v), cu))
    return out


def chromatic_number(g: ExpandedGraph) -> int:
    """Exact chromatic number by backtracking; intended for small test graphs."""
    ids = g.order()
    n = len(ids)
    if n == 0:
        return 0
    index = {u: i for i, u in enumerate(ids)}
    nbrs = [[index[v] for v in g.adjacency[u]] for u in ids]

    def colorable(k: int) -> bool:
        colors = [-1] * n

        def place(i: int) -> bool:
            if i == n:
                return True
            used = {colors[j] for j in nbrs[i]}
            # symmetry breaking: never open more than one new color at a time
            top = max(colors[:i], default=-1)
            for c in range(min(k, top + 2)):
                if c not in used:
                    colors[i] = c
                    if place(i + 1):
                        return True
            colors[i] = -1
            return False

        return place(0)

    k = 1
    while not colorable(k):
        k += 1
    return k

