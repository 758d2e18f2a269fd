import itertools

import numpy as np
import pytest

from oransim.coloring import ExpandedGraph


def random_graph(rng: np.random.Generator, n: int, p: float) -> ExpandedGraph:
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return ExpandedGraph.from_edges(range(n), edges)


def brute_chromatic(g: ExpandedGraph) -> int:
    """Smallest k admitting a proper coloring, by exhaustive backtracking (test oracle, n <= 8)."""
    nodes = g.order()
    n = len(nodes)
    if n == 0:
        return 0
    nbrs = [set() for _ in range(n)]
    for u, v in g.edges():
        nbrs[nodes.index(u)].add(nodes.index(v))
        nbrs[nodes.index(v)].add(nodes.index(u))

    def extend(colors: list[int], k: int) -> bool:
        i = len(colors)
        if i == n:
            return True
        # a new node may open at most one fresh color, which removes color-permutation symmetry
        for c in range(min(k, max(colors, default=-1) + 2)):
            if all(colors[j] != c for j in nbrs[i] if j < i):
                colors.append(c)
                if extend(colors, k):
                    return True
                colors.pop()
        return False

    return next(k for k in range(1, n + 1) if extend([], k))


@pytest.fixture
def tiny_config():
    """Two-cell scenario shrunk to a handful of ticks so orchestration tests stay fast."""
    from oransim.config import config_from_dict

    return config_from_dict({
        "name": "tiny",
        "traffic": {"synthetic": {"history_days": 1, "noise_std": 0.0}, "forecaster": {"kind": "SeasonalNaive"},
                    "mapping": {"n_min": 2, "n_max": 8, "x_min": 0.0, "x_max": 50.0}, "ru_shares": [0.5, 0.5],
                    "turnover_fraction": 0.25},
        "policy": {"headroom": 1.0, "peak_scope": "per_ru"},
        "run": {"schemes": ["Full"], "seeds": [0], "rapp_indices": [40, 41], "xapp_per_rapp": 5,
                "windows_per_xapp": 20, "trace_limit": 50},
    })


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
