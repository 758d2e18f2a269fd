"""Interference hypergraph over active UEs and its clique expansion.

Two UEs conflict when they may not share a PRB: either they hang off the same
RU (one hyperedge per RU), or they sit on different RUs and at least one of
them would drop below its required SINR with the other's RU as interferer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from numba import njit

from .coloring import ColoringResult, ExpandedGraph
from .policy import NumerologyConfig, PolicyProfile
from .radio import RadioEnvironment, noise_power_w


@dataclass
class ConflictHypergraph:
    nodes: frozenset[int]
    hyperedges: list[frozenset[int]] = field(default_factory=list)
    pair_edges: set[frozenset[int]] = field(default_factory=set)

    def __post_init__(self):
        self.nodes = frozenset(self.nodes)
        # canonical order (by sorted members) so equal hypergraphs compare equal
        self.hyperedges = sorted((frozenset(h) for h in self.hyperedges), key=sorted)
        self.pair_edges = {frozenset(e) for e in self.pair_edges}
        for h in self.hyperedges:
            if not h <= self.nodes:
                raise ValueError(f"hyperedge {sorted(h)} references unknown nodes")
        for e in self.pair_edges:
            if len(e) != 2 or not e <= self.nodes:
                raise ValueError(f"bad pair edge {sorted(e)}")
        for h in self.hyperedges:
            for e in self.pair_edges:
                if e <= h:
                    raise ValueError(f"pair edge {sorted(e)} duplicates an intra-RU conflict")


def required_sinr(demand_bps: float, tolerance: float, prb_bandwidth_hz: float) -> float:
    """Smallest SINR at which one PRB carries the tolerance-adjusted demand."""
    if demand_bps <= 0 or prb_bandwidth_hz <= 0:
        raise ValueError("demand and bandwidth must be positive")
    if not 0 <= tolerance < 1:
        raise ValueError("tolerance must lie in [0, 1)")
    return 2.0 ** ((1.0 - tolerance) * demand_bps / prb_bandwidth_hz) - 1.0


@njit(cache=True)
def conflict_matrix(rx_w, serving, gamma_req, noise_w):
    """Dense adjacency of the expanded conflict graph.

    Same-RU pairs always conflict; cross-RU pairs conflict when either side
    falls under its threshold with the other side's RU as the only interferer.
    """
    n = rx_w.shape[0]
    adj = np.zeros((n, n), dtype=np.bool_)
    for u in range(n):
        su = serving[u]
        for v in range(u + 1, n):
            sv = serving[v]
            if su == sv:
                hit = True
            else:
                sinr_u = rx_w[u, su] / (noise_w + rx_w[u, sv])
                sinr_v = rx_w[v, sv] / (noise_w + rx_w[v, su])
                hit = sinr_u < gamma_req[u] or sinr_v < gamma_req[v]
            adj[u, v] = hit
            adj[v, u] = hit
    return adj


def build_hypergraph(env: RadioEnvironment, profile: PolicyProfile, num: NumerologyConfig) -> ConflictHypergraph:
    ues = sorted(env.ues, key=lambda u: u.id)
    ids = [u.id for u in ues]
    if not ues:
        return ConflictHypergraph(frozenset())
    if any(u.serving_ru is None for u in ues):
        raise ValueError("all UEs must be attached before building the hypergraph")
    rx = env.rx_power_matrix_w(ues)
    serving = np.array([env.ru_index(u.serving_ru) for u in ues], dtype=np.int64)
    gamma = np.array([required_sinr(u.demand_bps, profile.tolerance, num.prb_bandwidth_hz) for u in ues])
    adj = conflict_matrix(rx, serving, gamma, noise_power_w(env.channel.noise_psd_dbm_hz, num.prb_bandwidth_hz))
    hyperedges = []
    for r in range(len(env.rus)):
        members = frozenset(ids[i] for i in np.flatnonzero(serving == r))
        if len(members) >= 2:
            hyperedges.append(members)
    pairs = {frozenset((ids[i], ids[j])) for i, j in zip(*np.nonzero(np.triu(adj, 1)))
             if serving[i] != serving[j]}
    return ConflictHypergraph(frozenset(ids), hyperedges, pairs)


def expand(h: ConflictHypergraph) -> ExpandedGraph:
    adj: dict[int, set[int]] = {u: set() for u in h.nodes}
    for edge in h.hyperedges:
        for u, v in combinations(edge, 2):
            adj[u].add(v)
            adj[v].add(u)
    for edge in h.pair_edges:
        u, v = tuple(edge)
        adj[u].add(v)
        adj[v].add(u)
    return ExpandedGraph(h.nodes, adj)


def hypergraph_to_dict(h: ConflictHypergraph, coloring: ColoringResult | None = None,
                       env: RadioEnvironment | None = None, **meta) -> dict:
    """JSON-ready snapshot; includes PRB assignment and positions when given."""
    nodes = []
    ues = {u.id: u for u in env.ues} if env is not None else {}
    for uid in sorted(h.nodes):
        node = {"id": uid}
        if uid in ues:
            u = ues[uid]
            node.update(x=u.position.x, y=u.position.y, serving_ru=u.serving_ru)
        if coloring is not None:
            node["prb"] = coloring.assignment.get(uid)
        nodes.append(node)
    out = {
        **meta,
        "nodes": nodes,
        "hyperedges": sorted(sorted(e) for e in h.hyperedges),
        "pair_edges": sorted(sorted(e) for e in h.pair_edges),
    }
    if coloring is not None:
        out.update(strategy=coloring.strategy.value, palette_size=coloring.palette_size,
                   colors_used=coloring.colors_used)
    return out


def hypergraph_from_dict(d: dict) -> tuple[ConflictHypergraph, dict[int, int | None]]:
    h = ConflictHypergraph(frozenset(n["id"] for n in d["nodes"]),
                           [frozenset(e) for e in d["hyperedges"]],
                           {frozenset(e) for e in d["pair_edges"]})
    return h, {n["id"]: n.get("prb") for n in d["nodes"]}


def dump_json(h: ConflictHypergraph, path, coloring: ColoringResult | None = None,
              env: RadioEnvironment | None = None, **meta) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hypergraph_to_dict(h, coloring, env, **meta), fh, indent=2, sort_keys=True)
        fh.write("\n")

