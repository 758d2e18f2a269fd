"""Conflict-aware proportional-fair PRB time-sharing over 10 ms windows.

Each window re-ranks UEs by ``priority * rate / (ema + epsilon)`` and walks
the PRBs in ascending order. A PRB's candidates are the UEs colored with it
plus every still-idle uncolored UE; candidates are admitted best-first when
they conflict with nobody already on that PRB. An uncolored UE that outranks a
colored neighbor therefore takes its PRB for the window, which is how PRBs get
time-shared between users that cannot reuse them simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numba import njit

from .coloring import ColoringResult, ExpandedGraph
from .policy import NumerologyConfig, PolicyProfile
from .radio import RadioEnvironment, UserEquipment, noise_power_w


class NoWindowsElapsed(ValueError):
    pass


@dataclass
class SchedulerState:
    ema_throughput: dict[int, float] = field(default_factory=dict)
    served_windows: dict[int, int] = field(default_factory=dict)
    satisfied_windows: dict[int, int] = field(default_factory=dict)
    total_windows: int = 0
    # windows elapsed since each UE became active; service shares divide by this
    active_windows: dict[int, int] = field(default_factory=dict)

    def ensure(self, ue_ids) -> None:
        for u in ue_ids:
            self.ema_throughput.setdefault(u, 0.0)
            self.served_windows.setdefault(u, 0)
            self.satisfied_windows.setdefault(u, 0)
            self.active_windows.setdefault(u, 0)


@dataclass
class WindowAssignment:
    window_index: int
    prb_to_ues: dict[int, set[int]]
    ue_to_prb: dict[int, int]

    @classmethod
    def from_array(cls, window_index: int, ids, prb: np.ndarray) -> WindowAssignment:
        ue_to_prb = {u: int(p) for u, p in zip(ids, prb) if p >= 0}
        prb_to_ues: dict[int, set[int]] = {}
        for u, p in ue_to_prb.items():
            prb_to_ues.setdefault(p, set()).add(u)
        return cls(window_index, prb_to_ues, ue_to_prb)

    def violations(self, g: ExpandedGraph) -> list[tuple[int, int, int]]:
        """Adjacent pairs sharing a PRB, as (u, v, prb) with u < v."""
        out = []
        for p, holders in sorted(self.prb_to_ues.items()):
            hs = sorted(holders)
            for i, u in enumerate(hs):
                for v in hs[i + 1:]:
                    if v in g.adjacency.get(u, ()):
                        out.append((u, v, p))
        return out


# -- kernels -------------------------------------------------------------------

@njit(cache=True)
def pf_scores(priority, rates, ema, epsilon):
    return priority * rates / (ema + epsilon)


@njit(cache=True)
def schedule_window_kernel(colors, adj, scores, palette):
    n = colors.shape[0]
    prb = np.full(n, -1, dtype=np.int64)
    # stable sort on -score: equal scores keep ascending UE order
    order = np.argsort(-scores, kind="mergesort")
    # bucket colored UEs by PRB and keep uncolored ones apart, both in rank order
    start = np.zeros(palette + 1, dtype=np.int64)
    for u in range(n):
        if colors[u] >= 0:
            start[colors[u] + 1] += 1
    for p in range(palette):
        start[p + 1] += start[p]
    fill = start[:palette].copy()
    bucket = np.empty(n, dtype=np.int64)
    uncolored = np.empty(n, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        u = order[i]
        rank[u] = i
        c = colors[u]
        if c >= 0:
            bucket[fill[c]] = u
            fill[c] += 1
        else:
            uncolored[m] = u
            m += 1
    holders = np.empty(n, dtype=np.int64)
    for p in range(palette):
        k = 0
        i = start[p]
        j = 0
        while i < start[p + 1] or j < m:
            if j < m and prb[uncolored[j]] >= 0:
                j += 1
                continue
            if j >= m or (i < start[p + 1] and rank[bucket[i]] < rank[uncolored[j]]):
                u = bucket[i]
                i += 1
            else:
                u = uncolored[j]
                j += 1
            ok = True
            for h in range(k):
                if adj[u, holders[h]]:
                    ok = False
                    break
            if ok:
                prb[u] = p
                holders[k] = u
                k += 1
    return prb


@njit(cache=True)
def realize_rates_kernel(prb, rx_w, serving, noise_w, prb_bw, palette):
    n, n_ru = rx_w.shape
    used = np.zeros((palette, n_ru), dtype=np.bool_)
    for u in range(n):
        if prb[u] >= 0:
            used[prb[u], serving[u]] = True
    rates = np.zeros(n)
    for u in range(n):
        p = prb[u]
        if p < 0:
            continue
        s = serving[u]
        interference = 0.0
        for r in range(n_ru):
            if r != s and used[p, r]:
                interference += rx_w[u, r]
        rates[u] = prb_bw * np.log2(1.0 + rx_w[u, s] / (noise_w + interference))
    return rates


@njit(cache=True)
def window_conflicts(prb, adj):
    n = prb.shape[0]
    bad = 0
    for u in range(n):
        if prb[u] < 0:
            continue
        for v in range(u + 1, n):
            if prb[v] == prb[u] and adj[u, v]:
                bad += 1
    return bad


@njit(cache=True)
def update_state_kernel(ema, served, satisfied, active, prb, achieved, target, alpha):
    for u in range(ema.shape[0]):
        ema[u] = (1.0 - alpha) * ema[u] + alpha * achieved[u]
        if prb[u] >= 0:
            served[u] += 1
        if achieved[u] >= target[u]:
            satisfied[u] += 1
        active[u] += 1


# -- object-level API ----------------------------------------------------------

def pf_score(u: UserEquipment, state: SchedulerState, profile: PolicyProfile, r_u: float) -> float:
    if r_u < 0:
        raise ValueError("rate must be non-negative")
    ema = state.ema_throughput.get(u.id, 0.0)
    return u.priority * r_u / (ema + profile.fairness.epsilon)


def _colors_array(coloring: ColoringResult, ids) -> np.ndarray:
    return np.array([-1 if coloring.assignment.get(u) is None else coloring.assignment[u] for u in ids],
                    dtype=np.int64)


def schedule_window(coloring: ColoringResult, g: ExpandedGraph, state: SchedulerState,
                    profile: PolicyProfile, rates: Mapping[int, float],
                    priorities: Mapping[int, float] | None = None, window_index: int = 0) -> WindowAssignment:
    ids = g.order()
    missing = [u for u in ids if u not in rates]
    if missing:
        raise ValueError(f"no rate for UEs {missing}")
    priorities = priorities or {}
    prio = np.array([priorities.get(u, 1.0) for u in ids], dtype=np.float64)
    r = np.array([rates[u] for u in ids], dtype=np.float64)
    ema = np.array([state.ema_throughput.get(u, 0.0) for u in ids], dtype=np.float64)
    scores = pf_scores(prio, r, ema, profile.fairness.epsilon)
    prb = schedule_window_kernel(_colors_array(coloring, ids), g.matrix(), scores, coloring.palette_size)
    return WindowAssignment.from_array(window_index, ids, prb)


def frozen_assignment(coloring: ColoringResult, window_index: int = 0) -> WindowAssignment:
    """Use the spatial plan as-is for a window (no time-sharing)."""
    ids = sorted(coloring.assignment)
    return WindowAssignment.from_array(window_index, ids, _colors_array(coloring, ids))


def realize_rates(a: WindowAssignment, env: RadioEnvironment, num: NumerologyConfig) -> dict[int, float]:
    ues = sorted(env.ues, key=lambda u: u.id)
    ids = [u.id for u in ues]
    if not ues:
        return {}
    rx = env.rx_power_matrix_w(ues)
    serving = np.array([env.ru_index(u.serving_ru) for u in ues], dtype=np.int64)
    prb = np.array([a.ue_to_prb.get(u, -1) for u in ids], dtype=np.int64)
    palette = max(num.prb_count, int(prb.max()) + 1)
    rates = realize_rates_kernel(prb, rx, serving, noise_power_w(env.channel.noise_psd_dbm_hz, num.prb_bandwidth_hz),
                                 num.prb_bandwidth_hz, palette)
    return {u: float(x) for u, x in zip(ids, rates)}


def update_state(state: SchedulerState, a: WindowAssignment, achieved: Mapping[int, float],
                 profile: PolicyProfile, demands: Mapping[int, float]) -> SchedulerState:
    """Advance the EMA and counters by one window for every UE in ``achieved``."""
    alpha = profile.fairness.alpha_ema
    state.ensure(achieved)
    for u, rate in achieved.items():
        state.ema_throughput[u] = (1 - alpha) * state.ema_throughput[u] + alpha * rate
        if u in a.ue_to_prb:
            state.served_windows[u] += 1
        if rate >= (1 - profile.tolerance) * demands[u]:
            state.satisfied_windows[u] += 1
        state.active_windows[u] += 1
    state.total_windows += 1
    return state


def service_share(state: SchedulerState, u: int) -> float:
    windows = state.active_windows.get(u, state.total_windows)
    if windows < 1:
        raise NoWindowsElapsed(f"UE {u} has not seen any window")
    return state.satisfied_windows.get(u, 0) / windows
