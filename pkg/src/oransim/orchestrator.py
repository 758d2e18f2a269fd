"""Nested timescales: rApp intervals of xApp ticks of scheduling windows.

One replication is a fixed (scheme, strategy, demand, seed) combination run
over a sequence of rApp intervals. Each interval forecasts load, picks the
numerology, resizes the UE population and then executes its xApp ticks with
the compiled engine. ``run_xapp_interval`` is the same tick written against
the object-level API; tests check that both produce identical KPIs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from . import _engine
from .coloring import Strategy, color
from .config import ScenarioConfig
from .conflict import ConflictHypergraph, build_hypergraph, expand
from .policy import NumerologyConfig, PolicyProfile, build_policy_profile, static_policy_profile
from .radio import (Position, RadioEnvironment, UserEquipment, achievable_rate_bps, attach_ues,
                    noise_power_w, rx_power_w, sinr_linear, step_mobility, strongest_ru)
from .scheduler import (SchedulerState, frozen_assignment, realize_rates, schedule_window, service_share,
                        update_state)
from .traffic import (Forecaster, TrafficSeries, ingest_csv, map_load_to_ue_count, predict_peak,
                      split_series, synthetic_day_series, SEASON_LENGTH)


class EmptyInput(ValueError):
    pass


class ConflictViolation(RuntimeError):
    """Two adjacent UEs were scheduled on the same PRB in some window."""


class Scheme(str, Enum):
    RAPP_XAPP_ONLY = "RappXappOnly"
    XAPP_DAPP_ONLY = "XappDappOnly"
    FULL = "Full"

    @property
    def time_sharing(self) -> bool:
        return self is not Scheme.RAPP_XAPP_ONLY

    @property
    def uses_forecast(self) -> bool:
        return self is not Scheme.XAPP_DAPP_ONLY


class Scope(str, Enum):
    WINDOW = "Window"
    XAPP = "Xapp"
    RAPP = "Rapp"
    RUN = "Run"


@dataclass(frozen=True)
class SimClock:
    rapp_index: int = 0
    xapp_index: int = 0
    window_index: int = 0
    xapp_per_rapp: int = 900
    windows_per_xapp: int = 100

    def __post_init__(self):
        if not 0 <= self.xapp_index < self.xapp_per_rapp:
            raise ValueError("xapp_index out of range")
        if not 0 <= self.window_index < self.windows_per_xapp:
            raise ValueError("window_index out of range")

    @property
    def absolute_window(self) -> int:
        return (self.rapp_index * self.xapp_per_rapp + self.xapp_index) * self.windows_per_xapp + self.window_index

    def tick(self) -> SimClock:
        """Clock advanced by one scheduling window."""
        w, x, r = self.window_index + 1, self.xapp_index, self.rapp_index
        if w == self.windows_per_xapp:
            w, x = 0, x + 1
        if x == self.xapp_per_rapp:
            x, r = 0, r + 1
        return SimClock(r, x, w, self.xapp_per_rapp, self.windows_per_xapp)


@dataclass
class KpiRecord:
    scope: Scope
    success_rate: float
    jfi: float
    mean_service_share: float
    active_ues: int
    mu: int | None
    strategy: Strategy
    scheme: Scheme
    demand_bps: float | None = None
    seed: int | None = None
    rapp: int | None = None
    xapp: int | None = None
    # for Rapp records: positions of the aggregated Xapp records within the replication
    xapp_ids: range | None = None

    def __post_init__(self):
        for name in ("success_rate", "jfi", "mean_service_share"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")


def jfi(shares: Sequence[float]) -> float:
    """Jain's index; all-zero input counts as perfectly fair."""
    x = np.asarray(shares, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("jfi of an empty list")
    if np.any(x < 0):
        raise ValueError("shares must be non-negative")
    return float(_engine.jfi_kernel(x))


def success_rate(satisfied_flags: Sequence[bool]) -> float:
    flags = list(satisfied_flags)
    if not flags:
        raise EmptyInput("success rate of an empty list")
    return sum(bool(f) for f in flags) / len(flags)


# -- reference tick --------------------------------------------------------------

@dataclass
class XappOutcome:
    record: KpiRecord
    hypergraph: ConflictHypergraph
    coloring: object
    windows: int
    violations: int
    satisfied_windows: dict[int, int]


def run_xapp_interval(env: RadioEnvironment, profile: PolicyProfile, state: SchedulerState,
                      scheme: Scheme | str, rng_color: np.random.Generator, rng_mobility: np.random.Generator,
                      windows: int = 100, satisfied_fraction: float = 0.5, dt_s: float = 1.0,
                      bandwidth_hz: float | None = None) -> XappOutcome:
    """One xApp tick through the object-level API.

    Measures and attaches, builds and colors the conflict graph, runs the
    scheduling windows (time-shared unless the scheme freezes the coloring),
    moves the UEs and reports the tick's KPI.
    """
    scheme = Scheme(scheme)
    num = NumerologyConfig.from_mu(profile.numerology, bandwidth_hz or env.channel.bandwidth_hz)
    ues = sorted(env.ues, key=lambda u: u.id)
    ids = [u.id for u in ues]
    state.ensure(ids)
    if ues:
        attach_ues(ues, env.rus, env.channel)
    h = build_hypergraph(env, profile, num)
    g = expand(h)
    coloring = color(g, num.prb_count, profile.strategy, rng_color)
    rates = {u.id: achievable_rate_bps(sinr_linear(u, [], num.prb_bandwidth_hz, env), num.prb_bandwidth_hz)
             for u in ues}
    priorities = {u.id: u.priority for u in ues}
    demands = {u.id: u.demand_bps for u in ues}
    tick_sat = {u: 0 for u in ids}
    violations = 0
    frozen = frozen_assignment(coloring) if not scheme.time_sharing else None
    frozen_rates = realize_rates(frozen, env, num) if frozen is not None else None
    for w in range(windows):
        if frozen is None:
            a = schedule_window(coloring, g, state, profile, rates, priorities, window_index=w)
            achieved = realize_rates(a, env, num)
        else:
            a, achieved = frozen, frozen_rates
        violations += len(a.violations(g))
        update_state(state, a, achieved, profile, demands)
        for u in ids:
            if achieved[u] >= (1 - profile.tolerance) * demands[u]:
                tick_sat[u] += 1
    step_mobility(ues, dt_s, rng_mobility, env.area_width, env.area_height)
    if ids:
        ok = success_rate([tick_sat[u] >= satisfied_fraction * windows for u in ids])
        shares = [service_share(state, u) for u in ids]
        fairness, mean_share = jfi(shares), sum(shares) / len(shares)
    else:
        ok, fairness, mean_share = 1.0, 1.0, 1.0
    rec = KpiRecord(Scope.XAPP, ok, fairness, mean_share, len(ids), profile.numerology, profile.strategy, scheme)
    return XappOutcome(rec, h, coloring, windows, violations, tick_sat)


# -- replication -------------------------------------------------------------------

def build_traffic(cfg: ScenarioConfig, seed: int) -> tuple[list[TrafficSeries], int]:
    """Per-RU load series and the index of the first evaluated sample."""
    t = cfg.traffic
    ru_ids = [r.id for r in cfg.radio.rus]
    shares = {ru: s / sum(t.ru_shares) for ru, s in zip(ru_ids, t.ru_shares)}
    last_rapp = max(cfg.rapp_indices())
    if t.dataset is not None:
        series = ingest_csv(t.dataset)
        if len(series) == 1 and len(ru_ids) > 1:
            series = split_series(series[0], shares)
        by_ru = {s.ru_id: s for s in series}
        if sorted(by_ru) != ru_ids:
            raise ValueError(f"dataset RU ids {sorted(by_ru)} do not match configured RUs {ru_ids}")
        series = [by_ru[r] for r in ru_ids]
        offset = t.history_samples if t.history_samples is not None else len(series[0]) - SEASON_LENGTH
    else:
        syn = t.synthetic
        days = syn.history_days + (last_rapp // SEASON_LENGTH) + 1
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7A11]))
        agg = synthetic_day_series(days, syn.mean, syn.amplitude, syn.peak_hour, syn.noise_std, rng)
        series = split_series(agg, shares)
        offset = syn.history_days * SEASON_LENGTH
    if offset + last_rapp >= len(series[0]):
        raise ValueError(f"rApp interval {last_rapp} runs past the end of the traffic series")
    return series, offset


@dataclass
class RappOutcome:
    record: KpiRecord
    success: np.ndarray
    jfi: np.ndarray
    mean_share: np.ndarray
    assigned: np.ndarray
    colors_used: np.ndarray
    active_ues: int
    mu: int
    predicted_peak: int
    ticks: int
    windows: int
    violations: int


class Replication:
    """State for one seeded run; intervals must be executed in ascending order."""

    def __init__(self, cfg: ScenarioConfig, scheme: Scheme | str, strategy: Strategy | str,
                 demand_bps: float, seed: int, trace: bool = False):
        self.cfg = cfg
        self.scheme = Scheme(scheme)
        self.strategy = Strategy(strategy)
        self.demand_bps = float(demand_bps)
        self.seed = seed
        self.rus = cfg.radio_units()
        self.channel = cfg.channel_params()
        self.sla = cfg.sla()
        self.series, self.offset = build_traffic(cfg, seed)
        self.mapping = cfg.mapping()
        self.forecaster_cfg = cfg.traffic.forecaster

        root = np.random.SeedSequence(seed)
        pop_ss, mob_ss, col_ss = root.spawn(3)
        self.rng_population = np.random.default_rng(pop_ss)
        self.rng_mobility = np.random.default_rng(mob_ss)
        self.rng_color = np.random.default_rng(col_ss)

        self.ru_xy, self.ru_tx, self.ru_exp = RadioEnvironment(self.rus, channel=self.channel).arrays()
        r = len(self.rus)
        cap = r * cfg.traffic.mapping.n_max
        self.capacity = cap
        self.n_active = 0
        self.ue_xy = np.zeros((cap, 2))
        self.shadow = np.zeros((cap, r))
        self.velocity = np.full(cap, cfg.radio.ue_velocity_mps)
        self.demand = np.full(cap, self.demand_bps)
        self.priority = np.full(cap, self.sla.priorities.get("default", 1.0))
        self.ema = np.zeros(cap)
        self.served = np.zeros(cap, dtype=np.int64)
        self.satisfied = np.zeros(cap, dtype=np.int64)
        self.active = np.zeros(cap, dtype=np.int64)
        self.ue_id = np.zeros(cap, dtype=np.int64)
        self.next_id = 0
        # (satisfied, active) window counts of departed UEs, for run-level fairness
        self.departed: list[tuple[int, int]] = []

        run = cfg.run
        self.trace_prb = np.full((run.trace_limit if trace else 0, cap), -1, dtype=np.int64)
        self.trace_rate = np.zeros((run.trace_limit if trace else 0, cap))
        self.trace_n = np.zeros(run.trace_limit if trace else 0, dtype=np.int64)
        self.trace_window = np.zeros(run.trace_limit if trace else 0, dtype=np.int64)
        self.trace_ids = np.full((run.trace_limit if trace else 0, cap), -1, dtype=np.int64)
        self.traced = 0
        self.windows_done = 0
        self.last_rapp: int | None = None

    # -- rApp-level planning --

    def forecast_peak_ues(self, k: int) -> int:
        counts = []
        for s in self.series:
            f = Forecaster(self.forecaster_cfg.kind, self.forecaster_cfg.alpha, self.forecaster_cfg.order,
                           self.forecaster_cfg.season)
            f.fit(s.values[:self.offset + k])
            counts.append(map_load_to_ue_count(predict_peak(f, self.cfg.traffic.horizon_steps), self.mapping))
        return max(counts) if self.cfg.policy.peak_scope == "per_ru" else sum(counts)

    def actual_counts(self, k: int) -> list[int]:
        return [map_load_to_ue_count(float(s.values[self.offset + k]), self.mapping) for s in self.series]

    def plan(self, k: int) -> tuple[PolicyProfile, int]:
        if self.scheme.uses_forecast:
            peak = self.forecast_peak_ues(k)
            return build_policy_profile(peak, self.sla, self.strategy, self.channel.bandwidth_hz), peak
        return static_policy_profile(self.sla, self.strategy, self.cfg.policy.static_mu), -1

    def _spawn(self, i: int, home: int) -> None:
        rng = self.rng_population
        ru = self.cfg.radio.rus[home]
        w, h = self.cfg.radio.area_width, self.cfg.radio.area_height
        for _ in range(1000):
            rad = ru.spawn_radius_m * math.sqrt(rng.random())
            ang = 2 * math.pi * rng.random()
            x, y = ru.x + rad * math.cos(ang), ru.y + rad * math.sin(ang)
            if 0 <= x <= w and 0 <= y <= h:
                break
        else:
            x, y = ru.x, ru.y
        self.ue_xy[i] = (x, y)
        sigma = self.channel.shadowing_sigma_db
        self.shadow[i] = rng.normal(0.0, sigma, size=len(self.rus)) if sigma > 0 else 0.0
        self.ema[i] = 0.0

    def _per_slot(self):
        return (self.ue_xy, self.shadow, self.velocity, self.demand, self.priority, self.ema, self.served,
                self.satisfied, self.active, self.ue_id)

    def _depart(self, k: int) -> None:
        """Remove the ``k`` oldest UEs (lowest ids); later slots shift down, keeping id order."""
        n = self.n_active
        if k <= 0:
            return
        self.departed.extend(zip(self.satisfied[:k].tolist(), self.active[:k].tolist()))
        for a in self._per_slot():
            a[:n - k] = a[k:n].copy()
        self.n_active = n - k

    def resize_population(self, counts: Sequence[int]) -> None:
        """Match the mapped per-RU counts.

        The oldest UEs leave first: the surplus over the new total plus a
        turnover share of the remaining population. Arrivals get fresh ids and
        a home RU drawn in proportion to the RUs' remaining deficits, so
        arrival order is not tied to geometry.
        """
        target = int(sum(counts))
        if target > self.capacity:
            raise ValueError(f"population {target} exceeds capacity {self.capacity}")
        n = self.n_active
        stay = min(n, target)
        turnover = int(math.floor(self.cfg.traffic.turnover_fraction * stay))
        self._depart(n - stay + turnover)
        n = self.n_active
        if target == n:
            return
        attached = (np.bincount(strongest_ru(self._rx(n)), minlength=len(self.rus)) if n
                    else np.zeros(len(self.rus), dtype=np.int64))
        deficit = np.maximum(np.asarray(counts, dtype=np.int64) - attached, 0)
        for i in range(n, target):
            w = np.cumsum(deficit)
            home = int(np.searchsorted(w, self.rng_population.random() * w[-1], side="right"))
            deficit[home] -= 1
            self._spawn(i, home)
            self.velocity[i] = self.cfg.radio.ue_velocity_mps
            self.demand[i] = self.demand_bps
            self.priority[i] = self.sla.priorities.get("default", 1.0)
            self.served[i] = self.satisfied[i] = self.active[i] = 0
            self.ue_id[i] = self.next_id
            self.next_id += 1
        self.n_active = target

    def _rx(self, n: int) -> np.ndarray:
        ch = self.channel
        return rx_power_w(self.ue_xy[:n], self.ru_xy, self.ru_tx, self.ru_exp, ch.pl_intercept_db,
                          ch.reference_distance_m, self.shadow[:n])

    # -- execution --

    def begin_interval(self, k: int):
        if self.last_rapp is not None and k <= self.last_rapp:
            raise ValueError("rApp intervals must run in ascending order")
        self.last_rapp = k
        profile, peak = self.plan(k)
        self.resize_population(self.actual_counts(k))
        ticks = self.cfg.run.xapp_per_rapp
        n = self.n_active
        angles = self.rng_mobility.uniform(0.0, 2.0 * math.pi, size=(ticks, n))
        uniforms = self.rng_color.random((ticks, n))
        return profile, peak, angles, uniforms

    def run_ticks(self, profile: PolicyProfile, angles: np.ndarray, uniforms: np.ndarray, interval_sat: np.ndarray):
        num = NumerologyConfig.from_mu(profile.numerology, self.channel.bandwidth_hz)
        n = self.n_active
        ticks = angles.shape[0]
        out = {k: np.zeros(ticks) for k in ("success", "jfi", "share", "assigned")}
        out["colors"] = np.zeros(ticks, dtype=np.int64)
        run, sched = self.cfg.run, self.cfg.scheduler
        trace_start = self.traced
        violations, traced, windows = _engine.run_ticks(
            self.ru_xy, self.ru_tx, self.ru_exp, self.channel.pl_intercept_db, self.channel.reference_distance_m,
            noise_power_w(self.channel.noise_psd_dbm_hz, num.prb_bandwidth_hz), self.shadow[:n],
            self.ue_xy[:n], self.velocity[:n], self.demand[:n], self.priority[:n],
            self.ema[:n], self.served[:n], self.satisfied[:n], self.active[:n], interval_sat,
            angles, uniforms, self.cfg.radio.area_width, self.cfg.radio.area_height, self.cfg.radio.mobility_dt_s,
            num.prb_bandwidth_hz, num.prb_count, profile.tolerance, profile.fairness.alpha_ema,
            profile.fairness.epsilon, self.strategy.code, self.scheme.time_sharing, run.windows_per_xapp,
            sched.satisfied_fraction,
            out["success"], out["jfi"], out["share"], out["assigned"], out["colors"],
            self.trace_prb, self.trace_rate, trace_start)
        if traced > trace_start:
            self.trace_n[trace_start:traced] = n
            self.trace_ids[trace_start:traced, :n] = self.ue_id[:n]
        self.traced = traced
        return out, int(violations), int(windows), traced - trace_start

    def run_rapp_interval(self, k: int) -> RappOutcome:
        profile, peak, angles, uniforms = self.begin_interval(k)
        n = self.n_active
        interval_sat = np.zeros(n, dtype=np.int64)
        first_window = self.windows_done
        out, violations, windows, traced = self.run_ticks(profile, angles, uniforms, interval_sat)
        if traced:
            self.trace_window[self.traced - traced:self.traced] = first_window + np.arange(traced)
        self.windows_done += windows
        ticks = angles.shape[0]
        shares = interval_sat / max(windows, 1) if n else np.zeros(0)
        rec = KpiRecord(Scope.RAPP, float(np.mean(out["success"])),
                        jfi(shares) if n else 1.0, float(np.mean(shares)) if n else 1.0,
                        n, profile.numerology, self.strategy, self.scheme, self.demand_bps, self.seed, rapp=k)
        return RappOutcome(rec, out["success"], out["jfi"], out["share"], out["assigned"], out["colors"],
                           n, profile.numerology, peak, ticks, windows, violations)

    def lifetime_shares(self) -> np.ndarray:
        """Service share of every UE that was ever active, departed ones included."""
        n = self.n_active
        sat = np.array([d[0] for d in self.departed] + self.satisfied[:n].tolist(), dtype=np.float64)
        act = np.array([d[1] for d in self.departed] + self.active[:n].tolist(), dtype=np.float64)
        keep = act > 0
        return sat[keep] / act[keep]

    def run_record(self, success_values: np.ndarray) -> KpiRecord:
        shares = self.lifetime_shares()
        fairness = jfi(shares) if shares.size else 1.0
        mean_share = float(np.mean(shares)) if shares.size else 1.0
        return KpiRecord(Scope.RUN, float(np.mean(success_values)) if success_values.size else 1.0, fairness,
                         mean_share, int(shares.size), None, self.strategy, self.scheme, self.demand_bps, self.seed)

    # -- object views --

    def environment(self) -> RadioEnvironment:
        """Object snapshot of the active UEs (positions copied, serving RU attached)."""
        ues = [UserEquipment(int(self.ue_id[i]), Position(float(self.ue_xy[i, 0]), float(self.ue_xy[i, 1])),
                             demand_bps=float(self.demand[i]), priority=float(self.priority[i]),
                             velocity_mps=float(self.velocity[i]),
                             shadowing_db=tuple(float(v) for v in self.shadow[i]) if self.channel.shadowing_sigma_db > 0 else ())
               for i in range(self.n_active)]
        env = RadioEnvironment(list(self.rus), ues, self.channel, self.cfg.radio.area_width, self.cfg.radio.area_height)
        if ues:
            attach_ues(ues, env.rus, env.channel)
        return env

    def scheduler_state(self) -> SchedulerState:
        ids = self.ue_id[:self.n_active].tolist()
        return SchedulerState({u: float(x) for u, x in zip(ids, self.ema)},
                              {u: int(x) for u, x in zip(ids, self.served)},
                              {u: int(x) for u, x in zip(ids, self.satisfied)},
                              self.windows_done,
                              {u: int(x) for u, x in zip(ids, self.active)})

    def load_objects(self, env: RadioEnvironment, state: SchedulerState) -> None:
        slot = {int(u): i for i, u in enumerate(self.ue_id[:self.n_active])}
        for ue in env.ues:
            i = slot[ue.id]
            self.ue_xy[i] = (ue.position.x, ue.position.y)
            self.ema[i] = state.ema_throughput[ue.id]
            self.served[i] = state.served_windows[ue.id]
            self.satisfied[i] = state.satisfied_windows[ue.id]
            self.active[i] = state.active_windows[ue.id]

    def run_rapp_interval_reference(self, k: int) -> tuple[KpiRecord, list[KpiRecord], int]:
        """Slow path through ``run_xapp_interval``; for cross-checking the engine."""
        profile, peak, angles, uniforms = self.begin_interval(k)
        env = self.environment()
        state = self.scheduler_state()
        n = self.n_active
        windows = self.cfg.run.windows_per_xapp
        ids = self.ue_id[:n].tolist()
        records, interval_sat, violations = [], {u: 0 for u in ids}, 0
        color_src = _Replay(uniforms, 0.0, 1.0)
        mob_src = _Replay(angles, 0.0, 2.0 * math.pi)
        for _ in range(angles.shape[0]):
            res = run_xapp_interval(env, profile, state, self.scheme, color_src, mob_src, windows,
                                    self.cfg.scheduler.satisfied_fraction, self.cfg.radio.mobility_dt_s,
                                    self.channel.bandwidth_hz)
            records.append(res.record)
            violations += res.violations
            for u, c in res.satisfied_windows.items():
                interval_sat[u] += c
        self.load_objects(env, state)
        self.windows_done += angles.shape[0] * windows
        shares = np.array([interval_sat[u] / (angles.shape[0] * windows) for u in ids])
        rec = KpiRecord(Scope.RAPP, float(np.mean([r.success_rate for r in records])),
                        jfi(shares) if n else 1.0, float(np.mean(shares)) if n else 1.0,
                        n, profile.numerology, self.strategy, self.scheme, self.demand_bps, self.seed, rapp=k)
        return rec, records, violations


class _Replay:
    """Generator stand-in handing out pre-drawn rows, one row per call.

    Rows must have been drawn on the same range the caller asks for, so the
    values come back bit-for-bit.
    """

    def __init__(self, rows: np.ndarray, low: float, high: float):
        self.rows = rows
        self.low, self.high = low, high
        self.i = 0

    def uniform(self, low=0.0, high=1.0, size=None):
        if (low, high) != (self.low, self.high):
            raise ValueError("replayed rows were drawn on a different range")
        row = self.rows[self.i]
        self.i += 1
        if size != row.shape[0]:
            raise ValueError("draw size changed mid-interval")
        return row.copy()

    def random(self, size=None):
        return self.uniform(0.0, 1.0, size)


# -- experiments -------------------------------------------------------------------

@dataclass
class ReplicationResult:
    scheme: Scheme
    strategy: Strategy
    demand_bps: float
    seed: int
    rapps: list[RappOutcome]
    run: KpiRecord
    violations: int
    trace: dict | None = None


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    replications: list[ReplicationResult] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.violations for r in self.replications)

    def records(self, include_xapp: bool = True) -> Iterator[KpiRecord]:
        """All records in output order: per replication, each interval's xApp rows then its rApp row, then Run."""
        for rep in self.replications:
            for r in rep.rapps:
                if include_xapp:
                    for t in range(r.ticks):
                        yield KpiRecord(Scope.XAPP, float(r.success[t]), float(r.jfi[t]), float(r.mean_share[t]),
                                        r.active_ues, r.mu, rep.strategy, rep.scheme, rep.demand_bps, rep.seed,
                                        rapp=r.record.rapp, xapp=t)
                yield r.record
            yield rep.run

    def run_records(self) -> list[KpiRecord]:
        return [rep.run for rep in self.replications]


def run_replication(cfg: ScenarioConfig, scheme, strategy, demand_bps: float, seed: int,
                    trace: bool = False) -> ReplicationResult:
    rep = Replication(cfg, scheme, strategy, demand_bps, seed, trace=trace)
    outcomes = []
    next_id = 0
    for k in cfg.rapp_indices():
        o = rep.run_rapp_interval(k)
        o.record.xapp_ids = range(next_id, next_id + o.ticks)
        next_id += o.ticks
        outcomes.append(o)
    violations = sum(o.violations for o in outcomes)
    if violations:
        raise ConflictViolation(f"{violations} co-channel conflicts scheduled (scheme {rep.scheme.value}, "
                                f"strategy {rep.strategy.value}, seed {seed})")
    all_success = np.concatenate([o.success for o in outcomes]) if outcomes else np.zeros(0)
    trace_data = None
    if trace and rep.traced:
        trace_data = {"prb": rep.trace_prb[:rep.traced], "rate": rep.trace_rate[:rep.traced],
                      "n": rep.trace_n[:rep.traced], "window": rep.trace_window[:rep.traced],
                      "ids": rep.trace_ids[:rep.traced],
                      "demand": rep.demand_bps, "tolerance": cfg.scheduler.tolerance}
    return ReplicationResult(rep.scheme, rep.strategy, rep.demand_bps, seed, outcomes, rep.run_record(all_success),
                             violations, trace_data)


def run_experiment(cfg: ScenarioConfig, trace: bool = False) -> ExperimentResult:
    """Every (scheme, strategy, demand, seed) replication, in that nesting order."""
    result = ExperimentResult(cfg)
    for scheme in cfg.run.schemes:
        for strategy in cfg.strategies():
            for demand in cfg.run.demands_bps:
                for seed in cfg.run.seeds:
                    result.replications.append(run_replication(cfg, scheme, strategy, demand, seed, trace))
    return result
