"""Scenario configuration: JSON schema, defaults, validation and bundled presets."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import types
import typing
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .coloring import Strategy
from .policy import MAX_MU, FairnessScheme, Sla
from .radio import ChannelParams, Position, RadioUnit, RuKind
from .traffic import ForecasterKind, UeCountMapping

SCHEMES = ("RappXappOnly", "XappDappOnly", "Full")
PEAK_SCOPES = ("total", "per_ru")
PRESETS = ("fig4", "fig5")


class ConfigError(ValueError):
    """Base class; ``diagnostics`` is a list of (field_path, message)."""

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{p}: {m}" for p, m in diagnostics))


class ParseError(ConfigError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__([(f"<line {line}, column {column}>", message)])


class SemanticError(ConfigError):
    pass


@dataclass
class ChannelConfig:
    carrier_ghz: float = 3.5
    bandwidth_hz: float = 10e6
    pl_intercept_db: float = 43.3
    noise_psd_dbm_hz: float = -174.0
    reference_distance_m: float = 1.0
    shadowing_sigma_db: float = 0.0


@dataclass
class RuConfig:
    id: int
    kind: str
    x: float
    y: float
    tx_power_dbm: float | None = None
    pathloss_exponent: float | None = None
    # new UEs homed on this RU are dropped uniformly within this radius
    spawn_radius_m: float = 150.0


def _default_rus() -> list[RuConfig]:
    return [RuConfig(0, "Macro", 250.0, 250.0), RuConfig(1, "Micro", 375.0, 375.0, spawn_radius_m=100.0)]


@dataclass
class RadioConfig:
    area_width: float = 500.0
    area_height: float = 500.0
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    rus: list[RuConfig] = field(default_factory=_default_rus)
    ue_velocity_mps: float = 1.0
    mobility_dt_s: float = 1.0


@dataclass
class SyntheticConfig:
    history_days: int = 7
    mean: float = 50.0
    amplitude: float = 40.0
    peak_hour: float = 17.0
    noise_std: float = 3.0


@dataclass
class MappingConfig:
    n_min: int = 4
    n_max: int = 30
    x_min: float = 0.0
    x_max: float = 100.0


@dataclass
class ForecasterConfig:
    kind: str = "LinearAR"
    alpha: float = 0.3
    order: int = 4
    season: int = 96


@dataclass
class TrafficConfig:
    dataset: str | None = None
    # leading samples of the dataset used only as forecaster history
    history_samples: int | None = None
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    ru_shares: list[float] = field(default_factory=lambda: [0.6, 0.4])
    mapping: MappingConfig = field(default_factory=MappingConfig)
    forecaster: ForecasterConfig = field(default_factory=ForecasterConfig)
    horizon_steps: int = 1
    # share of the staying UEs replaced by fresh arrivals at each rApp boundary (oldest first)
    turnover_fraction: float = 0.0


@dataclass
class PolicyConfig:
    priorities: dict[str, float] = field(default_factory=lambda: {"default": 1.0})
    strategy: str = "WelshPowell"
    headroom: float = 1.2
    static_mu: int = 1
    # "total": size the PRB pool on the whole-network peak; "per_ru": on the busiest RU
    peak_scope: str = "total"


@dataclass
class SchedulerConfig:
    alpha_ema: float = 0.1
    epsilon: float = 1e3
    tolerance: float = 0.0
    satisfied_fraction: float = 0.5


@dataclass
class RunConfig:
    schemes: list[str] = field(default_factory=lambda: ["Full"])
    strategies: list[str] | None = None
    demands_bps: list[float] = field(default_factory=lambda: [2e6])
    seeds: list[int] = field(default_factory=lambda: [0])
    rapp_count: int = 96
    rapp_start: int = 0
    rapp_indices: list[int] | None = None
    xapp_per_rapp: int = 900
    windows_per_xapp: int = 100
    emit_xapp_rows: bool = True
    trace_limit: int = 1000


@dataclass
class ScenarioConfig:
    radio: RadioConfig = field(default_factory=RadioConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    run: RunConfig = field(default_factory=RunConfig)
    name: str = "custom"

    # -- derived views used by the simulator --

    def channel_params(self) -> ChannelParams:
        return ChannelParams(**dataclasses.asdict(self.radio.channel))

    def radio_units(self) -> list[RadioUnit]:
        return [RadioUnit(r.id, RuKind(r.kind), Position(r.x, r.y), r.tx_power_dbm, r.pathloss_exponent)
                for r in self.radio.rus]

    def sla(self) -> Sla:
        return Sla(dict(self.policy.priorities), self.scheduler.tolerance, self.policy.headroom,
                   FairnessScheme(self.scheduler.alpha_ema, self.scheduler.epsilon))

    def mapping(self) -> UeCountMapping:
        m = self.traffic.mapping
        return UeCountMapping(m.n_min, m.n_max, m.x_min, m.x_max)

    def strategies(self) -> list[str]:
        return list(self.run.strategies) if self.run.strategies else [self.policy.strategy]

    def rapp_indices(self) -> list[int]:
        if self.run.rapp_indices is not None:
            return list(self.run.rapp_indices)
        return list(range(self.run.rapp_start, self.run.rapp_start + self.run.rapp_count))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


# -- dict -> dataclass ---------------------------------------------------------

def _type_name(tp) -> str:
    return getattr(tp, "__name__", str(tp))


def _coerce(value, tp, path: str, diags: list):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union or origin is types.UnionType:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], path, diags)
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            diags.append((path, "expected an object"))
            return None
        return _build(tp, value, path, diags)
    if origin is list:
        if not isinstance(value, list):
            diags.append((path, "expected a list"))
            return None
        return [_coerce(v, args[0], f"{path}[{i}]", diags) for i, v in enumerate(value)]
    if origin is dict:
        if not isinstance(value, dict):
            diags.append((path, "expected an object"))
            return None
        return {str(k): _coerce(v, args[1], f"{path}.{k}", diags) for k, v in value.items()}
    if tp is bool:
        if not isinstance(value, bool):
            diags.append((path, "expected true or false"))
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            diags.append((path, "expected an integer"))
            return None
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            diags.append((path, "expected a number"))
            return None
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            diags.append((path, "expected a string"))
            return None
        return value
    raise TypeError(f"unsupported config type {_type_name(tp)}")


def _build(cls, data: dict, path: str, diags: list):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            diags.append((f"{path}.{key}".lstrip("."), "unknown field"))
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        kwargs[f.name] = _coerce(data[f.name], hints[f.name], f"{path}.{f.name}".lstrip("."), diags)
    missing = [f.name for f in dataclasses.fields(cls)
               if f.name not in kwargs and f.default is dataclasses.MISSING
               and f.default_factory is dataclasses.MISSING]
    for name in missing:
        diags.append((f"{path}.{name}".lstrip("."), "required field missing"))
    if missing:
        return None
    return cls(**kwargs)


# -- semantic checks -----------------------------------------------------------

def _semantic(cfg: ScenarioConfig, base_dir: Path | None) -> list[tuple[str, str]]:
    d: list[tuple[str, str]] = []

    def need(cond, p, msg):
        if not cond:
            d.append((p, msg))

    r = cfg.radio
    need(r.area_width > 0 and r.area_height > 0, "radio.area_width", "area dimensions must be positive")
    need(r.ue_velocity_mps >= 0, "radio.ue_velocity_mps", "velocity must be non-negative")
    need(r.mobility_dt_s > 0, "radio.mobility_dt_s", "must be positive")
    ch = r.channel
    need(ch.bandwidth_hz > 0, "radio.channel.bandwidth_hz", "must be positive")
    need(ch.reference_distance_m > 0, "radio.channel.reference_distance_m", "must be positive")
    need(ch.shadowing_sigma_db >= 0, "radio.channel.shadowing_sigma_db", "must be non-negative")
    need(len(r.rus) >= 1, "radio.rus", "at least one RU is required")
    ids = [ru.id for ru in r.rus]
    need(ids == sorted(set(ids)), "radio.rus", "RU ids must be unique and listed in ascending order")
    for i, ru in enumerate(r.rus):
        p = f"radio.rus[{i}]"
        need(ru.kind in [k.value for k in RuKind], f"{p}.kind", f"must be one of {[k.value for k in RuKind]}")
        need(ru.pathloss_exponent is None or ru.pathloss_exponent > 2.0, f"{p}.pathloss_exponent", "must exceed 2.0")
        need(0 <= ru.x <= r.area_width and 0 <= ru.y <= r.area_height, f"{p}.x", "RU must sit inside the area")
        need(ru.spawn_radius_m > 0, f"{p}.spawn_radius_m", "must be positive")

    t = cfg.traffic
    need(len(t.ru_shares) == len(r.rus), "traffic.ru_shares", "need one share per RU")
    need(all(s >= 0 for s in t.ru_shares) and sum(t.ru_shares) > 0, "traffic.ru_shares",
         "shares must be non-negative with a positive sum")
    m = t.mapping
    if m.n_min > m.n_max:
        d.append(("traffic.mapping.n_min", "n_min must not exceed traffic.mapping.n_max"))
        d.append(("traffic.mapping.n_max", "n_max must not be below traffic.mapping.n_min"))
    need(m.n_min >= 1, "traffic.mapping.n_min", "must be >= 1")
    need(m.x_max > m.x_min, "traffic.mapping.x_max", "must exceed traffic.mapping.x_min")
    need(t.forecaster.kind in [k.value for k in ForecasterKind], "traffic.forecaster.kind",
         f"must be one of {[k.value for k in ForecasterKind]}")
    need(0 < t.forecaster.alpha <= 1, "traffic.forecaster.alpha", "must lie in (0, 1]")
    need(t.forecaster.order >= 1, "traffic.forecaster.order", "must be >= 1")
    need(t.forecaster.season >= 1, "traffic.forecaster.season", "must be >= 1")
    need(t.horizon_steps >= 1, "traffic.horizon_steps", "must be >= 1")
    need(0 <= t.turnover_fraction <= 1, "traffic.turnover_fraction", "must lie in [0, 1]")
    need(t.synthetic.history_days >= 1, "traffic.synthetic.history_days", "must be >= 1")
    need(t.synthetic.noise_std >= 0, "traffic.synthetic.noise_std", "must be non-negative")
    need(t.history_samples is None or t.history_samples >= 1, "traffic.history_samples", "must be >= 1")
    if t.dataset is not None:
        path = Path(t.dataset)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        need(path.is_file(), "traffic.dataset", f"file not found: {path}")

    pol = cfg.policy
    need(0 <= pol.static_mu <= MAX_MU, "policy.static_mu", f"numerology must lie in 0..{MAX_MU}")
    need(pol.headroom >= 1, "policy.headroom", "must be >= 1")
    need(pol.strategy in [s.value for s in Strategy], "policy.strategy", f"must be one of {[s.value for s in Strategy]}")
    need(pol.peak_scope in PEAK_SCOPES, "policy.peak_scope", f"must be one of {list(PEAK_SCOPES)}")
    need(all(w >= 1 for w in pol.priorities.values()), "policy.priorities", "weights must be >= 1")
    need("default" in pol.priorities, "policy.priorities", "a 'default' class is required")

    s = cfg.scheduler
    need(0 < s.alpha_ema <= 1, "scheduler.alpha_ema", "must lie in (0, 1]")
    need(s.epsilon > 0, "scheduler.epsilon", "must be positive")
    need(0 <= s.tolerance < 1, "scheduler.tolerance", "must lie in [0, 1)")
    need(0 < s.satisfied_fraction <= 1, "scheduler.satisfied_fraction", "must lie in (0, 1]")

    run = cfg.run
    need(len(run.schemes) >= 1 and all(x in SCHEMES for x in run.schemes), "run.schemes",
         f"each scheme must be one of {list(SCHEMES)}")
    need(len(set(run.schemes)) == len(run.schemes), "run.schemes", "duplicate scheme")
    if run.strategies is not None:
        need(len(run.strategies) >= 1 and all(x in [v.value for v in Strategy] for x in run.strategies),
             "run.strategies", f"each strategy must be one of {[v.value for v in Strategy]}")
    need(len(run.demands_bps) >= 1 and all(x > 0 for x in run.demands_bps), "run.demands_bps",
         "need at least one positive demand")
    need(len(run.seeds) >= 1 and len(set(run.seeds)) == len(run.seeds) and all(x >= 0 for x in run.seeds),
         "run.seeds", "need unique non-negative seeds")
    need(run.rapp_count >= 1, "run.rapp_count", "must be >= 1")
    need(run.rapp_start >= 0, "run.rapp_start", "must be >= 0")
    need(run.xapp_per_rapp >= 1, "run.xapp_per_rapp", "must be >= 1")
    need(run.windows_per_xapp >= 1, "run.windows_per_xapp", "must be >= 1")
    need(run.trace_limit >= 0, "run.trace_limit", "must be >= 0")
    if run.rapp_indices is not None:
        need(len(run.rapp_indices) >= 1 and all(i >= 0 for i in run.rapp_indices)
             and run.rapp_indices == sorted(set(run.rapp_indices)), "run.rapp_indices",
             "indices must be non-negative, unique and ascending")
    return d


def config_from_dict(data: dict, base_dir: Path | None = None) -> ScenarioConfig:
    """Resolve defaults and validate; raises SemanticError with every diagnostic found."""
    if not isinstance(data, dict):
        raise SemanticError([("<root>", "expected a JSON object")])
    diags: list[tuple[str, str]] = []
    cfg = _build(ScenarioConfig, data, "", diags)
    if diags:
        raise SemanticError(diags)
    diags = _semantic(cfg, base_dir)
    if diags:
        raise SemanticError(diags)
    return cfg


def validate_config(path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return config_from_dict(data, path.parent)


def _deep_merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def preset_dict(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {list(PRESETS)}")
    text = resources.files("oransim").joinpath("presets").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_preset(name: str, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    data = preset_dict(name)
    if overrides:
        data = _deep_merge(data, overrides)
    return config_from_dict(data)
